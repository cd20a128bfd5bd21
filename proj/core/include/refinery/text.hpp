#pragma once

// Character classes and word segmentation shared by the line and document filters.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace refinery::text {

inline constexpr char32_t kZwnj = 0x200C;

enum class CharClass { Space, Newline, Letter, Digit, Symbol };

bool is_horizontal_space(char32_t cp);
bool is_newline(char32_t cp);
inline bool is_space(char32_t cp) { return is_horizontal_space(cp) || is_newline(cp); }

// Arabic harakat U+064B..U+0652.
inline bool is_irab(char32_t cp) { return cp >= 0x064B && cp <= 0x0652; }

// Persian/Arabic letters (including combining marks and the joiners), Latin letters.
bool is_letter(char32_t cp);

// ASCII, Arabic-Indic and extended Arabic-Indic decimal digits.
bool is_digit(char32_t cp);

// Codepoints counted as Persian for character-ratio purposes: the Arabic blocks,
// their supplements and presentation forms, plus ZWNJ.
bool is_persian_char(char32_t cp);

CharClass classify(char32_t cp);

// Whitespace-separated tokens.
std::vector<std::u32string_view> tokens(std::u32string_view s);

// Lines split on '\n'; a trailing newline does not produce an empty last line.
std::vector<std::u32string_view> lines(std::u32string_view s);
std::vector<std::string_view> lines(std::string_view s);

// A word is a token that is neither a number nor a symbol: it has at least one letter.
bool is_word(std::u32string_view token);

// Token with leading/trailing punctuation removed ("دنیا." -> "دنیا").
std::u32string_view word_core(std::u32string_view token);

// Cores of every word token, in order.
std::vector<std::u32string_view> words(std::u32string_view s);
std::size_t word_count(std::u32string_view s);
std::size_t word_count(std::string_view utf8);

std::string_view trim(std::string_view s);
std::u32string_view trim(std::u32string_view s);

}  // namespace refinery::text
