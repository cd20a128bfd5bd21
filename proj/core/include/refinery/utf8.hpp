#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace refinery::utf8 {

/// True when `bytes` is well-formed UTF-8 (no overlongs, surrogates or values past U+10FFFF).
bool valid(std::string_view bytes);

/// Decodes well-formed UTF-8; returns nullopt on the first ill-formed sequence.
std::optional<std::u32string> decode_strict(std::string_view bytes);

/// Decodes UTF-8, replacing each ill-formed sequence with U+FFFD.
std::u32string decode(std::string_view bytes);

void append(std::string& out, char32_t cp);
std::string encode(std::u32string_view cps);

// std::wregex works on wchar_t, which is UTF-32 on the platforms we build for.
std::wstring to_wide(std::string_view bytes);
std::string from_wide(std::wstring_view wide);

}  // namespace refinery::utf8
