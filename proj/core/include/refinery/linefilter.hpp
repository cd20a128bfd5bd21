#pragma once

// Line- and paragraph-level cleanup. Every filter deletes whole lines and keeps
// the survivors in order; strip_markup blanks lines instead of deleting them.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace refinery::linefilter {

struct LeadingShortLines {
    bool enabled = false;
    std::size_t min_words = 4;
    std::size_t window = 5;
};

struct LineFilterPolicy {
    bool special_ratio_enabled = true;
    double special_ratio_max = 0.85;
    // Book mode: separate numeric and symbolic thresholds.
    bool numeric_symbolic_enabled = false;
    double numeric_ratio_max = 0.8;
    double symbolic_ratio_max = 0.8;
    std::size_t repeat_line_min = 3;
    LeadingShortLines leading_short_lines;

    static LineFilterPolicy web();
    static LineFilterPolicy books();

    std::vector<std::string> violations() const;
};

/// Character-class counts of one line, over non-whitespace characters.
struct LineRatios {
    std::size_t non_space = 0;
    std::size_t letters = 0;
    std::size_t digits = 0;
    std::size_t symbols = 0;

    // Anything that is not a Persian/Arabic/Latin letter: digits, symbols, emoji.
    double special() const { return non_space == 0 ? 0.0 : double(digits + symbols) / double(non_space); }
    double numeric() const { return non_space == 0 ? 0.0 : double(digits) / double(non_space); }
    double symbolic() const { return non_space == 0 ? 0.0 : double(symbols) / double(non_space); }
};

LineRatios line_ratios(std::string_view line);

/// True for lines carrying HTML tags or script fragments.
bool is_markup_line(std::string_view line);

/// Blanks every markup line; the text is returned unchanged when none is found.
std::string strip_markup(std::string_view text);

/// Drops lines whose special ratio exceeds the limit and, in book mode, lines whose
/// numeric or symbolic ratio exceeds its limit. Equal-to-threshold lines are kept.
std::string drop_ratio_lines(std::string_view text, const LineFilterPolicy& policy);

/// Drops every occurrence of a trimmed line seen at least `min_repeats` times.
/// Lines shorter than three characters are never counted.
std::string drop_repeated_lines(std::string_view text, std::size_t min_repeats);

/// Within the first `window` lines, drops lines with fewer than `min_words` words.
std::string drop_leading_short_lines(std::string_view text, const LineFilterPolicy& policy);

/// Removes blank lines, including leading and trailing ones.
std::string collapse_blank_runs(std::string_view text);

}  // namespace refinery::linefilter
