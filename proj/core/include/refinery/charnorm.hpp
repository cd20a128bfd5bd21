#pragma once

// Character-level normalization of Persian text.

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace refinery::charnorm {

/// Codepoint-to-codepoint replacement table. Parsed from lines of "U+XXXX U+YYYY".
class MappingTable {
public:
    MappingTable() = default;

    /// Throws ConfigError on syntax errors, a source listed twice with different
    /// targets, or a target that is itself a source (the table must be closed).
    static MappingTable parse(std::string_view text);
    static std::shared_ptr<const MappingTable> bundled();

    void add(char32_t from, char32_t to);
    char32_t map(char32_t cp) const {
        auto it = table_.find(cp);
        return it == table_.end() ? cp : it->second;
    }
    bool is_source(char32_t cp) const { return table_.contains(cp); }
    std::size_t size() const { return table_.size(); }
    const std::unordered_map<char32_t, char32_t>& entries() const { return table_; }

private:
    std::unordered_map<char32_t, char32_t> table_;
};

/// Set of codepoints stored as sorted, disjoint inclusive ranges.
/// Parsed from lines of "U+XXXX" or "U+XXXX..U+YYYY".
class CodepointSet {
public:
    CodepointSet() = default;

    static CodepointSet parse(std::string_view text);
    static std::shared_ptr<const CodepointSet> bundled();
    // Base list plus the extra codepoints removed from book text.
    static std::shared_ptr<const CodepointSet> bundled_books();

    void insert(char32_t first, char32_t last);
    void insert(char32_t cp) { insert(cp, cp); }
    void merge(const CodepointSet& other);
    bool contains(char32_t cp) const;
    bool empty() const { return ranges_.empty(); }
    const std::vector<std::pair<char32_t, char32_t>>& ranges() const { return ranges_; }

private:
    std::vector<std::pair<char32_t, char32_t>> ranges_;
};

struct Options {
    bool keep_irab = false;
    std::size_t max_char_run = 3;
    std::shared_ptr<const MappingTable> mapping = MappingTable::bundled();
    std::shared_ptr<const CodepointSet> blocked = CodepointSet::bundled();
    bool preserve_zwnj = true;
    // Digit runs carry numeric values; they are left intact unless this is set.
    bool truncate_digit_runs = false;
    std::size_t max_blank_lines = 0;

    static Options web();
    static Options books();

    /// Empty when the options satisfy their invariants.
    std::vector<std::string> violations() const;
};

/// Applies the mapping table and, unless `keep_irab`, removes U+064B..U+0652.
std::string map_to_persian(std::string_view text, const Options& opts);

/// Shortens every run of one codepoint longer than `max_run` to exactly `max_run`.
std::string truncate_repeats(std::string_view text, std::size_t max_run);

/// Horizontal whitespace becomes a single U+0020, lines are trimmed, newline variants
/// become '\n' and blank lines collapse (at most `max_blank_lines` kept between lines).
std::string normalize_whitespace(std::string_view text, std::size_t max_blank_lines = 0);

struct StripResult {
    std::string text;
    std::size_t removed = 0;
};

StripResult strip_nonstandard(std::string_view text, const CodepointSet& blocked);

/// map_to_persian -> strip_nonstandard -> truncate_repeats -> normalize_whitespace.
/// The result is a fixed point of the same call.
std::string normalize(std::string_view text, const Options& opts);

// Codepoint-level variants used by `normalize`.
std::u32string map_to_persian(std::u32string_view text, const Options& opts);
// Runs of codepoints for which `exempt` holds are copied unchanged.
std::u32string truncate_repeats(std::u32string_view text, std::size_t max_run,
                                const std::function<bool(char32_t)>& exempt);
std::u32string normalize_whitespace(std::u32string_view text, std::size_t max_blank_lines);

}  // namespace refinery::charnorm
