#pragma once

// Document-level quality statistics and keep/drop policies.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "refinery/document.hpp"

namespace refinery::docfilter {

/// Word lists used by the filters. Entries and lookups go through `key`, so a
/// match ignores Arabic/Persian letter variants, diacritics and Latin case.
struct Lexicons {
    std::unordered_set<std::string> stopwords_fa;
    std::unordered_set<std::string> stopwords_ar;
    std::unordered_set<std::string> vocabulary;

    static std::string key(std::u32string_view word);
    static std::string key(std::string_view word);

    /// Reads one entry per line ('#' comments) into `set`.
    static void load_words(std::string_view content, std::unordered_set<std::string>& set);

    /// Bundled Persian and Arabic stopwords; no vocabulary.
    static Lexicons bundled();

    bool is_stopword_fa(const std::string& k) const { return stopwords_fa.contains(k); }
    bool is_stopword_ar(const std::string& k) const { return stopwords_ar.contains(k); }
    bool in_vocabulary(const std::string& k) const { return vocabulary.contains(k); }
};

/// Words occurring at least `min_frequency` times across `texts`, as lexicon keys.
std::unordered_set<std::string> build_vocabulary(std::span<const std::string_view> texts,
                                                 std::size_t min_frequency = 5);

/// Every threshold the document filters use. An unset optional disables its criterion.
struct FilterPolicy {
    std::optional<std::size_t> min_words;
    std::optional<double> max_nonpersian_char_frac;
    std::optional<double> min_persian_char_frac;
    std::optional<double> max_word_repetition_frac;
    std::optional<double> max_short_line_frac;
    std::size_t short_line_words = 15;
    std::optional<double> min_avg_word_len;
    std::optional<double> max_avg_word_len;
    std::optional<double> max_numeric_symbolic_frac;
    std::optional<double> min_stopword_frac;
    bool count_arabic_stopwords = false;
    double arabic_stopword_weight = 1.0;
    std::optional<double> max_oov_frac;
    std::optional<std::size_t> max_long_words;
    std::size_t long_word_chars = 15;

    static FilterPolicy web();
    static FilterPolicy culturax();
    static FilterPolicy madlad() { return web(); }
    static FilterPolicy virgool();
    static FilterPolicy wikishia();
    static FilterPolicy book();
    static FilterPolicy ocr();
    static FilterPolicy social();

    bool needs_vocabulary() const { return max_oov_frac.has_value(); }
    std::vector<std::string> violations() const;

    friend bool operator==(const FilterPolicy&, const FilterPolicy&) = default;
};

struct DocStats {
    std::size_t word_count = 0;
    std::size_t non_space_chars = 0;
    double persian_char_ratio = 0.0;
    double nonpersian_char_ratio = 0.0;
    double avg_word_len = 0.0;
    double numeric_symbolic_char_ratio = 0.0;
    std::size_t line_count = 0;
    std::size_t short_line_threshold = 0;
    double short_line_frac = 0.0;
    double max_word_repetition_frac = 0.0;
    double stopword_frac = 0.0;
    double oov_frac = 0.0;
    std::size_t long_word_threshold = 0;
    std::size_t long_word_count = 0;
};

/// Ratios are over non-whitespace characters; line fractions over non-blank lines.
/// Empty text yields all-zero stats.
DocStats compute_stats(std::string_view text, const Lexicons& lex, const FilterPolicy& policy);
inline DocStats compute_stats(const Document& doc, const Lexicons& lex, const FilterPolicy& policy) {
    return compute_stats(doc.text, lex, policy);
}

// Each evaluator returns Drop with the first violated criterion, in a fixed order.

/// TooShort, NonPersianMajority, RepeatedWords, ShortLineMajority, StopwordDeficit, OovExcess.
FilterDecision evaluate_web(const DocStats& stats, const FilterPolicy& policy);

/// TooShort, NonPersianMajority, AvgWordLengthOutOfRange, NumericSymbolicExcess,
/// ShortLineMajority, StopwordDeficit.
FilterDecision evaluate_book(const DocStats& stats, const FilterPolicy& policy);

/// OcrOovExcess, OcrMergedWords.
FilterDecision evaluate_ocr(const Document& doc, const DocStats& stats, const FilterPolicy& policy);

/// ShortReply below `min_words`.
FilterDecision evaluate_social(const Document& doc, const FilterPolicy& policy);

}  // namespace refinery::docfilter
