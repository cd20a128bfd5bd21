#include "refinery/docfilter.hpp"

#include <algorithm>
#include <unordered_map>

#include "refinery/bundled.hpp"
#include "refinery/charnorm.hpp"
#include "refinery/error.hpp"
#include "refinery/text.hpp"
#include "refinery/utf8.hpp"

namespace refinery::docfilter {

namespace {

bool is_combining_mark(char32_t cp) {
    return (cp >= 0x0610 && cp <= 0x061A) || (cp >= 0x064B && cp <= 0x065F) || cp == 0x0670 ||
           (cp >= 0x06D6 && cp <= 0x06ED && cp != 0x06DD && cp != 0x06DE && cp != 0x06E9);
}

// Characters a reader sees: joiners and diacritics do not add length.
std::size_t visible_length(std::u32string_view word) {
    return static_cast<std::size_t>(std::count_if(word.begin(), word.end(), [](char32_t cp) {
        return cp != text::kZwnj && cp != 0x200D && !is_combining_mark(cp);
    }));
}

double ratio(std::size_t num, std::size_t den) { return den == 0 ? 0.0 : double(num) / double(den); }

}  // namespace

std::string Lexicons::key(std::u32string_view word) {
    const auto& mapping = *charnorm::MappingTable::bundled();
    std::string out;
    out.reserve(word.size() * 2);
    for (char32_t cp : word) {
        if (cp == text::kZwnj || cp == 0x200D || is_combining_mark(cp)) continue;
        cp = mapping.map(cp);
        if (cp >= 'A' && cp <= 'Z') cp = cp - 'A' + 'a';
        utf8::append(out, cp);
    }
    return out;
}

std::string Lexicons::key(std::string_view word) { return key(utf8::decode(word)); }

void Lexicons::load_words(std::string_view content, std::unordered_set<std::string>& set) {
    for (std::string_view line : text::lines(content)) {
        line = text::trim(line);
        if (line.empty() || line.front() == '#') continue;
        const std::string k = key(line);
        if (!k.empty()) set.insert(k);
    }
}

Lexicons Lexicons::bundled() {
    static const Lexicons lex = [] {
        Lexicons l;
        auto fa = bundled::file("lexicons/stopwords_fa.txt");
        auto ar = bundled::file("lexicons/stopwords_ar.txt");
        if (!fa || !ar) throw ConfigError("missing bundled stopword lists");
        load_words(*fa, l.stopwords_fa);
        load_words(*ar, l.stopwords_ar);
        return l;
    }();
    return lex;
}

std::unordered_set<std::string> build_vocabulary(std::span<const std::string_view> texts,
                                                 std::size_t min_frequency) {
    std::unordered_map<std::string, std::size_t> counts;
    for (std::string_view t : texts) {
        const std::u32string cps = utf8::decode(t);
        for (auto w : text::words(cps)) ++counts[Lexicons::key(w)];
    }
    std::unordered_set<std::string> vocab;
    for (const auto& [k, n] : counts) {
        if (n >= min_frequency) vocab.insert(k);
    }
    return vocab;
}

FilterPolicy FilterPolicy::web() {
    FilterPolicy p;
    p.min_words = 30;
    p.max_nonpersian_char_frac = 0.50;
    p.max_word_repetition_frac = 0.50;
    p.max_short_line_frac = 0.50;
    p.short_line_words = 15;
    return p;
}

FilterPolicy FilterPolicy::culturax() {
    FilterPolicy p = web();
    p.max_oov_frac = 0.025;
    return p;
}

// Provisional: the relaxed values are not quantified upstream.
FilterPolicy FilterPolicy::virgool() {
    FilterPolicy p = web();
    p.max_short_line_frac = 0.70;
    p.min_stopword_frac = 0.05;
    return p;
}

// Provisional, like virgool(): Arabic stopwords count toward the stopword share.
FilterPolicy FilterPolicy::wikishia() {
    FilterPolicy p = web();
    p.min_stopword_frac = 0.05;
    p.count_arabic_stopwords = true;
    p.arabic_stopword_weight = 1.0;
    return p;
}

FilterPolicy FilterPolicy::book() {
    FilterPolicy p;
    p.min_words = 150;
    p.min_persian_char_frac = 0.50;
    p.min_avg_word_len = 3.0;
    p.max_avg_word_len = 10.0;
    p.max_numeric_symbolic_frac = 0.80;
    p.max_short_line_frac = 0.80;
    p.short_line_words = 4;
    p.min_stopword_frac = 0.10;
    p.count_arabic_stopwords = true;
    return p;
}

FilterPolicy FilterPolicy::ocr() {
    FilterPolicy p;
    p.max_oov_frac = 0.05;
    p.max_long_words = 10;
    p.long_word_chars = 15;
    return p;
}

// Provisional minimum length for social messages.
FilterPolicy FilterPolicy::social() {
    FilterPolicy p;
    p.min_words = 8;
    return p;
}

std::vector<std::string> FilterPolicy::violations() const {
    std::vector<std::string> out;
    const auto fraction = [&](const std::optional<double>& v, const char* name) {
        if (v && !(*v >= 0.0 && *v <= 1.0)) out.push_back(std::string(name) + " must be in [0,1]");
    };
    fraction(max_nonpersian_char_frac, "max_nonpersian_char_frac");
    fraction(min_persian_char_frac, "min_persian_char_frac");
    fraction(max_word_repetition_frac, "max_word_repetition_frac");
    fraction(max_short_line_frac, "max_short_line_frac");
    fraction(max_numeric_symbolic_frac, "max_numeric_symbolic_frac");
    fraction(min_stopword_frac, "min_stopword_frac");
    fraction(max_oov_frac, "max_oov_frac");
    if (short_line_words < 1) out.emplace_back("short_line_words must be at least 1");
    if (long_word_chars < 1) out.emplace_back("long_word_chars must be at least 1");
    if (min_avg_word_len && *min_avg_word_len < 0.0) out.emplace_back("min_avg_word_len must be non-negative");
    if (min_avg_word_len && max_avg_word_len && *min_avg_word_len > *max_avg_word_len) {
        out.emplace_back("min_avg_word_len exceeds max_avg_word_len");
    }
    if (!(arabic_stopword_weight >= 0.0)) out.emplace_back("arabic_stopword_weight must be non-negative");
    return out;
}

DocStats compute_stats(std::string_view body, const Lexicons& lex, const FilterPolicy& policy) {
    if (policy.needs_vocabulary() && lex.vocabulary.empty()) {
        throw ConfigError("policy has an OOV criterion but the vocabulary is empty");
    }
    DocStats s;
    s.short_line_threshold = policy.short_line_words;
    s.long_word_threshold = policy.long_word_chars;

    const std::u32string cps = utf8::decode(body);
    std::size_t persian = 0;
    std::size_t letters = 0;
    for (char32_t cp : cps) {
        const auto cls = text::classify(cp);
        if (cls == text::CharClass::Space || cls == text::CharClass::Newline) continue;
        ++s.non_space_chars;
        if (text::is_persian_char(cp)) ++persian;
        if (cls == text::CharClass::Letter) ++letters;
    }
    s.persian_char_ratio = ratio(persian, s.non_space_chars);
    s.nonpersian_char_ratio = ratio(s.non_space_chars - persian, s.non_space_chars);
    s.numeric_symbolic_char_ratio = ratio(s.non_space_chars - letters, s.non_space_chars);

    const auto words = text::words(cps);
    s.word_count = words.size();
    std::size_t total_len = 0;
    std::size_t stop_fa = 0;
    std::size_t stop_ar = 0;
    std::size_t oov = 0;
    std::unordered_map<std::string, std::size_t> freq;
    for (auto w : words) {
        const std::size_t len = visible_length(w);
        total_len += len;
        if (len > policy.long_word_chars) ++s.long_word_count;
        const std::string k = Lexicons::key(w);
        if (lex.is_stopword_fa(k)) {
            ++stop_fa;
        } else if (policy.count_arabic_stopwords && lex.is_stopword_ar(k)) {
            ++stop_ar;
        }
        if (policy.needs_vocabulary() && !lex.in_vocabulary(k)) ++oov;
        ++freq[k];
    }
    s.avg_word_len = ratio(total_len, s.word_count);
    std::size_t most = 0;
    for (const auto& [k, n] : freq) most = std::max(most, n);
    s.max_word_repetition_frac = ratio(most, s.word_count);
    if (s.word_count > 0) {
        const double weighted = double(stop_fa) + policy.arabic_stopword_weight * double(stop_ar);
        s.stopword_frac = std::min(1.0, weighted / double(s.word_count));
    }
    s.oov_frac = ratio(oov, s.word_count);

    std::size_t short_lines = 0;
    for (auto line : text::lines(std::u32string_view(cps))) {
        if (text::trim(line).empty()) continue;
        ++s.line_count;
        if (text::word_count(line) < policy.short_line_words) ++short_lines;
    }
    s.short_line_frac = ratio(short_lines, s.line_count);
    return s;
}

FilterDecision evaluate_web(const DocStats& s, const FilterPolicy& p) {
    using D = FilterDecision;
    if (p.min_words && s.word_count < *p.min_words) {
        return D::drop(DropReason::TooShort, double(s.word_count), double(*p.min_words));
    }
    if (p.max_nonpersian_char_frac && s.nonpersian_char_ratio > *p.max_nonpersian_char_frac) {
        return D::drop(DropReason::NonPersianMajority, s.nonpersian_char_ratio, *p.max_nonpersian_char_frac);
    }
    if (p.max_word_repetition_frac && s.max_word_repetition_frac > *p.max_word_repetition_frac) {
        return D::drop(DropReason::RepeatedWords, s.max_word_repetition_frac, *p.max_word_repetition_frac);
    }
    if (p.max_short_line_frac && s.short_line_frac > *p.max_short_line_frac) {
        return D::drop(DropReason::ShortLineMajority, s.short_line_frac, *p.max_short_line_frac);
    }
    if (p.min_stopword_frac && s.stopword_frac < *p.min_stopword_frac) {
        return D::drop(DropReason::StopwordDeficit, s.stopword_frac, *p.min_stopword_frac);
    }
    if (p.max_oov_frac && s.oov_frac > *p.max_oov_frac) {
        return D::drop(DropReason::OovExcess, s.oov_frac, *p.max_oov_frac);
    }
    return D::keep();
}

FilterDecision evaluate_book(const DocStats& s, const FilterPolicy& p) {
    using D = FilterDecision;
    if (p.min_words && s.word_count < *p.min_words) {
        return D::drop(DropReason::TooShort, double(s.word_count), double(*p.min_words));
    }
    if (p.min_persian_char_frac && s.persian_char_ratio < *p.min_persian_char_frac) {
        return D::drop(DropReason::NonPersianMajority, s.persian_char_ratio, *p.min_persian_char_frac);
    }
    if (p.min_avg_word_len && s.avg_word_len < *p.min_avg_word_len) {
        return D::drop(DropReason::AvgWordLengthOutOfRange, s.avg_word_len, *p.min_avg_word_len);
    }
    if (p.max_avg_word_len && s.avg_word_len > *p.max_avg_word_len) {
        return D::drop(DropReason::AvgWordLengthOutOfRange, s.avg_word_len, *p.max_avg_word_len);
    }
    if (p.max_numeric_symbolic_frac && s.numeric_symbolic_char_ratio > *p.max_numeric_symbolic_frac) {
        return D::drop(DropReason::NumericSymbolicExcess, s.numeric_symbolic_char_ratio, *p.max_numeric_symbolic_frac);
    }
    if (p.max_short_line_frac && s.short_line_frac > *p.max_short_line_frac) {
        return D::drop(DropReason::ShortLineMajority, s.short_line_frac, *p.max_short_line_frac);
    }
    if (p.min_stopword_frac && s.stopword_frac < *p.min_stopword_frac) {
        return D::drop(DropReason::StopwordDeficit, s.stopword_frac, *p.min_stopword_frac);
    }
    return D::keep();
}

FilterDecision evaluate_ocr(const Document& /*doc*/, const DocStats& s, const FilterPolicy& p) {
    using D = FilterDecision;
    if (p.max_oov_frac && s.oov_frac > *p.max_oov_frac) {
        return D::drop(DropReason::OcrOovExcess, s.oov_frac, *p.max_oov_frac);
    }
    if (p.max_long_words && s.long_word_count > *p.max_long_words) {
        return D::drop(DropReason::OcrMergedWords, double(s.long_word_count), double(*p.max_long_words));
    }
    return D::keep();
}

FilterDecision evaluate_social(const Document& doc, const FilterPolicy& p) {
    const std::size_t n = text::word_count(std::string_view(doc.text));
    if (p.min_words && n < *p.min_words) {
        return FilterDecision::drop(DropReason::ShortReply, double(n), double(*p.min_words));
    }
    return FilterDecision::keep();
}

}  // namespace refinery::docfilter
