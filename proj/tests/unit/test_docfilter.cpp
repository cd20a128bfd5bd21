#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "refinery/docfilter.hpp"
#include "refinery/error.hpp"
#include "refinery/utf8.hpp"
#include "synth.hpp"

using namespace refinery;
using namespace refinery::docfilter;

namespace {

std::string words_of(const std::string& w, int n) {
    std::string out;
    for (int i = 0; i < n; ++i) out += (i ? " " : "") + w;
    return out;
}

DocStats passing_web() {
    DocStats s;
    s.word_count = 100;
    s.nonpersian_char_ratio = 0.1;
    s.max_word_repetition_frac = 0.1;
    s.short_line_frac = 0.2;
    s.stopword_frac = 0.3;
    return s;
}

DocStats passing_book() {
    DocStats s;
    s.word_count = 500;
    s.persian_char_ratio = 0.9;
    s.avg_word_len = 5;
    s.numeric_symbolic_char_ratio = 0.1;
    s.short_line_frac = 0.2;
    s.stopword_frac = 0.3;
    return s;
}

bool persian_range(char32_t cp) {
    return (cp >= 0x0600 && cp <= 0x06FF) || (cp >= 0x0750 && cp <= 0x077F) || (cp >= 0xFB50 && cp <= 0xFDFF) ||
           (cp >= 0xFE70 && cp <= 0xFEFF) || cp == 0x200C;
}

// Reference statistics for documents built only from the token pools below.
struct Oracle {
    std::size_t words = 0, stop = 0, most = 0, lines = 0, short_lines = 0;
    std::size_t non_space = 0, persian = 0;
};

Oracle oracle(const std::vector<std::vector<std::string>>& doc_lines, const std::vector<bool>& is_word,
              const std::map<std::string, bool>& stop, const std::vector<std::string>& pool) {
    Oracle o;
    std::map<std::string, std::size_t> freq;
    for (const auto& line : doc_lines) {
        std::size_t lw = 0;
        for (const auto& tok : line) {
            const auto idx = std::size_t(std::find(pool.begin(), pool.end(), tok) - pool.begin());
            for (char32_t cp : utf8::decode(tok)) {
                ++o.non_space;
                if (persian_range(cp)) ++o.persian;
            }
            if (!is_word[idx]) continue;
            ++lw;
            ++o.words;
            if (stop.at(tok)) ++o.stop;
            o.most = std::max(o.most, ++freq[tok]);
        }
        if (!line.empty()) {
            ++o.lines;
            if (lw < 15) ++o.short_lines;
        }
    }
    return o;
}

}  // namespace

TEST_CASE("word definition") {
    const auto lex = Lexicons::bundled();
    const auto s = compute_stats("سلام دنیا ۱۲۳ !!", lex, FilterPolicy::web());
    CHECK(s.word_count == 2);
    CHECK(s.non_space_chars == 13);

    const auto z = compute_stats("", lex, FilterPolicy::web());
    CHECK(z.word_count == 0);
    CHECK(z.non_space_chars == 0);
    CHECK(z.persian_char_ratio == 0.0);
    CHECK(z.avg_word_len == 0.0);
    CHECK(z.short_line_frac == 0.0);
    CHECK(z.stopword_frac == 0.0);
    CHECK(z.max_word_repetition_frac == 0.0);
}

TEST_CASE("synthetic function words are bundled stopwords") {
    const auto lex = Lexicons::bundled();
    for (const auto& w : synth::function_words()) CHECK_MESSAGE(lex.is_stopword_fa(Lexicons::key(w)), w);
    for (const auto& w : synth::content_words()) CHECK_MESSAGE(!lex.is_stopword_fa(Lexicons::key(w)), w);
    // Variant letters and diacritics fold to the same key.
    CHECK(Lexicons::key("كِتاب") == Lexicons::key("کتاب"));
    CHECK(Lexicons::key("Data") == Lexicons::key("data"));
}

TEST_CASE("stopword fraction on a crafted document") {
    synth::Rng rng(4);
    const auto& fw = synth::function_words();
    const auto& cw = synth::content_words();
    std::vector<std::string> tokens;
    for (int i = 0; i < 40; ++i) tokens.push_back(fw[rng() % fw.size()]);
    for (int i = 0; i < 60; ++i) tokens.push_back(cw[rng() % cw.size()]);
    std::shuffle(tokens.begin(), tokens.end(), rng);
    std::string doc;
    for (std::size_t i = 0; i < tokens.size(); ++i) doc += (i ? " " : "") + tokens[i];

    const auto lex = Lexicons::bundled();
    std::size_t counted = 0;
    for (const auto& t : tokens) counted += std::count(fw.begin(), fw.end(), t) > 0;
    REQUIRE(counted == 40);
    const auto s = compute_stats(doc, lex, FilterPolicy::web());
    CHECK(s.word_count == 100);
    CHECK(s.stopword_frac == doctest::Approx(0.40));
}

TEST_CASE("evaluate_web boundaries") {
    const auto p = FilterPolicy::web();
    auto s = passing_web();
    CHECK(evaluate_web(s, p).kept());
    s.word_count = 29;
    auto d = evaluate_web(s, p);
    CHECK(d.reason() == DropReason::TooShort);
    CHECK(d.value() == 29);
    CHECK(d.threshold() == 30);
    s.word_count = 30;
    CHECK(evaluate_web(s, p).kept());

    const auto lex = Lexicons::bundled();
    const auto rep = compute_stats("کتاب کتاب کتاب کتاب کتاب کتاب دانش علم هنر شعر", lex, p);
    CHECK(rep.max_word_repetition_frac == doctest::Approx(0.6));
    FilterPolicy no_len = p;
    no_len.min_words.reset();
    CHECK(evaluate_web(rep, no_len).reason() == DropReason::RepeatedWords);

    s = passing_web();
    s.nonpersian_char_ratio = 0.5;
    CHECK(evaluate_web(s, p).kept());
    s.nonpersian_char_ratio = std::nextafter(0.5, 1.0);
    CHECK(evaluate_web(s, p).reason() == DropReason::NonPersianMajority);

    s = passing_web();
    s.short_line_frac = 0.5;
    CHECK(evaluate_web(s, p).kept());
    s.short_line_frac = 0.51;
    CHECK(evaluate_web(s, p).reason() == DropReason::ShortLineMajority);

    const auto cx = FilterPolicy::culturax();
    s = passing_web();
    s.oov_frac = 0.03;
    CHECK(evaluate_web(s, cx).reason() == DropReason::OovExcess);
    s.oov_frac = 0.025;
    CHECK(evaluate_web(s, cx).kept());

    // First violation wins.
    s.word_count = 3;
    s.nonpersian_char_ratio = 0.9;
    CHECK(evaluate_web(s, p).reason() == DropReason::TooShort);
}

TEST_CASE("evaluate_book boundaries") {
    const auto p = FilterPolicy::book();
    auto s = passing_book();
    CHECK(evaluate_book(s, p).kept());
    s.word_count = 149;
    CHECK(evaluate_book(s, p).reason() == DropReason::TooShort);
    s.word_count = 150;
    CHECK(evaluate_book(s, p).kept());

    for (double len : {2.5, 11.0}) {
        s = passing_book();
        s.avg_word_len = len;
        CHECK(evaluate_book(s, p).reason() == DropReason::AvgWordLengthOutOfRange);
    }
    for (double len : {3.0, 10.0}) {
        s = passing_book();
        s.avg_word_len = len;
        CHECK(evaluate_book(s, p).kept());
    }

    s = passing_book();
    s.stopword_frac = 0.09;
    CHECK(evaluate_book(s, p).reason() == DropReason::StopwordDeficit);
    s.stopword_frac = 0.10;
    CHECK(evaluate_book(s, p).kept());

    s = passing_book();
    s.persian_char_ratio = 0.49;
    CHECK(evaluate_book(s, p).reason() == DropReason::NonPersianMajority);
    s = passing_book();
    s.numeric_symbolic_char_ratio = 0.81;
    CHECK(evaluate_book(s, p).reason() == DropReason::NumericSymbolicExcess);
    s = passing_book();
    s.short_line_frac = 0.81;
    CHECK(evaluate_book(s, p).reason() == DropReason::ShortLineMajority);
}

TEST_CASE("arabic stopwords count only when the policy says so") {
    Lexicons lex = Lexicons::bundled();
    REQUIRE_FALSE(lex.stopwords_ar.empty());
    const std::string ar = *lex.stopwords_ar.begin();
    REQUIRE_FALSE(lex.is_stopword_fa(ar));
    const std::string doc = ar + " کتاب دانش هنر";
    CHECK(compute_stats(doc, lex, FilterPolicy::web()).stopword_frac == 0.0);
    CHECK(compute_stats(doc, lex, FilterPolicy::wikishia()).stopword_frac == doctest::Approx(0.25));
    FilterPolicy half = FilterPolicy::wikishia();
    half.arabic_stopword_weight = 0.5;
    CHECK(compute_stats(doc, lex, half).stopword_frac == doctest::Approx(0.125));
}

TEST_CASE("evaluate_ocr") {
    Lexicons lex = Lexicons::bundled();
    const auto p = FilterPolicy::ocr();
    CHECK_THROWS_AS(compute_stats("متن", lex, p), ConfigError);

    for (const auto& w : synth::content_words()) lex.vocabulary.insert(Lexicons::key(w));
    const Document doc("p", SourceKind::PaperOcr, "");
    // 100 words, 6 unknown.
    std::string text = words_of("کتاب", 94) + " " + words_of("ققققق", 6);
    auto s = compute_stats(text, lex, p);
    CHECK(s.oov_frac == doctest::Approx(0.06));
    CHECK(evaluate_ocr(doc, s, p).reason() == DropReason::OcrOovExcess);

    const std::string merged = "کتابدانشگاهپژوهشی";  // 17 letters
    REQUIRE(utf8::decode(merged).size() == 17);
    lex.vocabulary.insert(Lexicons::key(merged));
    s = compute_stats(words_of("کتاب", 90) + " " + words_of(merged, 10), lex, p);
    CHECK(s.long_word_count == 10);
    CHECK(evaluate_ocr(doc, s, p).kept());
    s = compute_stats(words_of("کتاب", 89) + " " + words_of(merged, 11), lex, p);
    CHECK(evaluate_ocr(doc, s, p).reason() == DropReason::OcrMergedWords);

    synth::Rng rng(2);
    s = compute_stats(synth::paragraph(rng, 20, 20), lex, p);
    CHECK(s.oov_frac > 0.0);  // function words are not in this vocabulary
    lex.vocabulary.clear();
    for (const auto& w : synth::function_words()) lex.vocabulary.insert(Lexicons::key(w));
    for (const auto& w : synth::content_words()) lex.vocabulary.insert(Lexicons::key(w));
    s = compute_stats(synth::paragraph(rng, 20, 20), lex, p);
    CHECK(evaluate_ocr(doc, s, p).kept());
}

TEST_CASE("evaluate_social") {
    const auto p = FilterPolicy::social();
    CHECK(evaluate_social(Document("a", SourceKind::Social, "ممنون خیلی عالی"), p).reason() == DropReason::ShortReply);
    CHECK(evaluate_social(Document("b", SourceKind::Social, words_of("خبر", 8)), p).kept());
    CHECK(evaluate_social(Document("c", SourceKind::Social, words_of("خبر", 7)), p).dropped());
    synth::Rng rng(1);
    CHECK(evaluate_social(Document("d", SourceKind::Social, synth::paragraph(rng, 4, 20)), p).kept());
}

TEST_CASE("vocabulary calibration") {
    std::vector<std::string> texts = {words_of("کتاب", 5) + " دانش", "دانش دانش", "كتاب"};
    std::vector<std::string_view> views(texts.begin(), texts.end());
    const auto v = build_vocabulary(views, 5);
    CHECK(v.size() == 1);
    CHECK(v.contains(Lexicons::key("کتاب")));
    CHECK(build_vocabulary(views, 3).size() == 2);
}

TEST_CASE("policy presets") {
    for (const auto& p : {FilterPolicy::web(), FilterPolicy::culturax(), FilterPolicy::virgool(),
                          FilterPolicy::wikishia(), FilterPolicy::book(), FilterPolicy::ocr(), FilterPolicy::social()}) {
        CHECK(p.violations().empty());
    }
    CHECK(FilterPolicy::madlad() == FilterPolicy::web());
    CHECK(FilterPolicy::culturax().max_oov_frac == 0.025);
    CHECK(FilterPolicy::book().short_line_words == 4);
    FilterPolicy bad = FilterPolicy::book();
    bad.min_avg_word_len = 12.0;
    bad.min_stopword_frac = -0.1;
    CHECK(bad.violations().size() == 2);
}

TEST_CASE("drop reasons are confirmed by an independent count") {
    const std::vector<std::string> pool = {"و", "در", "به", "که", "کتاب", "دانش", "هنر", "شعر", "سفر",
                                           "data", "model", "۱۲۳", "2024", "!!", "—", "می‌رود"};
    const std::vector<bool> is_word = {true, true, true, true, true, true, true, true, true,
                                       true, true, false, false, false, false, true};
    std::map<std::string, bool> stop;
    for (std::size_t i = 0; i < pool.size(); ++i) stop[pool[i]] = i < 4;

    const auto lex = Lexicons::bundled();
    FilterPolicy p = FilterPolicy::web();
    p.min_stopword_frac = 0.2;
    synth::Rng rng(99);
    std::size_t drops = 0;
    for (int i = 0; i < 2000; ++i) {
        std::vector<std::vector<std::string>> doc;
        const int nlines = 1 + int(rng() % 6);
        const int bias = int(rng() % pool.size());
        for (int l = 0; l < nlines; ++l) {
            std::vector<std::string> line;
            const int n = int(rng() % 25);
            for (int k = 0; k < n; ++k) line.push_back(pool[rng() % 3 == 0 ? bias : rng() % pool.size()]);
            doc.push_back(line);
        }
        std::string text;
        for (std::size_t l = 0; l < doc.size(); ++l) {
            if (l) text += "\n";
            for (std::size_t k = 0; k < doc[l].size(); ++k) text += (k ? " " : "") + doc[l][k];
        }
        const Oracle o = oracle(doc, is_word, stop, pool);
        const auto s = compute_stats(text, lex, p);
        REQUIRE(s.word_count == o.words);
        const auto d = evaluate_web(s, p);
        const double nonpersian = o.non_space ? double(o.non_space - o.persian) / double(o.non_space) : 0.0;
        const double rep = o.words ? double(o.most) / double(o.words) : 0.0;
        const double shortf = o.lines ? double(o.short_lines) / double(o.lines) : 0.0;
        const double stopf = o.words ? double(o.stop) / double(o.words) : 0.0;
        const bool v_short = o.words < 30, v_np = nonpersian > 0.5, v_rep = rep > 0.5, v_sl = shortf > 0.5,
                   v_stop = stopf < 0.2;
        if (!d.reason()) {
            CHECK_FALSE((v_short || v_np || v_rep || v_sl || v_stop));
            continue;
        }
        ++drops;
        switch (*d.reason()) {
            case DropReason::TooShort: CHECK(v_short); break;
            case DropReason::NonPersianMajority: CHECK(v_np); CHECK(d.value() == doctest::Approx(nonpersian)); break;
            case DropReason::RepeatedWords: CHECK(v_rep); CHECK(d.value() == doctest::Approx(rep)); break;
            case DropReason::ShortLineMajority: CHECK(v_sl); CHECK(d.value() == doctest::Approx(shortf)); break;
            case DropReason::StopwordDeficit: CHECK(v_stop); CHECK(d.value() == doctest::Approx(stopf)); break;
            default: FAIL("unexpected reason");
        }
    }
    CHECK(drops > 100);
    CHECK(drops < 2000);
}
