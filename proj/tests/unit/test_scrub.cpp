#include <doctest.h>

#include <cstdio>
#include <string>
#include <vector>

#include "refinery/error.hpp"
#include "refinery/scrub.hpp"
#include "synth.hpp"

using refinery::ConfigError;
using namespace refinery::scrub;
namespace synth = refinery::synth;

namespace {

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

// IBAN check: move the first four characters to the end, letters to 10..35, mod 97 == 1.
bool iban_valid(const std::string& iban) {
    const std::string moved = iban.substr(4) + iban.substr(0, 4);
    int rem = 0;
    for (char c : moved) {
        if (c >= '0' && c <= '9') {
            rem = (rem * 10 + (c - '0')) % 97;
        } else {
            const int v = c - 'A' + 10;
            rem = (rem * 100 + v) % 97;
        }
    }
    return rem == 1;
}

std::string digits(synth::Rng& rng, int n) {
    std::uniform_int_distribution<int> d(0, 9);
    std::string s;
    for (int i = 0; i < n; ++i) s.push_back(char('0' + d(rng)));
    return s;
}

}  // namespace

TEST_CASE("empty rule set is the identity") {
    const auto rules = RuleSet::compile("none", {});
    const auto out = refinery::scrub::scrub("هر متنی\nبا دو خط  ", rules);
    CHECK(out.text == "هر متنی\nبا دو خط  ");
    CHECK(out.total() == 0);
}

TEST_CASE("UNKNOWN placeholders are counted") {
    const auto out = refinery::scrub::scrub("متن UNKNOWN اول UNKNOWN\nخط UNKNOWN دوم", bundled("rules_books"));
    CHECK(out.removals.at("unknown_token") == 3);
    CHECK(out.text == "متن اول\nخط دوم");
}

TEST_CASE("rule compilation errors") {
    CHECK_THROWS_AS(RuleSet::compile("x", {Rule{"a", "(", Action::DeleteMatch, Scope::Anywhere}}), ConfigError);
    CHECK_THROWS_AS(RuleSet::compile("x", {Rule{"a", "b*", Action::DeleteMatch, Scope::Anywhere}}), ConfigError);
    CHECK_THROWS_AS(RuleSet::compile("x", {Rule{"a", "b", Action::DeleteMatch, Scope::Anywhere},
                                           Rule{"a", "c", Action::DeleteMatch, Scope::Anywhere}}),
                    ConfigError);
    CHECK_THROWS_AS(RuleSet::parse("x", "a\tsomewhere\tdelete_match\tb\n"), ConfigError);
    CHECK_THROWS_AS(RuleSet::parse("x", "a\tanywhere\tdelete_match\n"), ConfigError);
    CHECK_THROWS_AS(bundled("rules_nope"), ConfigError);
    for (const auto& name : bundled_names()) CHECK_FALSE(bundled(name).empty());
}

TEST_CASE("overlapping rules agree with one-rule-at-a-time application") {
    const std::vector<Rule> rules = {
        {"long", "abc[0-9]+", Action::DeleteMatch, Scope::Anywhere},
        {"short", "c[0-9]", Action::DeleteMatch, Scope::Anywhere},
        {"tail", "xyz$", Action::DeleteMatch, Scope::LineEnd},
    };
    const auto all = RuleSet::compile("all", rules);
    synth::Rng rng(5);
    std::uniform_int_distribution<int> pick(0, 5);
    const char* parts[] = {"abc12 ", "c3 ", "ab ", "xyz", "متن ", "abc"};
    for (int i = 0; i < 300; ++i) {
        std::string text;
        for (int k = 0; k < 8; ++k) text += parts[pick(rng)];
        // Oracle: each single-rule set in declaration order, until nothing changes.
        std::string oracle = text;
        for (int pass = 0; pass < 8; ++pass) {
            std::size_t n = 0;
            for (const Rule& r : rules) {
                auto o = refinery::scrub::scrub(oracle, RuleSet::compile("one", {r}));
                n += o.total();
                oracle = o.text;
            }
            if (n == 0) break;
        }
        CHECK(refinery::scrub::scrub(text, all).text == oracle);
    }
    // The earlier rule claims its span first.
    const auto o = refinery::scrub::scrub("abc12", all);
    CHECK(o.removals.at("long") == 1);
    CHECK(o.removals.at("short") == 0);
}

TEST_CASE("pii examples") {
    auto out = scrub_pii("تماس: ali@example.com");
    CHECK(out.text == "تماس:");
    CHECK(out.removals.at("email") == 1);

    const std::string shaba = "IR062960000000100324200001";
    REQUIRE(shaba.size() == 26);
    CHECK(iban_valid(shaba));
    out = scrub_pii("شماره شبا " + shaba + " است");
    CHECK(out.text == "شماره شبا است");
    CHECK(out.removals.at("shaba") == 1);

    CHECK(scrub_pii("شماره: IR06 2960 0000 0010 0324 2000 01").text == "شماره:");
    CHECK(scrub_pii("کارت ۶۰۳۷-۹۹۷۵-۱۲۳۴-۵۶۷۸ بانک").text == "کارت بانک");
    CHECK(scrub_pii("همراه ۰۹۱۲ ۳۴۵ ۶۷۸۹ تماس").text == "همراه تماس");
    CHECK(scrub_pii("تلفن +98 912 345 6789").text == "تلفن");
    CHECK(scrub_pii("دفتر 021-88776655").text == "دفتر");

    const std::string clean = "این یک بند فارسی بدون هیچ اطلاعات شخصی است.\nسال ۱۴۰۲ سال خوبی بود.";
    out = scrub_pii(clean);
    CHECK(out.text == clean);
    CHECK(out.total() == 0);
}

TEST_CASE("pii recall on a planted fixture and silence on a control fixture") {
    synth::Rng rng(77);
    std::uniform_int_distribution<int> kind(0, 4);
    std::vector<std::string> planted;
    std::size_t removed = 0;
    for (int i = 0; i < 200; ++i) {
        std::string token;
        switch (kind(rng)) {
            case 0: token = "user" + digits(rng, 3) + "@mail" + digits(rng, 2) + ".ir"; break;
            case 1: token = "09" + digits(rng, 9); break;
            case 2: token = "+98 9" + digits(rng, 2) + " " + digits(rng, 3) + " " + digits(rng, 4); break;
            case 3: token = digits(rng, 4) + "-" + digits(rng, 4) + "-" + digits(rng, 4) + "-" + digits(rng, 4); break;
            default: token = "IR" + digits(rng, 24); break;
        }
        const std::string text = synth::sentence(rng, 6) + " " + token + " " + synth::sentence(rng, 6);
        const auto out = scrub_pii(text);
        removed += out.total();
        CHECK_MESSAGE(!contains(out.text, token), token);
        planted.push_back(token);
    }
    CHECK(removed == planted.size());

    for (int i = 0; i < 200; ++i) {
        const std::string text = synth::paragraph(rng, 3, 12);
        const auto out = scrub_pii(text);
        CHECK(out.total() == 0);
        CHECK(out.text == text);
    }
}

TEST_CASE("page artifacts") {
    auto out = scrub_page_artifacts("متن اول\nصفحه ۱ از ۲۰۰\nمتن دوم", std::nullopt);
    CHECK(out.text == "متن اول\nمتن دوم");
    CHECK(out.removals.at("page_number") == 1);

    out = scrub_page_artifacts("بند\nYour browser does not support the audio tag.\nبند دیگر", std::nullopt);
    CHECK(out.text == "بند\nبند دیگر");

    for (const char* line : {"ص ۱۲", "صفحه: 45", "- 17 -", "Page 3 of 10", "روی جلد", "منبع: https://example.com/a"}) {
        CHECK_MESSAGE(scrub_page_artifacts(std::string("الف\n") + line + "\nب", std::nullopt).text == "الف\nب", line);
    }

    const std::string body = "در این صفحه از کتاب به موضوع تازه‌ای می‌پردازیم";
    out = scrub_page_artifacts(body, std::nullopt);
    CHECK(out.text == body);
    CHECK(out.total() == 0);

    out = scrub_page_artifacts("تاریخ ایران\nبند یک\nتاریخ ایران\nبند دو", std::string("تاریخ ایران"));
    CHECK(out.text == "بند یک\nبند دو");
    CHECK(out.removals.at("title_line") == 2);
}

TEST_CASE("social noise") {
    auto out = scrub_social("دلار امروز گران شد\n#قیمت #دلار");
    CHECK(out.text == "دلار امروز گران شد");
    CHECK(out.removals.at("trailing_hashtags") == 1);

    out = scrub_social("امروز #تهران شلوغ بود");
    CHECK(out.text == "امروز #تهران شلوغ بود");
    CHECK(out.total() == 0);

    CHECK(scrub_social("عضو شوید @mychannel https://t.me/mychannel").text == "عضو شوید");
    CHECK(scrub_social("خبر\n#یک\n\n#دو #سه\n").text == "خبر");
    CHECK(scrub_social("ایمیل a@b.com").text == "ایمیل a@b.com");
}

TEST_CASE("bundled rule sets are idempotent") {
    synth::Rng rng(3);
    const std::vector<std::string> noise = {
        "UNKNOWN", "[image]", "&nbsp;", "[caption id=1]", "{{cite}}", "https://x.ir/a", "@chan_news",
        "#خبر",    "ali@x.com", "09121234567", "صفحه ۳", "--- *** ---", ".color: red; }", "Share on Telegram"};
    std::uniform_int_distribution<std::size_t> pick(0, noise.size() - 1);
    std::bernoulli_distribution newline(0.3);
    for (int i = 0; i < 400; ++i) {
        std::string text;
        for (int k = 0; k < 12; ++k) {
            text += k % 2 ? noise[pick(rng)] : synth::sentence(rng, 3);
            text += newline(rng) ? "\n" : " ";
        }
        for (const auto& name : bundled_names()) {
            const auto& set = bundled(name);
            const std::string once = refinery::scrub::scrub(text, set).text;
            const auto twice = refinery::scrub::scrub(once, set);
            CHECK_MESSAGE(twice.text == once, name);
            CHECK(twice.total() == 0);
        }
    }
}

TEST_CASE("front matter trimming") {
    const auto& markers = MarkerList::bundled();
    auto r = trim_front_matter("ﺍﺏ؟؟ ۱۲ سربرگ خراب\nنام مجله\nکلیدواژه‌ها: زبان، متن\nبدنه مقاله", markers);
    CHECK(r.text == "کلیدواژه‌ها: زبان، متن\nبدنه مقاله");
    CHECK_FALSE(r.no_marker);

    r = trim_front_matter("بدون نشانه\nمتن", markers);
    CHECK(r.text == "بدون نشانه\nمتن");
    CHECK(r.no_marker);

    r = trim_front_matter("چکیده\nمتن", markers);
    CHECK(r.text == "چکیده\nمتن");
    CHECK_FALSE(r.no_marker);

    CHECK_THROWS_AS(MarkerList::compile({}), ConfigError);
    CHECK_THROWS_AS(MarkerList::parse("# only a comment\n"), ConfigError);
}
