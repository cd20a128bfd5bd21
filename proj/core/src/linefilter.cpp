#include "refinery/linefilter.hpp"

#include <algorithm>
#include <cstring>
#include <regex>
#include <unordered_map>

#include "refinery/error.hpp"
#include "refinery/text.hpp"
#include "refinery/utf8.hpp"

namespace refinery::linefilter {

namespace {

const std::regex& markup_regex() {
    static const std::regex re(
        R"(</?[A-Za-z][A-Za-z0-9:\-]*(\s[^<>]*)?/?\s*>)"
        R"(|<!--|-->)"
        R"(|\bfunction\b\s*[\w$]*\s*\([^)]*\)\s*\{)"
        R"(|\b(var|let|const)\s+[A-Za-z_$][\w$]*\s*=)"
        R"(|\b(document|window)\.[A-Za-z_])"
        R"(|\$\(|\bjQuery\s*\()"
        R"(|\b(addEventListener|getElementById|querySelector|querySelectorAll|console\.log|setTimeout|innerHTML)\b)"
        R"(|=>\s*\{)"
        R"(|^\s*[{}]\s*\)?\s*;?\s*$)"
        R"(|^\s*[\w$.]+\s*\(.*\)\s*;\s*$)",
        std::regex::ECMAScript | std::regex::optimize);
    return re;
}

std::string join(const std::vector<std::string_view>& lines) {
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i > 0) out.push_back('\n');
        out += lines[i];
    }
    return out;
}

// Keeps lines for which `keep(index, line)` holds; returns the input unchanged when all are kept.
template <typename Pred>
std::string filter_lines(std::string_view text, Pred keep) {
    const auto lines = text::lines(text);
    std::vector<std::string_view> kept;
    kept.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (keep(i, lines[i])) kept.push_back(lines[i]);
    }
    if (kept.size() == lines.size()) return std::string(text);
    return join(kept);
}

}  // namespace

LineFilterPolicy LineFilterPolicy::web() {
    LineFilterPolicy p;
    p.leading_short_lines.enabled = true;
    return p;
}

LineFilterPolicy LineFilterPolicy::books() {
    LineFilterPolicy p;
    p.special_ratio_enabled = false;
    p.numeric_symbolic_enabled = true;
    return p;
}

std::vector<std::string> LineFilterPolicy::violations() const {
    std::vector<std::string> out;
    const auto fraction = [&](double v, const char* name) {
        if (!(v >= 0.0 && v <= 1.0)) out.push_back(std::string(name) + " must be in [0,1]");
    };
    fraction(special_ratio_max, "special_ratio_max");
    fraction(numeric_ratio_max, "numeric_ratio_max");
    fraction(symbolic_ratio_max, "symbolic_ratio_max");
    if (repeat_line_min < 2) out.emplace_back("repeat_line_min must be at least 2");
    if (leading_short_lines.min_words < 1) out.emplace_back("leading_short_lines.min_words must be at least 1");
    if (leading_short_lines.window < 1) out.emplace_back("leading_short_lines.window must be at least 1");
    return out;
}

LineRatios line_ratios(std::string_view line) {
    LineRatios r;
    for (char32_t cp : utf8::decode(line)) {
        switch (text::classify(cp)) {
            case text::CharClass::Space:
            case text::CharClass::Newline:
                continue;
            case text::CharClass::Letter:
                ++r.letters;
                break;
            case text::CharClass::Digit:
                ++r.digits;
                break;
            case text::CharClass::Symbol:
                ++r.symbols;
                break;
        }
        ++r.non_space;
    }
    return r;
}

bool is_markup_line(std::string_view line) {
    // Cheap reject: every pattern needs an ASCII letter or one of these characters.
    const bool candidate = std::any_of(line.begin(), line.end(), [](char c) {
        return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c != 0 && std::strchr("<>{}();=$", c) != nullptr);
    });
    if (!candidate) return false;
    return std::regex_search(line.begin(), line.end(), markup_regex());
}

std::string strip_markup(std::string_view text) {
    const auto lines = text::lines(text);
    bool any = false;
    std::vector<std::string_view> out;
    out.reserve(lines.size());
    for (std::string_view line : lines) {
        if (is_markup_line(line)) {
            out.emplace_back();
            any = true;
        } else {
            out.push_back(line);
        }
    }
    return any ? join(out) : std::string(text);
}

std::string drop_ratio_lines(std::string_view text, const LineFilterPolicy& policy) {
    return filter_lines(text, [&](std::size_t, std::string_view line) {
        const LineRatios r = line_ratios(line);
        if (policy.special_ratio_enabled && r.special() > policy.special_ratio_max) return false;
        if (policy.numeric_symbolic_enabled &&
            (r.numeric() > policy.numeric_ratio_max || r.symbolic() > policy.symbolic_ratio_max)) {
            return false;
        }
        return true;
    });
}

std::string drop_repeated_lines(std::string_view text, std::size_t min_repeats) {
    if (min_repeats < 2) throw ConfigError("min_repeats must be at least 2");
    constexpr std::size_t kMinChars = 3;
    const auto counted = [](std::string_view trimmed) { return utf8::decode(trimmed).size() >= kMinChars; };

    std::unordered_map<std::string_view, std::size_t> counts;
    for (std::string_view line : text::lines(text)) {
        const std::string_view t = text::trim(line);
        if (counted(t)) ++counts[t];
    }
    return filter_lines(text, [&](std::size_t, std::string_view line) {
        const std::string_view t = text::trim(line);
        auto it = counts.find(t);
        return it == counts.end() || it->second < min_repeats;
    });
}

std::string drop_leading_short_lines(std::string_view text, const LineFilterPolicy& policy) {
    const LeadingShortLines& cfg = policy.leading_short_lines;
    if (!cfg.enabled) return std::string(text);
    return filter_lines(text, [&](std::size_t index, std::string_view line) {
        if (index >= cfg.window) return true;
        return text::word_count(line) >= cfg.min_words;
    });
}

std::string collapse_blank_runs(std::string_view text) {
    return filter_lines(text, [](std::size_t, std::string_view line) { return !text::trim(line).empty(); });
}

}  // namespace refinery::linefilter
