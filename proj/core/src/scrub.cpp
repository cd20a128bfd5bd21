#include "refinery/scrub.hpp"

#include <numeric>
#include <set>

#include "refinery/bundled.hpp"
#include "refinery/charnorm.hpp"
#include "refinery/error.hpp"
#include "refinery/text.hpp"
#include "refinery/utf8.hpp"

namespace refinery::scrub {

namespace {

constexpr std::size_t kMaxPasses = 8;
constexpr auto kRegexFlags = std::regex::ECMAScript | std::regex::optimize;

using Lines = std::vector<std::wstring>;

Lines split(std::wstring_view s) {
    Lines out;
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t end = s.find(L'\n', start);
        if (end == std::wstring_view::npos) end = s.size();
        out.emplace_back(s.substr(start, end - start));
        start = end + 1;
    }
    return out;
}

std::wstring join(const Lines& lines) {
    std::wstring out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i > 0) out.push_back(L'\n');
        out += lines[i];
    }
    return out;
}

Lines renormalize(const Lines& lines) {
    const std::wstring joined = join(lines);
    const std::u32string cps(joined.begin(), joined.end());
    const std::u32string norm = charnorm::normalize_whitespace(cps, 0);
    return split(std::wstring(norm.begin(), norm.end()));
}

std::wstring_view trim_wide(std::wstring_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && text::is_space(static_cast<char32_t>(s[b]))) ++b;
    while (e > b && text::is_space(static_cast<char32_t>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::wregex compile_pattern(const std::string& owner, const std::string& pattern, Scope scope) {
    std::wstring p = utf8::to_wide(pattern);
    switch (scope) {
        case Scope::Anywhere:
            break;
        case Scope::LineStart:
            p = L"^(?:" + p + L")";
            break;
        case Scope::LineEnd:
            p = L"(?:" + p + L")$";
            break;
        case Scope::DocumentTail:
            p = L"^(?:" + p + L")$";
            break;
    }
    try {
        return std::wregex(p, kRegexFlags);
    } catch (const std::regex_error& e) {
        throw ConfigError("rule '" + owner + "': pattern does not compile: " + e.what());
    }
}

Scope parse_scope(std::string_view s) {
    if (s == "anywhere") return Scope::Anywhere;
    if (s == "line_start") return Scope::LineStart;
    if (s == "line_end") return Scope::LineEnd;
    if (s == "document_tail") return Scope::DocumentTail;
    throw ConfigError("unknown scope '" + std::string(s) + "'");
}

Action parse_action(std::string_view s) {
    if (s == "delete_match") return Action::DeleteMatch;
    if (s == "delete_line") return Action::DeleteLine;
    throw ConfigError("unknown action '" + std::string(s) + "'");
}

const std::vector<std::string>& bundled_set_names() {
    static const std::vector<std::string> names = {"rules_web", "rules_books", "rules_social",
                                                   "rules_ocr", "rules_pii",   "rules_page"};
    return names;
}

}  // namespace

// Rule application; a struct so it can reach the compiled regexes.
struct Engine {
    // Applies one rule to the lines in place; returns the number of removals.
    static std::size_t apply(const Rule& rule, const std::wregex& re, Lines& lines) {
        std::size_t count = 0;
        if (rule.scope == Scope::DocumentTail) {
            if (rule.action == Action::DeleteLine) {
                while (!lines.empty()) {
                    const std::wstring_view t = trim_wide(lines.back());
                    if (t.empty()) {
                        lines.pop_back();
                        continue;
                    }
                    if (!std::regex_match(t.begin(), t.end(), re)) break;
                    lines.pop_back();
                    ++count;
                }
                return count;
            }
            // delete_match: strip a match that ends the last non-blank line.
            for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
                const std::wstring_view t = trim_wide(*it);
                if (t.empty()) continue;
                std::wstring_view candidate = t;
                for (std::size_t start = 0; start < t.size(); ++start) {
                    candidate = t.substr(start);
                    if (std::regex_match(candidate.begin(), candidate.end(), re)) {
                        *it = std::wstring(t.substr(0, start));
                        return 1;
                    }
                }
                return 0;
            }
            return 0;
        }

        if (rule.action == Action::DeleteLine) {
            Lines kept;
            kept.reserve(lines.size());
            for (std::wstring& line : lines) {
                if (std::regex_search(line, re)) {
                    ++count;
                } else {
                    kept.push_back(std::move(line));
                }
            }
            lines = std::move(kept);
            return count;
        }

        for (std::wstring& line : lines) {
            std::size_t here = 0;
            for (auto it = std::wsregex_iterator(line.begin(), line.end(), re); it != std::wsregex_iterator(); ++it) {
                if (it->length(0) > 0) ++here;
            }
            if (here > 0) {
                line = std::regex_replace(line, re, L"");
                count += here;
            }
        }
        return count;
    }

    static Outcome run(std::string_view input, const RuleSet& set) {
        Outcome out;
        for (const Rule& r : set.rules_) out.removals[r.name] = 0;

        Lines lines = split(utf8::to_wide(input));
        for (std::size_t pass = 0; pass < kMaxPasses; ++pass) {
            std::size_t removed_this_pass = 0;
            for (std::size_t i = 0; i < set.rules_.size(); ++i) {
                const std::size_t n = apply(set.rules_[i], set.compiled_[i], lines);
                if (n == 0) continue;
                out.removals[set.rules_[i].name] += n;
                removed_this_pass += n;
                lines = renormalize(lines);
            }
            if (removed_this_pass == 0) break;
        }
        out.text = out.total() == 0 ? std::string(input) : utf8::from_wide(join(lines));
        return out;
    }

    static std::optional<std::size_t> first_marker_line(const Lines& lines, const MarkerList& markers) {
        for (std::size_t i = 0; i < lines.size(); ++i) {
            for (const std::wregex& re : markers.compiled_) {
                if (std::regex_search(lines[i], re)) return i;
            }
        }
        return std::nullopt;
    }
};

std::string_view to_string(Action a) { return a == Action::DeleteMatch ? "delete_match" : "delete_line"; }

std::string_view to_string(Scope s) {
    switch (s) {
        case Scope::Anywhere:
            return "anywhere";
        case Scope::LineStart:
            return "line_start";
        case Scope::LineEnd:
            return "line_end";
        case Scope::DocumentTail:
            return "document_tail";
    }
    return "anywhere";
}

std::size_t Outcome::total() const {
    return std::accumulate(removals.begin(), removals.end(), std::size_t{0},
                           [](std::size_t acc, const auto& kv) { return acc + kv.second; });
}

RuleSet RuleSet::compile(std::string name, std::vector<Rule> rules) {
    RuleSet set;
    set.name_ = std::move(name);
    std::set<std::string> names;
    for (const Rule& r : rules) {
        if (r.name.empty()) throw ConfigError("rule set '" + set.name_ + "': rule with empty name");
        if (!names.insert(r.name).second) {
            throw ConfigError("rule set '" + set.name_ + "': duplicate rule name '" + r.name + "'");
        }
        if (r.pattern.empty()) throw ConfigError("rule '" + r.name + "': empty pattern");
        std::wregex re = compile_pattern(r.name, r.pattern, r.scope);
        if (std::regex_match(std::wstring(), re)) {
            throw ConfigError("rule '" + r.name + "': pattern matches the empty string");
        }
        set.compiled_.push_back(std::move(re));
    }
    set.rules_ = std::move(rules);
    return set;
}

RuleSet RuleSet::parse(std::string name, std::string_view content) {
    std::vector<Rule> rules;
    std::size_t line_no = 0;
    for (std::string_view line : text::lines(content)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (text::trim(line).empty() || text::trim(line).front() == '#') continue;
        std::vector<std::string_view> fields;
        std::size_t start = 0;
        for (int k = 0; k < 3; ++k) {
            const std::size_t tab = line.find('\t', start);
            if (tab == std::string_view::npos) break;
            fields.push_back(line.substr(start, tab - start));
            start = tab + 1;
        }
        if (fields.size() != 3) {
            throw ConfigError(name + " line " + std::to_string(line_no) +
                              ": expected name<TAB>scope<TAB>action<TAB>pattern");
        }
        try {
            rules.push_back(Rule{std::string(text::trim(fields[0])), std::string(line.substr(start)),
                                 parse_action(text::trim(fields[2])), parse_scope(text::trim(fields[1]))});
        } catch (const ConfigError& e) {
            throw ConfigError(name + " line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return compile(std::move(name), std::move(rules));
}

Outcome scrub(std::string_view text, const RuleSet& rules) { return Engine::run(text, rules); }

const RuleSet& bundled(std::string_view name) {
    static const std::map<std::string, RuleSet, std::less<>> sets = [] {
        std::map<std::string, RuleSet, std::less<>> m;
        for (const std::string& n : bundled_set_names()) {
            auto content = bundled::file("rules/" + n + ".tsv");
            if (!content) throw ConfigError("missing bundled rule file for " + n);
            m.emplace(n, RuleSet::parse(n, *content));
        }
        return m;
    }();
    auto it = sets.find(name);
    if (it == sets.end()) throw ConfigError("unknown rule set '" + std::string(name) + "'");
    return it->second;
}

std::vector<std::string> bundled_names() { return bundled_set_names(); }

Outcome scrub_pii(std::string_view text) { return scrub(text, bundled("rules_pii")); }
Outcome scrub_pii(std::string_view text, const RuleSet& pii_rules) { return scrub(text, pii_rules); }

Outcome scrub_page_artifacts(std::string_view text, std::optional<std::string_view> title) {
    return scrub_page_artifacts(text, title, bundled("rules_page"));
}

Outcome scrub_page_artifacts(std::string_view input, std::optional<std::string_view> title,
                             const RuleSet& page_rules) {
    Outcome out = scrub(input, page_rules);
    const std::string_view wanted = title ? text::trim(*title) : std::string_view{};
    if (wanted.empty()) return out;

    std::size_t removed = 0;
    std::string kept;
    for (std::string_view line : text::lines(std::string_view(out.text))) {
        if (text::trim(line) == wanted) {
            ++removed;
            continue;
        }
        if (!kept.empty()) kept.push_back('\n');
        kept += line;
    }
    out.removals["title_line"] = removed;
    if (removed > 0) out.text = charnorm::normalize_whitespace(kept, 0);
    return out;
}

Outcome scrub_social(std::string_view text) { return scrub(text, bundled("rules_social")); }
Outcome scrub_social(std::string_view text, const RuleSet& social_rules) { return scrub(text, social_rules); }

MarkerList MarkerList::compile(std::vector<std::string> patterns) {
    if (patterns.empty()) throw ConfigError("front-matter marker list is empty");
    MarkerList list;
    for (const std::string& p : patterns) list.compiled_.push_back(compile_pattern("front_matter", p, Scope::Anywhere));
    list.patterns_ = std::move(patterns);
    return list;
}

MarkerList MarkerList::parse(std::string_view content) {
    std::vector<std::string> patterns;
    for (std::string_view line : text::lines(content)) {
        line = text::trim(line);
        if (line.empty() || line.front() == '#') continue;
        patterns.emplace_back(line);
    }
    return compile(std::move(patterns));
}

const MarkerList& MarkerList::bundled() {
    static const MarkerList list = [] {
        auto content = bundled::file("rules/front_matter.txt");
        if (!content) throw ConfigError("missing bundled front-matter markers");
        return MarkerList::parse(*content);
    }();
    return list;
}

FrontMatterResult trim_front_matter(std::string_view input, const MarkerList& markers) {
    const Lines lines = split(utf8::to_wide(input));
    const auto first = Engine::first_marker_line(lines, markers);
    if (!first) return {std::string(input), true};
    if (*first == 0) return {std::string(input), false};
    // Byte offset of the marker line in the original text.
    std::size_t offset = 0;
    std::size_t seen = 0;
    while (seen < *first) {
        offset = input.find('\n', offset) + 1;
        ++seen;
    }
    return {std::string(input.substr(offset)), false};
}

}  // namespace refinery::scrub
