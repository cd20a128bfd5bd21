#include "refinery/charnorm.hpp"

#include <algorithm>
#include <charconv>

#include "refinery/bundled.hpp"
#include "refinery/error.hpp"
#include "refinery/text.hpp"
#include "refinery/utf8.hpp"

namespace refinery::charnorm {

namespace {

// Splits a data file into non-empty, comment-free lines with their 1-based numbers.
std::vector<std::pair<std::size_t, std::string_view>> data_lines(std::string_view text) {
    std::vector<std::pair<std::size_t, std::string_view>> out;
    std::size_t n = 0;
    for (std::string_view line : text::lines(text)) {
        ++n;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = text::trim(line);
        if (!line.empty()) out.emplace_back(n, line);
    }
    return out;
}

char32_t parse_codepoint(std::string_view tok, std::size_t line_no) {
    if (tok.size() < 3 || (tok[0] != 'U' && tok[0] != 'u') || tok[1] != '+') {
        throw ConfigError("line " + std::to_string(line_no) + ": expected U+XXXX, got '" + std::string(tok) + "'");
    }
    std::uint32_t value = 0;
    const char* first = tok.data() + 2;
    const char* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, value, 16);
    if (ec != std::errc{} || ptr != last || value > 0x10FFFF) {
        throw ConfigError("line " + std::to_string(line_no) + ": bad codepoint '" + std::string(tok) + "'");
    }
    return static_cast<char32_t>(value);
}

std::shared_ptr<const CodepointSet> parse_bundled_set(std::string_view name) {
    auto content = bundled::file(name);
    if (!content) throw ConfigError("missing bundled data file " + std::string(name));
    return std::make_shared<const CodepointSet>(CodepointSet::parse(*content));
}

}  // namespace

MappingTable MappingTable::parse(std::string_view content) {
    MappingTable table;
    for (auto [line_no, line] : data_lines(content)) {
        const auto space = line.find_first_of(" \t");
        if (space == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'U+XXXX U+YYYY'");
        }
        const char32_t from = parse_codepoint(line.substr(0, space), line_no);
        const char32_t to = parse_codepoint(text::trim(line.substr(space + 1)), line_no);
        auto it = table.table_.find(from);
        if (it != table.table_.end() && it->second != to) {
            throw ConfigError("line " + std::to_string(line_no) + ": source mapped twice");
        }
        table.table_[from] = to;
    }
    for (const auto& [from, to] : table.table_) {
        if (from != to && table.table_.contains(to)) {
            throw ConfigError("mapping target is also a source; the table must map straight to final forms");
        }
    }
    return table;
}

std::shared_ptr<const MappingTable> MappingTable::bundled() {
    static const auto table = [] {
        auto content = bundled::file("charnorm/mapping.txt");
        if (!content) throw ConfigError("missing bundled mapping table");
        return std::make_shared<const MappingTable>(MappingTable::parse(*content));
    }();
    return table;
}

void MappingTable::add(char32_t from, char32_t to) { table_[from] = to; }

CodepointSet CodepointSet::parse(std::string_view content) {
    CodepointSet set;
    for (auto [line_no, line] : data_lines(content)) {
        if (auto dots = line.find(".."); dots != std::string_view::npos) {
            const char32_t first = parse_codepoint(text::trim(line.substr(0, dots)), line_no);
            const char32_t last = parse_codepoint(text::trim(line.substr(dots + 2)), line_no);
            if (last < first) throw ConfigError("line " + std::to_string(line_no) + ": empty range");
            set.insert(first, last);
        } else {
            set.insert(parse_codepoint(line, line_no));
        }
    }
    return set;
}

std::shared_ptr<const CodepointSet> CodepointSet::bundled() {
    static const auto set = parse_bundled_set("charnorm/blocklist.txt");
    return set;
}

std::shared_ptr<const CodepointSet> CodepointSet::bundled_books() {
    static const auto set = [] {
        CodepointSet merged = *bundled();
        merged.merge(*parse_bundled_set("charnorm/blocklist_books.txt"));
        return std::make_shared<const CodepointSet>(std::move(merged));
    }();
    return set;
}

void CodepointSet::insert(char32_t first, char32_t last) {
    ranges_.emplace_back(first, last);
    std::sort(ranges_.begin(), ranges_.end());
    std::vector<std::pair<char32_t, char32_t>> merged;
    for (const auto& r : ranges_) {
        if (!merged.empty() && r.first <= merged.back().second + 1) {
            merged.back().second = std::max(merged.back().second, r.second);
        } else {
            merged.push_back(r);
        }
    }
    ranges_ = std::move(merged);
}

void CodepointSet::merge(const CodepointSet& other) {
    for (const auto& [first, last] : other.ranges_) insert(first, last);
}

bool CodepointSet::contains(char32_t cp) const {
    auto it = std::upper_bound(ranges_.begin(), ranges_.end(), cp,
                               [](char32_t v, const auto& r) { return v < r.first; });
    if (it == ranges_.begin()) return false;
    --it;
    return cp <= it->second;
}

Options Options::web() { return Options{}; }

Options Options::books() {
    Options o;
    o.keep_irab = true;
    o.blocked = CodepointSet::bundled_books();
    return o;
}

std::vector<std::string> Options::violations() const {
    std::vector<std::string> out;
    if (max_char_run < 1) out.emplace_back("max_char_run must be at least 1");
    if (!mapping) out.emplace_back("mapping table missing");
    if (!blocked) out.emplace_back("blocked codepoint set missing");
    if (preserve_zwnj && blocked && blocked->contains(text::kZwnj)) {
        out.emplace_back("ZWNJ (U+200C) is blocked while preserve_zwnj is set");
    }
    if (preserve_zwnj && mapping && mapping->map(text::kZwnj) != text::kZwnj) {
        out.emplace_back("ZWNJ (U+200C) is remapped while preserve_zwnj is set");
    }
    return out;
}

std::u32string map_to_persian(std::u32string_view in, const Options& opts) {
    std::u32string out;
    out.reserve(in.size());
    for (char32_t cp : in) {
        const char32_t mapped = opts.mapping ? opts.mapping->map(cp) : cp;
        if (!opts.keep_irab && text::is_irab(mapped)) continue;
        out.push_back(mapped);
    }
    return out;
}

std::string map_to_persian(std::string_view in, const Options& opts) {
    return utf8::encode(map_to_persian(utf8::decode(in), opts));
}

std::u32string truncate_repeats(std::u32string_view in, std::size_t max_run,
                                const std::function<bool(char32_t)>& exempt) {
    std::u32string out;
    out.reserve(in.size());
    std::size_t i = 0;
    while (i < in.size()) {
        const char32_t cp = in[i];
        std::size_t j = i;
        while (j < in.size() && in[j] == cp) ++j;
        const std::size_t run = j - i;
        out.append(exempt && exempt(cp) ? run : std::min(run, max_run), cp);
        i = j;
    }
    return out;
}

std::string truncate_repeats(std::string_view in, std::size_t max_run) {
    if (max_run < 1) throw ConfigError("max_run must be at least 1");
    return utf8::encode(truncate_repeats(utf8::decode(in), max_run, nullptr));
}

std::u32string normalize_whitespace(std::u32string_view in, std::size_t max_blank_lines) {
    // Split into lines, folding "\r\n" into one break.
    std::vector<std::u32string> lines(1);
    for (std::size_t i = 0; i < in.size(); ++i) {
        const char32_t cp = in[i];
        if (text::is_newline(cp)) {
            if (cp == U'\r' && i + 1 < in.size() && in[i + 1] == U'\n') ++i;
            lines.emplace_back();
        } else if (text::is_horizontal_space(cp)) {
            if (!lines.back().empty() && lines.back().back() != U' ') lines.back().push_back(U' ');
        } else {
            lines.back().push_back(cp);
        }
    }

    std::u32string out;
    out.reserve(in.size());
    std::size_t pending_blanks = 0;
    bool any = false;
    for (std::u32string& line : lines) {
        if (!line.empty() && line.back() == U' ') line.pop_back();
        if (line.empty()) {
            ++pending_blanks;
            continue;
        }
        if (any) {
            out.push_back(U'\n');
            out.append(std::min(pending_blanks, max_blank_lines), U'\n');
        }
        out += line;
        any = true;
        pending_blanks = 0;
    }
    return out;
}

std::string normalize_whitespace(std::string_view in, std::size_t max_blank_lines) {
    return utf8::encode(normalize_whitespace(utf8::decode(in), max_blank_lines));
}

StripResult strip_nonstandard(std::string_view in, const CodepointSet& blocked) {
    StripResult result;
    std::u32string kept;
    for (char32_t cp : utf8::decode(in)) {
        if (blocked.contains(cp)) {
            ++result.removed;
        } else {
            kept.push_back(cp);
        }
    }
    result.text = result.removed == 0 ? std::string(in) : utf8::encode(kept);
    return result;
}

std::string normalize(std::string_view in, const Options& opts) {
    std::u32string s = map_to_persian(utf8::decode(in), opts);
    if (opts.blocked) std::erase_if(s, [&](char32_t cp) { return opts.blocked->contains(cp); });

    // Whitespace runs are the whitespace step's business; truncating them here
    // would break idempotence when blank lines are preserved.
    const auto exempt = [&](char32_t cp) {
        return text::is_space(cp) || (opts.preserve_zwnj && cp == text::kZwnj) ||
               (!opts.truncate_digit_runs && text::is_digit(cp));
    };
    const std::u32string truncated = truncate_repeats(s, std::max<std::size_t>(opts.max_char_run, 1), exempt);
    return utf8::encode(normalize_whitespace(truncated, opts.max_blank_lines));
}

}  // namespace refinery::charnorm
