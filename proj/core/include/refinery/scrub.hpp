#pragma once

// Pattern-based removal of boilerplate, page artifacts, personal information
// and social-media noise.

#include <cstddef>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

namespace refinery::scrub {

enum class Action { DeleteMatch, DeleteLine };

// Where a pattern may match. Every scope is evaluated line by line; document_tail
// walks lines upward from the end of the text and stops at the first non-matching one.
enum class Scope { Anywhere, LineStart, LineEnd, DocumentTail };

std::string_view to_string(Action a);
std::string_view to_string(Scope s);

struct Rule {
    std::string name;
    std::string pattern;  // ECMAScript regular expression, UTF-8
    Action action = Action::DeleteMatch;
    Scope scope = Scope::Anywhere;
};

/// Ordered, compiled rules. Immutable once built; safe to share across threads.
class RuleSet {
public:
    RuleSet() = default;

    /// Throws ConfigError when a pattern does not compile, matches the empty
    /// string, or when two rules share a name.
    static RuleSet compile(std::string name, std::vector<Rule> rules);

    /// Parses the tab-separated rule-file format (name, scope, action, pattern).
    static RuleSet parse(std::string name, std::string_view content);

    const std::string& name() const noexcept { return name_; }
    const std::vector<Rule>& rules() const noexcept { return rules_; }
    std::size_t size() const noexcept { return rules_.size(); }
    bool empty() const noexcept { return rules_.empty(); }

private:
    friend struct Engine;

    std::string name_;
    std::vector<Rule> rules_;
    std::vector<std::wregex> compiled_;
};

struct Outcome {
    std::string text;
    std::map<std::string, std::size_t> removals;  // rule name -> count

    std::size_t total() const;
};

/// Applies every rule in declaration order. When nothing matches, `text` is a byte
/// copy of the input; otherwise whitespace is re-normalized after each rule that
/// removed something.
Outcome scrub(std::string_view text, const RuleSet& rules);

/// Bundled rule sets by name: rules_web, rules_books, rules_social, rules_ocr,
/// rules_pii, rules_page. Throws ConfigError for other names.
const RuleSet& bundled(std::string_view name);
std::vector<std::string> bundled_names();

/// Emails, Iranian and international phone numbers, card numbers and Shaba (IBAN) numbers.
Outcome scrub_pii(std::string_view text);
Outcome scrub_pii(std::string_view text, const RuleSet& pii_rules);

/// Page-number lines, cover tags, multimedia errors, source links and lines repeating `title`.
Outcome scrub_page_artifacts(std::string_view text, std::optional<std::string_view> title);
Outcome scrub_page_artifacts(std::string_view text, std::optional<std::string_view> title,
                             const RuleSet& page_rules);

/// URLs, @channel identifiers and the trailing hashtag block; in-text hashtags stay.
Outcome scrub_social(std::string_view text);
Outcome scrub_social(std::string_view text, const RuleSet& social_rules);

/// Patterns marking where the usable body of an OCR'd paper starts.
class MarkerList {
public:
    MarkerList() = default;
    /// Throws ConfigError on an empty list or a pattern that does not compile.
    static MarkerList compile(std::vector<std::string> patterns);
    /// One pattern per line, '#' comments.
    static MarkerList parse(std::string_view content);
    static const MarkerList& bundled();

    const std::vector<std::string>& patterns() const noexcept { return patterns_; }

private:
    friend struct Engine;

    std::vector<std::string> patterns_;
    std::vector<std::wregex> compiled_;
};

struct FrontMatterResult {
    std::string text;
    bool no_marker = false;
};

/// Drops every line before the first line matching any marker.
FrontMatterResult trim_front_matter(std::string_view text, const MarkerList& markers);

}  // namespace refinery::scrub
