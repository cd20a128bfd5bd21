#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace refinery {

enum class SourceKind { Web, CulturaX, Madlad, Virgool, WikiShia, BookText, PaperText, PaperOcr, Social };

inline constexpr std::array<SourceKind, 9> kAllSources = {
    SourceKind::Web,      SourceKind::CulturaX,  SourceKind::Madlad,   SourceKind::Virgool, SourceKind::WikiShia,
    SourceKind::BookText, SourceKind::PaperText, SourceKind::PaperOcr, SourceKind::Social};

std::string_view to_string(SourceKind s);
std::optional<SourceKind> parse_source(std::string_view name);
// Throws ConfigError listing the valid names.
SourceKind source_from_string(std::string_view name);
bool is_web_family(SourceKind s);

/// One corpus record. `original_text` is fixed at construction; every stage
/// rewrites `text` only.
class Document {
public:
    Document() = default;
    Document(std::string id, SourceKind source, std::string text, std::map<std::string, std::string> metadata = {})
        : id(std::move(id)), source(source), text(std::move(text)), metadata(std::move(metadata)) {
        original_ = this->text;
    }

    const std::string& original_text() const noexcept { return original_; }

    std::string id;
    SourceKind source = SourceKind::Web;
    std::string text;
    std::map<std::string, std::string> metadata;

private:
    std::string original_;
};

enum class DropReason {
    TooShort,
    NonPersianMajority,
    RepeatedWords,
    ShortLineMajority,
    OovExcess,
    AvgWordLengthOutOfRange,
    NumericSymbolicExcess,
    StopwordDeficit,
    OcrOovExcess,
    OcrMergedWords,
    Duplicate,
    ShortReply,
    Corrupted,
};

std::string_view to_string(DropReason r);
std::optional<DropReason> parse_drop_reason(std::string_view name);

/// Keep, or Drop with exactly one reason. `value` and `threshold` record the
/// quantity that triggered the drop, for audit logs.
class FilterDecision {
public:
    static FilterDecision keep() { return FilterDecision{}; }
    static FilterDecision drop(DropReason reason, double value = 0.0, double threshold = 0.0) {
        FilterDecision d;
        d.reason_ = reason;
        d.value_ = value;
        d.threshold_ = threshold;
        return d;
    }

    bool kept() const noexcept { return !reason_.has_value(); }
    bool dropped() const noexcept { return reason_.has_value(); }
    std::optional<DropReason> reason() const noexcept { return reason_; }
    double value() const noexcept { return value_; }
    double threshold() const noexcept { return threshold_; }

    friend bool operator==(const FilterDecision&, const FilterDecision&) = default;

private:
    std::optional<DropReason> reason_;
    double value_ = 0.0;
    double threshold_ = 0.0;
};

/// One line of the drop log.
struct DropRecord {
    std::string id;
    SourceKind source = SourceKind::Web;
    std::string stage;
    DropReason reason = DropReason::Corrupted;
    double value = 0.0;
    double threshold = 0.0;

    friend bool operator==(const DropRecord&, const DropRecord&) = default;
};

struct StageCounts {
    std::size_t input = 0;
    std::size_t kept = 0;
    std::map<DropReason, std::size_t> dropped;

    std::size_t dropped_total() const;
    bool balanced() const { return input == kept + dropped_total(); }
    StageCounts& operator+=(const StageCounts& other);
    friend bool operator==(const StageCounts&, const StageCounts&) = default;
};

struct StageReport {
    std::string name;
    std::string op;
    StageCounts total;
    std::map<std::string, StageCounts> by_source;

    friend bool operator==(const StageReport&, const StageReport&) = default;
};

/// Per-stage kept/dropped counts of one pipeline run.
struct RunReport {
    std::vector<StageReport> stages;

    /// Every stage balances and each stage's kept count feeds the next stage's input,
    /// in total and per source. Returns the first violation, or nullopt.
    std::optional<std::string> check() const;

    /// Adds counts of a report with the same stage layout (shards of one run).
    /// Throws Error on mismatched layouts.
    RunReport& merge(const RunReport& other);

    friend bool operator==(const RunReport&, const RunReport&) = default;
};

}  // namespace refinery
