#include "refinery/document.hpp"

#include <numeric>

#include "refinery/error.hpp"

namespace refinery {

namespace {

constexpr std::array<std::string_view, 9> kSourceNames = {
    "web", "culturax", "madlad", "virgool", "wikishia", "book_text", "paper_text", "paper_ocr", "social"};

constexpr std::array<std::string_view, 13> kReasonNames = {
    "TooShort",        "NonPersianMajority", "RepeatedWords", "ShortLineMajority",      "OovExcess",
    "AvgWordLengthOutOfRange", "NumericSymbolicExcess", "StopwordDeficit", "OcrOovExcess", "OcrMergedWords",
    "Duplicate",       "ShortReply",         "Corrupted"};

}  // namespace

std::string_view to_string(SourceKind s) { return kSourceNames[static_cast<std::size_t>(s)]; }

std::optional<SourceKind> parse_source(std::string_view name) {
    for (std::size_t i = 0; i < kSourceNames.size(); ++i) {
        if (kSourceNames[i] == name) return static_cast<SourceKind>(i);
    }
    return std::nullopt;
}

SourceKind source_from_string(std::string_view name) {
    if (auto s = parse_source(name)) return *s;
    std::string valid;
    for (auto n : kSourceNames) {
        if (!valid.empty()) valid += ", ";
        valid += n;
    }
    throw ConfigError("unknown source '" + std::string(name) + "' (valid: " + valid + ")");
}

bool is_web_family(SourceKind s) {
    switch (s) {
        case SourceKind::Web:
        case SourceKind::CulturaX:
        case SourceKind::Madlad:
        case SourceKind::Virgool:
        case SourceKind::WikiShia:
            return true;
        default:
            return false;
    }
}

std::string_view to_string(DropReason r) { return kReasonNames[static_cast<std::size_t>(r)]; }

std::optional<DropReason> parse_drop_reason(std::string_view name) {
    for (std::size_t i = 0; i < kReasonNames.size(); ++i) {
        if (kReasonNames[i] == name) return static_cast<DropReason>(i);
    }
    return std::nullopt;
}

std::size_t StageCounts::dropped_total() const {
    return std::accumulate(dropped.begin(), dropped.end(), std::size_t{0},
                           [](std::size_t acc, const auto& kv) { return acc + kv.second; });
}

StageCounts& StageCounts::operator+=(const StageCounts& other) {
    input += other.input;
    kept += other.kept;
    for (const auto& [reason, n] : other.dropped) dropped[reason] += n;
    return *this;
}

std::optional<std::string> RunReport::check() const {
    for (std::size_t i = 0; i < stages.size(); ++i) {
        const StageReport& st = stages[i];
        if (!st.total.balanced()) return "stage '" + st.name + "' does not balance";
        StageCounts sum;
        for (const auto& [src, counts] : st.by_source) {
            if (!counts.balanced()) return "stage '" + st.name + "' does not balance for source " + src;
            sum += counts;
        }
        if (!st.by_source.empty() && !(sum == st.total)) {
            return "stage '" + st.name + "' per-source counts do not add up to the total";
        }
        if (i == 0) continue;
        const StageReport& prev = stages[i - 1];
        if (prev.total.kept != st.total.input) {
            return "stage '" + st.name + "' input does not match kept count of '" + prev.name + "'";
        }
        for (const auto& [src, counts] : st.by_source) {
            auto it = prev.by_source.find(src);
            const std::size_t prev_kept = it == prev.by_source.end() ? 0 : it->second.kept;
            if (prev_kept != counts.input) {
                return "stage '" + st.name + "' input for source " + src + " does not match previous stage";
            }
        }
    }
    return std::nullopt;
}

RunReport& RunReport::merge(const RunReport& other) {
    if (stages.empty()) {
        stages = other.stages;
        return *this;
    }
    if (other.stages.empty()) return *this;
    if (other.stages.size() != stages.size()) throw Error("cannot merge reports with different stage counts");
    for (std::size_t i = 0; i < stages.size(); ++i) {
        if (stages[i].name != other.stages[i].name) {
            throw Error("cannot merge reports: stage " + std::to_string(i) + " is '" + stages[i].name + "' vs '" +
                        other.stages[i].name + "'");
        }
        stages[i].total += other.stages[i].total;
        for (const auto& [src, counts] : other.stages[i].by_source) stages[i].by_source[src] += counts;
    }
    return *this;
}

}  // namespace refinery
