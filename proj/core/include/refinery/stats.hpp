#pragma once

// Document-length distributions and per-stage reduction summaries, as CSV tables.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "refinery/document.hpp"

namespace refinery::stats {

/// Element at nearest rank ceil(p * n) of an ascending sequence; p in (0, 1].
std::size_t nearest_rank(std::span<const std::size_t> sorted, double p);

struct HistogramBin {
    std::size_t lower = 0;  // inclusive
    std::size_t upper = 0;  // exclusive
    std::size_t count = 0;
    friend bool operator==(const HistogramBin&, const HistogramBin&) = default;
};

/// Word-count summary of one source.
struct LengthRow {
    std::string source;
    std::size_t count = 0;
    std::size_t min = 0;
    std::size_t q1 = 0;
    std::size_t median = 0;
    std::size_t q3 = 0;
    std::size_t max = 0;
    double mean = 0.0;
    // Bins [0,1), [1,2), [2,4), [4,8), ...; filled on request.
    std::vector<HistogramBin> histogram;
    friend bool operator==(const LengthRow&, const LengthRow&) = default;
};

struct LengthDistribution {
    std::vector<LengthRow> rows;  // by source name
    bool empty() const { return rows.empty(); }
    friend bool operator==(const LengthDistribution&, const LengthDistribution&) = default;
};

LengthRow summarize(std::string source, std::vector<std::size_t> word_counts, bool histogram = false);

/// Collects word counts per source; accumulators over shards merge exactly.
class LengthAccumulator {
public:
    void add(const Document& doc);
    void add(std::string_view source, std::size_t word_count);
    LengthAccumulator& merge(const LengthAccumulator& other);
    LengthDistribution finish(bool histogram = false) const;

private:
    std::map<std::string, std::vector<std::size_t>> counts_;
};

LengthDistribution length_distribution(std::span<const Document> corpus, bool histogram = false);

/// Document counts of one source through preprocessing and dedup.
struct ReductionRow {
    std::string source;
    std::size_t initial = 0;
    std::size_t after_preprocess = 0;
    std::size_t after_dedup = 0;

    // Share of documents removed by each stage, relative to that stage's input;
    // nullopt when the stage received nothing.
    std::optional<double> preprocess_reduction_pct() const;
    std::optional<double> dedup_reduction_pct() const;
    std::optional<double> retained_pct() const;

    friend bool operator==(const ReductionRow&, const ReductionRow&) = default;
};

struct ReductionSummary {
    std::vector<ReductionRow> rows;  // by source name
    friend bool operator==(const ReductionSummary&, const ReductionSummary&) = default;
};

/// Stage op that marks deduplication in reports and drop logs.
inline constexpr std::string_view kDedupStage = "dedup";

/// Sums reports per source. Throws Error naming the stage when a report's counts do not chain.
ReductionSummary reduction_summary(std::span<const RunReport> reports);

/// Same summary from initial per-source counts and the drop log alone.
ReductionSummary reduction_summary_from_drops(const std::map<std::string, std::size_t>& initial,
                                              std::span<const DropRecord> drops);

/// Per-source input counts of a report's first stage.
std::map<std::string, std::size_t> initial_counts(const RunReport& report);

struct ReductionTableRow {
    std::string source;
    std::string stage;  // preprocess, dedup or overall
    std::size_t input = 0;
    std::size_t kept = 0;
    std::optional<double> pct_kept;  // "n/a" in the table when input is 0
    friend bool operator==(const ReductionTableRow&, const ReductionTableRow&) = default;
};

std::vector<ReductionTableRow> reduction_table(const ReductionSummary& summary);

// lengths.csv: source,count,min,q1,median,q3,max,mean
// lengths_hist.csv (only with histograms): source,lower,upper,count
// reduction.csv: source,stage,input,kept,pct_kept
std::string lengths_csv(const LengthDistribution& dist);
std::string histogram_csv(const LengthDistribution& dist);
std::string reduction_csv(const ReductionSummary& summary);

/// Writes the tables for whichever inputs are given; returns the paths written.
std::vector<std::filesystem::path> emit_tables(const LengthDistribution* dist, const ReductionSummary* summary,
                                               const std::filesystem::path& dir);

// Parse-back of emitted tables (histograms are not part of lengths.csv). FormatError.
LengthDistribution parse_lengths_csv(std::string_view csv);
std::vector<ReductionTableRow> parse_reduction_csv(std::string_view csv);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace refinery::stats
