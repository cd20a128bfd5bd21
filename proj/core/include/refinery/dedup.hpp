#pragma once

// Near-duplicate elimination with MinHash signatures and LSH banding.
//
// Documents are canonicalized (numbers, symbols and weekday names neutralized),
// cut into word k-gram shingles and sketched with `num_hashes` MinHash values.
// The sketch is split into `num_bands` bands of rows_per_band values; two
// documents sharing any band key are candidates, and candidate pairs become edges
// of a duplicate graph whose connected components each keep one representative.
// With r rows per band and b bands, a pair of Jaccard similarity s becomes a
// candidate with probability 1 - (1 - s^r)^b.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "refinery/document.hpp"

namespace refinery::dedup {

enum class Mode {
    // Canonical forms; any shared band key is an edge.
    Canonical,
    // Whitespace-normalized text; an edge also needs estimated similarity >= exact_similarity_min.
    Exact,
};

enum class Banding {
    Disjoint,
    // Overlapping windows of `window_width` values, evenly spaced over the signature.
    Sliding,
};

std::string_view to_string(Mode m);
Mode parse_mode(std::string_view name);
std::string_view to_string(Banding b);
Banding parse_banding(std::string_view name);

struct DedupConfig {
    std::size_t shingle_k = 13;
    std::size_t num_hashes = 128;
    std::size_t num_bands = 8;
    std::uint64_t seed = 1;
    Mode mode = Mode::Canonical;
    double exact_similarity_min = 0.98;
    bool canonicalize_numbers = true;
    bool canonicalize_weekdays = true;
    Banding banding = Banding::Disjoint;
    std::size_t window_width = 0;  // sliding banding only

    std::size_t rows_per_band() const { return num_bands == 0 ? 0 : num_hashes / num_bands; }
    std::size_t band_width() const { return banding == Banding::Sliding ? window_width : rows_per_band(); }
    std::size_t band_stride() const;

    static DedupConfig canonical();
    static DedupConfig exact(double min_similarity = 0.98);

    /// Codes: "divisibility", "range", "sliding-window".
    std::vector<std::string> violations() const;

    friend bool operator==(const DedupConfig&, const DedupConfig&) = default;
};

/// Matching-only form of a text; never emitted.
std::string canonicalize(std::string_view text, const DedupConfig& cfg);

/// Distinct contiguous k-word windows, sorted. Fewer than k words yields one shingle
/// holding the whole word sequence; empty text yields none.
std::vector<std::string> shingles(std::string_view text, std::size_t k);

std::uint64_t hash_shingle(std::string_view shingle);

struct MinHashSignature {
    std::string doc_id;
    std::vector<std::uint64_t> values;
    // Set for documents without shingles; such signatures match nothing.
    bool empty = false;

    friend bool operator==(const MinHashSignature&, const MinHashSignature&) = default;
};

MinHashSignature signature(std::span<const std::string> shingle_set, const DedupConfig& cfg,
                           std::string doc_id = {});
MinHashSignature signature_from_hashes(std::span<const std::uint64_t> shingle_hashes, const DedupConfig& cfg,
                                       std::string doc_id = {});

/// Fraction of agreeing positions. Throws std::invalid_argument on length mismatch.
double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b);

/// One 64-bit key per band.
std::vector<std::uint64_t> band_keys(const MinHashSignature& sig, const DedupConfig& cfg);

struct ClusterInput {
    std::string doc_id;
    std::vector<std::uint64_t> keys;
    MinHashSignature signature;
};

struct DuplicateEdge {
    std::string a;  // a < b
    std::string b;
    double similarity = 0.0;

    friend bool operator==(const DuplicateEdge&, const DuplicateEdge&) = default;
};

struct DuplicateComponent {
    std::vector<std::string> members;  // sorted
    std::string representative;        // smallest member
    double max_similarity = 0.0;

    friend bool operator==(const DuplicateComponent&, const DuplicateComponent&) = default;
};

struct DuplicateReport {
    std::vector<DuplicateComponent> components;  // ordered by representative
    std::vector<DuplicateEdge> edges;            // ordered by (a, b)

    /// Members that are not their component's representative.
    std::vector<std::string> dropped_ids() const;

    friend bool operator==(const DuplicateReport&, const DuplicateReport&) = default;
};

DuplicateReport cluster(std::span<const ClusterInput> docs, const DedupConfig& cfg);

struct DedupResult {
    std::vector<Document> retained;  // input order, text untouched
    std::vector<Document> dropped;
    DuplicateReport report;
};

/// Full pass within each source partition. Components do not depend on `jobs`.
DedupResult dedup_corpus(std::vector<Document> docs, const DedupConfig& cfg, unsigned jobs = 1);

/// Line-delimited records: component_id, members, representative, max_similarity.
std::string format_component(const DuplicateComponent& c, std::size_t component_id);
void write_duplicate_report(const DuplicateReport& report, const std::filesystem::path& path);

/// Disjoint-set forest with path halving and union by size.
class UnionFind {
public:
    explicit UnionFind(std::size_t n);

    std::size_t find(std::size_t x);
    // Returns false when already joined.
    bool unite(std::size_t a, std::size_t b);
    std::size_t size_of(std::size_t x) { return size_[find(x)]; }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
};

}  // namespace refinery::dedup
