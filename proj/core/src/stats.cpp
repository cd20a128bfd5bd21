#include "refinery/stats.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "refinery/error.hpp"
#include "refinery/text.hpp"

namespace refinery::stats {

namespace {

std::optional<double> pct(std::size_t part, std::size_t whole) {
    if (whole == 0) return std::nullopt;
    return 100.0 * double(part) / double(whole);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::vector<std::string_view> csv_lines(std::string_view csv) {
    std::vector<std::string_view> out;
    for (auto line : split(csv, '\n')) {
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty()) out.push_back(line);
    }
    return out;
}

std::size_t parse_size(std::string_view s, std::size_t line) {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw FormatError("bad integer '" + std::string(s) + "'", line);
    return v;
}

double parse_double(std::string_view s, std::size_t line) {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw FormatError("bad number '" + std::string(s) + "'", line);
    return v;
}

// Source names never contain commas or quotes; anything else is rejected rather than escaped.
const std::string& csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") != std::string::npos) throw Error("cannot write '" + s + "' as a CSV field");
    return s;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed on " + path.string());
}

}  // namespace

std::size_t nearest_rank(std::span<const std::size_t> sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("nearest_rank of an empty sequence");
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("nearest_rank needs p in (0, 1]");
    auto rank = std::size_t(std::ceil(p * double(sorted.size())));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

LengthRow summarize(std::string source, std::vector<std::size_t> counts, bool histogram) {
    LengthRow row;
    row.source = std::move(source);
    row.count = counts.size();
    if (counts.empty()) return row;
    std::sort(counts.begin(), counts.end());
    row.min = counts.front();
    row.max = counts.back();
    row.q1 = nearest_rank(counts, 0.25);
    row.median = nearest_rank(counts, 0.5);
    row.q3 = nearest_rank(counts, 0.75);
    // Integer sum first, so the mean does not depend on summation order.
    const unsigned long long total = std::accumulate(counts.begin(), counts.end(), 0ULL);
    row.mean = double(total) / double(counts.size());
    if (histogram) {
        const std::size_t bins = std::bit_width(row.max) + 1;
        for (std::size_t b = 0; b < bins; ++b) {
            const std::size_t lower = b == 0 ? 0 : std::size_t(1) << (b - 1);
            row.histogram.push_back({lower, std::size_t(1) << b, 0});
        }
        for (std::size_t c : counts) ++row.histogram[std::bit_width(c)].count;
    }
    return row;
}

void LengthAccumulator::add(const Document& doc) {
    add(to_string(doc.source), text::word_count(std::string_view(doc.text)));
}

void LengthAccumulator::add(std::string_view source, std::size_t word_count) {
    auto it = counts_.find(std::string(source));
    if (it == counts_.end()) it = counts_.emplace(std::string(source), std::vector<std::size_t>{}).first;
    it->second.push_back(word_count);
}

LengthAccumulator& LengthAccumulator::merge(const LengthAccumulator& other) {
    for (const auto& [src, v] : other.counts_) {
        auto& mine = counts_[src];
        mine.insert(mine.end(), v.begin(), v.end());
    }
    return *this;
}

LengthDistribution LengthAccumulator::finish(bool histogram) const {
    LengthDistribution d;
    for (const auto& [src, v] : counts_) d.rows.push_back(summarize(src, v, histogram));
    return d;
}

LengthDistribution length_distribution(std::span<const Document> corpus, bool histogram) {
    LengthAccumulator acc;
    for (const Document& d : corpus) acc.add(d);
    return acc.finish(histogram);
}

std::optional<double> ReductionRow::preprocess_reduction_pct() const { return pct(initial - after_preprocess, initial); }

std::optional<double> ReductionRow::dedup_reduction_pct() const { return pct(after_preprocess - after_dedup, after_preprocess); }

std::optional<double> ReductionRow::retained_pct() const { return pct(after_dedup, initial); }

std::map<std::string, std::size_t> initial_counts(const RunReport& report) {
    std::map<std::string, std::size_t> out;
    if (report.stages.empty()) return out;
    for (const auto& [src, c] : report.stages.front().by_source) out[src] = c.input;
    return out;
}

ReductionSummary reduction_summary(std::span<const RunReport> reports) {
    std::map<std::string, ReductionRow> rows;
    for (const RunReport& report : reports) {
        if (auto err = report.check()) throw Error("inconsistent report: " + *err);
        if (report.stages.empty()) continue;

        // Last stage before dedup; dedup is the final stage when present.
        const bool has_dedup = report.stages.back().op == kDedupStage;
        for (std::size_t i = 0; i + 1 < report.stages.size(); ++i) {
            if (report.stages[i].op == kDedupStage) {
                throw Error("inconsistent report: stage '" + report.stages[i].name + "' deduplicates before the last stage");
            }
        }
        const std::size_t n_pre = report.stages.size() - (has_dedup ? 1 : 0);

        for (const auto& [src, first] : report.stages.front().by_source) {
            ReductionRow& row = rows[src];
            row.source = src;
            const std::size_t pre = n_pre == 0 ? first.input : report.stages[n_pre - 1].by_source.at(src).kept;
            const std::size_t post = has_dedup ? report.stages.back().by_source.at(src).kept : pre;
            row.initial += first.input;
            row.after_preprocess += pre;
            row.after_dedup += post;
        }
    }
    ReductionSummary s;
    for (auto& [src, row] : rows) s.rows.push_back(std::move(row));
    return s;
}

ReductionSummary reduction_summary_from_drops(const std::map<std::string, std::size_t>& initial,
                                              std::span<const DropRecord> drops) {
    std::map<std::string, ReductionRow> rows;
    for (const auto& [src, n] : initial) rows[src] = {src, n, n, n};
    for (const DropRecord& d : drops) {
        const std::string src(to_string(d.source));
        auto it = rows.find(src);
        if (it == rows.end()) throw Error("drop log names source " + src + " absent from the initial counts");
        ReductionRow& row = it->second;
        if (row.after_dedup == 0) throw Error("drop log removes more " + src + " documents than it started with");
        if (d.stage != kDedupStage) --row.after_preprocess;
        --row.after_dedup;
    }
    ReductionSummary s;
    for (auto& [src, row] : rows) s.rows.push_back(std::move(row));
    return s;
}

std::vector<ReductionTableRow> reduction_table(const ReductionSummary& summary) {
    std::vector<ReductionTableRow> out;
    for (const ReductionRow& r : summary.rows) {
        out.push_back({r.source, "preprocess", r.initial, r.after_preprocess, pct(r.after_preprocess, r.initial)});
        out.push_back({r.source, "dedup", r.after_preprocess, r.after_dedup, pct(r.after_dedup, r.after_preprocess)});
        out.push_back({r.source, "overall", r.initial, r.after_dedup, pct(r.after_dedup, r.initial)});
    }
    return out;
}

std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw Error("cannot format number");
    return std::string(buf, p);
}

std::string lengths_csv(const LengthDistribution& dist) {
    std::string out = "source,count,min,q1,median,q3,max,mean\n";
    for (const LengthRow& r : dist.rows) {
        out += csv_field(r.source);
        for (std::size_t v : {r.count, r.min, r.q1, r.median, r.q3, r.max}) out += "," + std::to_string(v);
        out += "," + format_double(r.mean) + "\n";
    }
    return out;
}

std::string histogram_csv(const LengthDistribution& dist) {
    std::string out = "source,lower,upper,count\n";
    for (const LengthRow& r : dist.rows) {
        for (const HistogramBin& b : r.histogram) {
            out += csv_field(r.source) + "," + std::to_string(b.lower) + "," + std::to_string(b.upper) + "," +
                   std::to_string(b.count) + "\n";
        }
    }
    return out;
}

std::string reduction_csv(const ReductionSummary& summary) {
    std::string out = "source,stage,input,kept,pct_kept\n";
    for (const auto& r : reduction_table(summary)) {
        out += csv_field(r.source) + "," + r.stage + "," + std::to_string(r.input) + "," + std::to_string(r.kept) + "," +
               (r.pct_kept ? format_double(*r.pct_kept) : "n/a") + "\n";
    }
    return out;
}

std::vector<std::filesystem::path> emit_tables(const LengthDistribution* dist, const ReductionSummary* summary,
                                               const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    std::vector<std::filesystem::path> written;
    if (dist) {
        written.push_back(dir / "lengths.csv");
        write_file(written.back(), lengths_csv(*dist));
        const bool any_hist =
            std::any_of(dist->rows.begin(), dist->rows.end(), [](const auto& r) { return !r.histogram.empty(); });
        if (any_hist) {
            written.push_back(dir / "lengths_hist.csv");
            write_file(written.back(), histogram_csv(*dist));
        }
    }
    if (summary) {
        written.push_back(dir / "reduction.csv");
        write_file(written.back(), reduction_csv(*summary));
    }
    return written;
}

LengthDistribution parse_lengths_csv(std::string_view csv) {
    const auto lines = csv_lines(csv);
    if (lines.empty() || lines[0] != "source,count,min,q1,median,q3,max,mean") {
        throw FormatError("lengths table has an unexpected header", 1);
    }
    LengthDistribution d;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = split(lines[i], ',');
        if (f.size() != 8) throw FormatError("expected 8 fields", i + 1);
        LengthRow r;
        r.source = std::string(f[0]);
        r.count = parse_size(f[1], i + 1);
        r.min = parse_size(f[2], i + 1);
        r.q1 = parse_size(f[3], i + 1);
        r.median = parse_size(f[4], i + 1);
        r.q3 = parse_size(f[5], i + 1);
        r.max = parse_size(f[6], i + 1);
        r.mean = parse_double(f[7], i + 1);
        d.rows.push_back(std::move(r));
    }
    return d;
}

std::vector<ReductionTableRow> parse_reduction_csv(std::string_view csv) {
    const auto lines = csv_lines(csv);
    if (lines.empty() || lines[0] != "source,stage,input,kept,pct_kept") {
        throw FormatError("reduction table has an unexpected header", 1);
    }
    std::vector<ReductionTableRow> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = split(lines[i], ',');
        if (f.size() != 5) throw FormatError("expected 5 fields", i + 1);
        ReductionTableRow r;
        r.source = std::string(f[0]);
        r.stage = std::string(f[1]);
        r.input = parse_size(f[2], i + 1);
        r.kept = parse_size(f[3], i + 1);
        if (f[4] != "n/a") r.pct_kept = parse_double(f[4], i + 1);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace refinery::stats
