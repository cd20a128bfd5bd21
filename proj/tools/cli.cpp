#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <unordered_set>

#include <CLI11.hpp>
#include <json.hpp>

#include "refinery/corpus_io.hpp"
#include "refinery/dedup.hpp"
#include "refinery/error.hpp"
#include "refinery/pipeline.hpp"
#include "refinery/stats.hpp"

namespace refinery::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct DedupFlags {
    std::optional<std::size_t> k;
    std::optional<std::size_t> hashes;
    std::optional<std::size_t> bands;
    std::optional<std::string> mode;
    std::optional<double> min_sim;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> banding;
    std::optional<std::size_t> window;

    void add_to(CLI::App& app) {
        app.add_option("--k", k, "Shingle size in words (default 13)");
        app.add_option("--hashes", hashes, "MinHash functions (default 128)");
        app.add_option("--bands", bands, "LSH bands (default 8)");
        app.add_option("--mode", mode, "canonical or exact")->check(CLI::IsMember({"canonical", "exact"}));
        app.add_option("--min-sim", min_sim, "Exact mode: minimum estimated similarity (default 0.98)");
        app.add_option("--seed", seed, "Hash seed");
        app.add_option("--banding", banding, "disjoint or sliding")->check(CLI::IsMember({"disjoint", "sliding"}));
        app.add_option("--window", window, "Sliding banding: window width");
    }

    // Flags win over whatever the config already holds.
    void apply(dedup::DedupConfig& c) const {
        if (mode) {
            const bool was_exact = c.mode == dedup::Mode::Exact;
            c.mode = dedup::parse_mode(*mode);
            if (c.mode == dedup::Mode::Exact && !was_exact) {
                c.canonicalize_numbers = false;
                c.canonicalize_weekdays = false;
            }
        }
        if (k) c.shingle_k = *k;
        if (hashes) c.num_hashes = *hashes;
        if (bands) c.num_bands = *bands;
        if (min_sim) c.exact_similarity_min = *min_sim;
        if (seed) c.seed = *seed;
        if (banding) c.banding = dedup::parse_banding(*banding);
        if (window) c.window_width = *window;
    }
};

std::optional<fs::path> data_dir(const std::string& flag) {
    if (!flag.empty()) return fs::path(flag);
    if (const char* env = std::getenv(kDataDirEnv); env && *env) return fs::path(env);
    return std::nullopt;
}

pipeline::Resources load_resources(const std::string& flag) {
    if (auto dir = data_dir(flag)) return pipeline::Resources::from_dir(*dir);
    return pipeline::Resources::bundled();
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed on " + path.string());
}

void make_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

// Reads all inputs in order; ids must be unique across files too.
std::vector<Document> read_inputs(const std::vector<std::string>& paths, SourceKind source, bool strict,
                                  std::ostream& err) {
    std::vector<Document> docs;
    std::unordered_set<std::string> seen;
    for (const auto& p : paths) {
        ReadStats rs;
        for (Document& d : read_corpus(p, ReadOptions{source, strict}, &rs)) {
            if (!seen.insert(d.id).second) {
                if (strict) throw FormatError(p + ": id '" + d.id + "' already appeared in an earlier input", 0);
                err << "warning: " << p << ": skipping repeated id '" << d.id << "'\n";
                continue;
            }
            docs.push_back(std::move(d));
        }
        if (rs.skipped > 0) {
            err << "warning: " << p << ": skipped " << rs.skipped << " malformed record(s)\n";
            for (const auto& note : rs.notes) err << "  " << note << '\n';
        }
    }
    return docs;
}

struct SpecFlags {
    std::string source;
    std::string spec_path;
    std::string data_dir;
    DedupFlags dedup;

    void add_to(CLI::App& app, bool dedup_flags) {
        app.add_option("--source", source, "Built-in preset for this source kind");
        app.add_option("--spec", spec_path, "Pipeline spec file (JSON); overrides --source");
        app.add_option("--data-dir", data_dir, std::string("Data directory (default: $") + kDataDirEnv + " or bundled)");
        if (dedup_flags) dedup.add_to(app);
    }

    pipeline::PipelineSpec resolve() const {
        pipeline::PipelineSpec spec;
        if (!spec_path.empty()) spec = pipeline::load_spec(spec_path);
        else if (!source.empty()) spec = pipeline::builtin_spec(source);
        else throw ConfigError("either --source or --spec is required");
        dedup.apply(spec.dedup);
        return spec;
    }
};

void fail_on_violations(const pipeline::PipelineSpec& spec) {
    auto v = pipeline::validate_spec(spec);
    if (v.empty()) return;
    std::string msg = "invalid pipeline spec:";
    for (const auto& s : v) msg += "\n  " + s;
    throw ConfigError(msg);
}

int cmd_process(const std::vector<std::string>& inputs, const std::string& out_dir, const SpecFlags& flags,
                unsigned jobs, bool strict, std::ostream& out, std::ostream& err) {
    const pipeline::PipelineSpec spec = flags.resolve();
    fail_on_violations(spec);
    const pipeline::Resources res = load_resources(flags.data_dir);

    const fs::path dir(out_dir);
    make_dir(dir);

    json manifest;
    manifest["tool"] = "refinery";
    manifest["version"] = kVersion;
    manifest["inputs"] = inputs;
    if (!flags.spec_path.empty()) manifest["spec_path"] = flags.spec_path;
    else manifest["source"] = flags.source;
    manifest["seed"] = spec.dedup.seed;
    manifest["jobs"] = jobs;
    manifest["strict"] = strict;
    manifest["output_dir"] = out_dir;
    if (auto d = data_dir(flags.data_dir)) manifest["data_dir"] = d->string();
    manifest["config_hash"] = pipeline::spec_hash(spec);
    manifest["spec"] = json::parse(pipeline::dump_spec(spec));
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");

    std::vector<Document> docs = read_inputs(inputs, spec.source, strict, err);
    const std::size_t n_in = docs.size();
    pipeline::RunResult r = pipeline::run(std::move(docs), spec, res, jobs);

    write_corpus(r.retained, dir / "corpus.jsonl");
    pipeline::write_drop_log(r.drops, dir / "drops.jsonl");
    write_text(dir / "report.json", pipeline::dump_report(r.report));

    out << "read " << n_in << ", retained " << r.retained.size() << ", dropped " << r.drops.size() << '\n';
    return kExitOk;
}

int cmd_dedup(const std::vector<std::string>& inputs, const std::string& out_dir, const std::string& source,
              const DedupFlags& flags, unsigned jobs, bool strict, std::ostream& out, std::ostream& err) {
    dedup::DedupConfig cfg;
    flags.apply(cfg);
    if (auto v = cfg.violations(); !v.empty()) {
        std::string msg = "invalid dedup settings:";
        for (const auto& s : v) msg += "\n  " + s;
        throw ConfigError(msg);
    }
    std::vector<Document> docs = read_inputs(inputs, source_from_string(source), strict, err);
    const fs::path dir(out_dir);
    make_dir(dir);
    const std::size_t n_in = docs.size();
    dedup::DedupResult r = dedup::dedup_corpus(std::move(docs), cfg, jobs);
    write_corpus(r.retained, dir / "corpus.jsonl");
    dedup::write_duplicate_report(r.report, dir / "duplicates.jsonl");
    out << "read " << n_in << ", retained " << r.retained.size() << ", components " << r.report.components.size()
        << '\n';
    return kExitOk;
}

int cmd_stats(const std::vector<std::string>& corpora, const std::vector<std::string>& reports,
              const std::string& out_dir, bool histogram, std::ostream& out, std::ostream& err) {
    if (corpora.empty() && reports.empty()) throw ConfigError("stats needs --corpus and/or --report");
    std::optional<stats::LengthDistribution> dist;
    std::optional<stats::ReductionSummary> summary;
    if (!corpora.empty()) {
        stats::LengthAccumulator acc;
        for (const auto& p : corpora) {
            CorpusReader reader(p, ReadOptions{});
            while (auto d = reader.next()) acc.add(*d);
            if (reader.stats().skipped > 0) {
                err << "warning: " << p << ": skipped " << reader.stats().skipped << " malformed record(s)\n";
            }
        }
        dist = acc.finish(histogram);
        if (dist->empty()) err << "warning: corpus is empty; lengths.csv has no rows\n";
    }
    if (!reports.empty()) {
        std::vector<RunReport> loaded;
        for (const auto& p : reports) loaded.push_back(pipeline::load_report(p));
        summary = stats::reduction_summary(loaded);
    }
    for (const auto& p : stats::emit_tables(dist ? &*dist : nullptr, summary ? &*summary : nullptr, out_dir)) {
        out << "wrote " << p.string() << '\n';
    }
    return kExitOk;
}

int cmd_inspect(const std::string& drops_path, const std::vector<std::string>& inputs, const SpecFlags& flags,
                const std::string& reason, const std::string& stage, std::size_t limit, unsigned jobs,
                std::ostream& out, std::ostream& err) {
    std::vector<DropRecord> drops;
    if (!drops_path.empty()) {
        drops = pipeline::read_drop_log(drops_path);
    } else {
        if (inputs.empty()) throw ConfigError("inspect-drops needs --drops, or --in with --source/--spec");
        const auto spec = flags.resolve();
        fail_on_violations(spec);
        const auto res = load_resources(flags.data_dir);
        drops = pipeline::run(read_inputs(inputs, spec.source, false, err), spec, res, jobs).drops;
    }
    if (!reason.empty() && !parse_drop_reason(reason)) throw ConfigError("unknown drop reason '" + reason + "'");
    std::size_t shown = 0;
    out << "id\tsource\tstage\treason\tvalue\tthreshold\n";
    for (const auto& d : drops) {
        if (!reason.empty() && to_string(d.reason) != reason) continue;
        if (!stage.empty() && d.stage != stage) continue;
        if (limit != 0 && shown == limit) break;
        out << d.id << '\t' << to_string(d.source) << '\t' << d.stage << '\t' << to_string(d.reason) << '\t'
            << stats::format_double(d.value) << '\t' << stats::format_double(d.threshold) << '\n';
        ++shown;
    }
    return kExitOk;
}

int cmd_validate(const std::string& spec_path, const std::string& preset, std::ostream& out, std::ostream& err) {
    if (!preset.empty()) {
        out << pipeline::dump_spec(pipeline::builtin_spec(preset));
        return kExitOk;
    }
    if (spec_path.empty()) throw ConfigError("validate-config needs --spec or --dump-preset");
    const auto spec = pipeline::load_spec(spec_path);
    const auto v = pipeline::validate_spec(spec);
    if (v.empty()) {
        out << "ok " << pipeline::spec_hash(spec) << '\n';
        return kExitOk;
    }
    for (const auto& s : v) err << s << '\n';
    return kExitConfig;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Persian corpus cleaning and near-duplicate removal", "refinery"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    unsigned jobs = 1;
    bool strict = false;
    std::vector<std::string> inputs;
    std::string out_dir;

    auto* process = app.add_subcommand("process", "Run a source pipeline over a corpus");
    SpecFlags process_flags;
    process_flags.add_to(*process, true);
    process->add_option("--in", inputs, "Input JSONL file(s)")->required();
    process->add_option("--out", out_dir, "Output directory")->required();
    process->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    process->add_flag("--strict", strict, "Fail on malformed records and repeated ids");

    auto* dedup_cmd = app.add_subcommand("dedup", "Remove near-duplicates from a cleaned corpus");
    DedupFlags dedup_flags;
    dedup_flags.add_to(*dedup_cmd);
    std::string dedup_source = "web";
    dedup_cmd->add_option("--in", inputs, "Input JSONL file(s)")->required();
    dedup_cmd->add_option("--out", out_dir, "Output directory")->required();
    dedup_cmd->add_option("--source", dedup_source, "Source for records without one");
    dedup_cmd->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    dedup_cmd->add_flag("--strict", strict, "Fail on malformed records and repeated ids");

    auto* stats_cmd = app.add_subcommand("stats", "Write length and reduction tables");
    std::vector<std::string> corpora;
    std::vector<std::string> reports;
    bool histogram = false;
    stats_cmd->add_option("--corpus", corpora, "Corpus JSONL file(s)");
    stats_cmd->add_option("--report", reports, "report.json file(s) from process");
    stats_cmd->add_option("--out", out_dir, "Output directory")->required();
    stats_cmd->add_flag("--histogram", histogram, "Also write log2 length histograms");

    auto* inspect = app.add_subcommand("inspect-drops", "List dropped documents with reason and threshold");
    SpecFlags inspect_flags;
    inspect_flags.add_to(*inspect, false);
    std::string drops_path;
    std::string reason;
    std::string stage;
    std::size_t limit = 0;
    inspect->add_option("--drops", drops_path, "drops.jsonl from process");
    inspect->add_option("--in", inputs, "Run the pipeline on these inputs instead");
    inspect->add_option("--reason", reason, "Only this reason");
    inspect->add_option("--stage", stage, "Only this stage");
    inspect->add_option("--limit", limit, "At most this many rows (0: all)");
    inspect->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

    auto* validate = app.add_subcommand("validate-config", "Check a spec file, or print a preset");
    std::string spec_path;
    std::string preset;
    validate->add_option("--spec", spec_path, "Pipeline spec file");
    validate->add_option("--dump-preset", preset, "Print the built-in spec for a source");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return kExitOk;
        err << "error: " << e.what() << '\n';
        // Subcommand help shows up here too.
        if (app.get_subcommands().empty()) err << app.help();
        return kExitConfig;
    }

    try {
        if (*process) return cmd_process(inputs, out_dir, process_flags, jobs, strict, out, err);
        if (*dedup_cmd) return cmd_dedup(inputs, out_dir, dedup_source, dedup_flags, jobs, strict, out, err);
        if (*stats_cmd) return cmd_stats(corpora, reports, out_dir, histogram, out, err);
        if (*inspect) return cmd_inspect(drops_path, inputs, inspect_flags, reason, stage, limit, jobs, out, err);
        if (*validate) return cmd_validate(spec_path, preset, out, err);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const FormatError& e) {
        err << "input error: " << e.what() << '\n';
        return kExitIo;
    } catch (const IoError& e) {
        err << "io error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitConfig;
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace refinery::cli
