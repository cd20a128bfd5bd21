#pragma once

// Per-source pipelines: an ordered list of typed stages plus a dedup config,
// declared as data and executed over an in-memory corpus.

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "refinery/charnorm.hpp"
#include "refinery/dedup.hpp"
#include "refinery/docfilter.hpp"
#include "refinery/document.hpp"
#include "refinery/linefilter.hpp"
#include "refinery/scrub.hpp"

namespace refinery::pipeline {

enum class Op {
    Charnorm,
    StripMarkup,
    Scrub,
    ScrubPii,
    ScrubPageArtifacts,
    ScrubSocial,
    TrimFrontMatter,
    DropRatioLines,
    DropRepeatedLines,
    DropLeadingShortLines,
    CollapseBlankRuns,
    EvaluateWeb,
    EvaluateBook,
    EvaluateOcr,
    EvaluateSocial,
};

enum class Level { Character, Line, Document };

std::string_view to_string(Op op);
Op parse_op(std::string_view name);
Level level_of(Op op);

struct CharnormParams {
    bool keep_irab = false;
    std::size_t max_char_run = 3;
    bool preserve_zwnj = true;
    bool truncate_digit_runs = false;
    std::size_t max_blank_lines = 0;
    std::string blocklist = "default";  // or "books"

    static CharnormParams web() { return {}; }
    static CharnormParams books();
    friend bool operator==(const CharnormParams&, const CharnormParams&) = default;
};

struct RulesParams {
    std::string rules;  // rule set name, e.g. rules_web
    friend bool operator==(const RulesParams&, const RulesParams&) = default;
};

struct PageParams {
    // Metadata field holding the document title; lines repeating it are removed.
    std::string title_field = "title";
    friend bool operator==(const PageParams&, const PageParams&) = default;
};

struct LineParams {
    linefilter::LineFilterPolicy policy;
    friend bool operator==(const LineParams& a, const LineParams& b);
};

struct RepeatParams {
    std::size_t min_repeats = 3;
    friend bool operator==(const RepeatParams&, const RepeatParams&) = default;
};

struct EvalParams {
    docfilter::FilterPolicy policy;
    // With an OOV criterion and no vocabulary supplied, the vocabulary is built from
    // the documents reaching the stage: words seen at least this many times.
    std::size_t vocabulary_min_freq = 5;
    friend bool operator==(const EvalParams&, const EvalParams&) = default;
};

using StageParams =
    std::variant<std::monostate, CharnormParams, RulesParams, PageParams, LineParams, RepeatParams, EvalParams>;

struct Stage {
    Op op = Op::Charnorm;
    std::string name;  // label in reports and drop logs; unique within a spec
    StageParams params;

    friend bool operator==(const Stage&, const Stage&) = default;
};

/// Stage with the default parameters of `op`.
Stage make_stage(Op op, std::string name = {});

struct PipelineSpec {
    SourceKind source = SourceKind::Web;
    std::vector<Stage> stages;
    bool dedup_enabled = true;
    dedup::DedupConfig dedup;

    friend bool operator==(const PipelineSpec&, const PipelineSpec&) = default;
};

/// Preset for one source.
PipelineSpec builtin_spec(SourceKind source);
PipelineSpec builtin_spec(std::string_view source);  // ConfigError listing valid kinds

/// Each entry starts with a code: "document-stage-first", "character-stage-first",
/// "line-stage-after-document", "duplicate-stage-name", "params", "divisibility",
/// "range", "sliding-window".
std::vector<std::string> validate_spec(const PipelineSpec& spec);

/// Spec files are JSON: {"source", "stages": [{"op", "name", "params"}], "dedup"}.
/// Parameter blocks may name a "preset" and override individual fields; unknown
/// keys are errors. Throws ConfigError.
PipelineSpec parse_spec(std::string_view json);
PipelineSpec load_spec(const std::filesystem::path& path);
std::string dump_spec(const PipelineSpec& spec);

/// Hex digest of the dumped spec.
std::string spec_hash(const PipelineSpec& spec);

/// Tables, rule sets and lexicons used by the stages.
struct Resources {
    std::shared_ptr<const charnorm::MappingTable> mapping;
    std::shared_ptr<const charnorm::CodepointSet> blocked;
    std::shared_ptr<const charnorm::CodepointSet> blocked_books;
    std::map<std::string, scrub::RuleSet, std::less<>> rule_sets;
    std::shared_ptr<const scrub::MarkerList> markers;
    docfilter::Lexicons lexicons;

    static Resources bundled();
    /// Bundled data overridden by files present under `dir`, laid out as
    /// charnorm/{mapping,blocklist,blocklist_books}.txt, rules/<name>.tsv,
    /// rules/front_matter.txt and lexicons/{stopwords_fa,stopwords_ar,vocabulary}.txt.
    static Resources from_dir(const std::filesystem::path& dir);

    const scrub::RuleSet& rules(std::string_view name) const;  // ConfigError if unknown
};

struct RunResult {
    std::vector<Document> retained;  // input order
    RunReport report;
    std::vector<DropRecord> drops;  // stage order, then input order
    dedup::DuplicateReport duplicates;
};

/// Throws ConfigError before touching any document when the spec is invalid or
/// refers to missing resources. Results do not depend on `jobs`.
RunResult run(std::vector<Document> corpus, const PipelineSpec& spec, const Resources& resources,
              unsigned jobs = 1);

// Drop log: one JSON object per line with id, source, stage, reason, value, threshold.
std::string format_drop(const DropRecord& d);
DropRecord parse_drop(std::string_view line);  // FormatError
void write_drop_log(const std::vector<DropRecord>& drops, const std::filesystem::path& path);
std::vector<DropRecord> read_drop_log(const std::filesystem::path& path);

// Report files: {"stages": [{"name", "op", "total", "by_source"}]}.
std::string dump_report(const RunReport& report);
RunReport parse_report(std::string_view json);
RunReport load_report(const std::filesystem::path& path);

}  // namespace refinery::pipeline
