#include "refinery/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "refinery/error.hpp"
#include "refinery/parallel.hpp"

namespace refinery::pipeline {

using json = nlohmann::ordered_json;

namespace {

struct OpInfo {
    Op op;
    std::string_view name;
    Level level;
};

constexpr OpInfo kOps[] = {
    {Op::Charnorm, "charnorm", Level::Character},
    {Op::StripMarkup, "strip_markup", Level::Line},
    {Op::Scrub, "scrub", Level::Line},
    {Op::ScrubPii, "scrub_pii", Level::Line},
    {Op::ScrubPageArtifacts, "scrub_page_artifacts", Level::Line},
    {Op::ScrubSocial, "scrub_social", Level::Line},
    {Op::TrimFrontMatter, "trim_front_matter", Level::Line},
    {Op::DropRatioLines, "drop_ratio_lines", Level::Line},
    {Op::DropRepeatedLines, "drop_repeated_lines", Level::Line},
    {Op::DropLeadingShortLines, "drop_leading_short_lines", Level::Line},
    {Op::CollapseBlankRuns, "collapse_blank_runs", Level::Line},
    {Op::EvaluateWeb, "evaluate_web", Level::Document},
    {Op::EvaluateBook, "evaluate_book", Level::Document},
    {Op::EvaluateOcr, "evaluate_ocr", Level::Document},
    {Op::EvaluateSocial, "evaluate_social", Level::Document},
};

const OpInfo& info(Op op) {
    for (const OpInfo& i : kOps) {
        if (i.op == op) return i;
    }
    throw Error("unknown op");
}

docfilter::FilterPolicy policy_preset(std::string_view name) {
    using P = docfilter::FilterPolicy;
    if (name == "web") return P::web();
    if (name == "culturax") return P::culturax();
    if (name == "madlad") return P::madlad();
    if (name == "virgool") return P::virgool();
    if (name == "wikishia") return P::wikishia();
    if (name == "book") return P::book();
    if (name == "ocr") return P::ocr();
    if (name == "social") return P::social();
    throw ConfigError("unknown filter preset '" + std::string(name) +
                      "' (valid: web, culturax, madlad, virgool, wikishia, book, ocr, social)");
}

linefilter::LineFilterPolicy line_preset(std::string_view name) {
    if (name == "web") return linefilter::LineFilterPolicy::web();
    if (name == "books") return linefilter::LineFilterPolicy::books();
    throw ConfigError("unknown line-filter preset '" + std::string(name) + "' (valid: web, books)");
}

Stage stage(Op op, std::string name, StageParams params) {
    Stage s = make_stage(op, std::move(name));
    if (!std::holds_alternative<std::monostate>(params)) s.params = std::move(params);
    return s;
}

Stage evaluate(Op op, docfilter::FilterPolicy policy) {
    return stage(op, "evaluate", EvalParams{std::move(policy)});
}

// ---- JSON field access ----

// Reads fields of one object and rejects keys that were never read.
class Fields {
public:
    Fields(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
    }

    bool has(const char* key) const { return j_.contains(key); }

    const json* get(const char* key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void read(const char* key, bool& out) {
        if (const json* v = get(key)) {
            if (!v->is_boolean()) fail(key, "a boolean");
            out = v->get<bool>();
        }
    }
    void read(const char* key, double& out) {
        if (const json* v = get(key)) {
            if (!v->is_number()) fail(key, "a number");
            out = v->get<double>();
        }
    }
    void read(const char* key, std::size_t& out) {
        if (const json* v = get(key)) {
            if (!v->is_number_unsigned()) fail(key, "a non-negative integer");
            out = v->get<std::size_t>();
        }
    }
    void read(const char* key, std::uint64_t& out, int) {
        if (const json* v = get(key)) {
            if (!v->is_number_unsigned()) fail(key, "a non-negative integer");
            out = v->get<std::uint64_t>();
        }
    }
    void read(const char* key, std::string& out) {
        if (const json* v = get(key)) {
            if (!v->is_string()) fail(key, "a string");
            out = v->get<std::string>();
        }
    }
    template <typename T>
    void read_optional(const char* key, std::optional<T>& out) {
        if (!has(key)) {
            seen_.insert(key);
            return;
        }
        if (j_.at(key).is_null()) {
            seen_.insert(key);
            out.reset();
            return;
        }
        T v{};
        read(key, v);
        out = v;
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.contains(it.key())) throw ConfigError(where_ + ": unknown key '" + it.key() + "'");
        }
    }

private:
    [[noreturn]] void fail(const char* key, const char* what) const {
        throw ConfigError(where_ + ": '" + key + "' must be " + what);
    }

    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

template <typename T>
json optional_json(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

json params_json(const StageParams& params) {
    json j = json::object();
    if (const auto* p = std::get_if<CharnormParams>(&params)) {
        j["keep_irab"] = p->keep_irab;
        j["max_char_run"] = p->max_char_run;
        j["preserve_zwnj"] = p->preserve_zwnj;
        j["truncate_digit_runs"] = p->truncate_digit_runs;
        j["max_blank_lines"] = p->max_blank_lines;
        j["blocklist"] = p->blocklist;
    } else if (const auto* p = std::get_if<RulesParams>(&params)) {
        j["rules"] = p->rules;
    } else if (const auto* p = std::get_if<PageParams>(&params)) {
        j["title_field"] = p->title_field;
    } else if (const auto* p = std::get_if<LineParams>(&params)) {
        const auto& q = p->policy;
        j["special_ratio_enabled"] = q.special_ratio_enabled;
        j["special_ratio_max"] = q.special_ratio_max;
        j["numeric_symbolic_enabled"] = q.numeric_symbolic_enabled;
        j["numeric_ratio_max"] = q.numeric_ratio_max;
        j["symbolic_ratio_max"] = q.symbolic_ratio_max;
        j["repeat_line_min"] = q.repeat_line_min;
        j["leading_short_lines"] = {{"enabled", q.leading_short_lines.enabled},
                                    {"min_words", q.leading_short_lines.min_words},
                                    {"window", q.leading_short_lines.window}};
    } else if (const auto* p = std::get_if<RepeatParams>(&params)) {
        j["min_repeats"] = p->min_repeats;
    } else if (const auto* p = std::get_if<EvalParams>(&params)) {
        const auto& q = p->policy;
        j["min_words"] = optional_json(q.min_words);
        j["max_nonpersian_char_frac"] = optional_json(q.max_nonpersian_char_frac);
        j["min_persian_char_frac"] = optional_json(q.min_persian_char_frac);
        j["max_word_repetition_frac"] = optional_json(q.max_word_repetition_frac);
        j["max_short_line_frac"] = optional_json(q.max_short_line_frac);
        j["short_line_words"] = q.short_line_words;
        j["min_avg_word_len"] = optional_json(q.min_avg_word_len);
        j["max_avg_word_len"] = optional_json(q.max_avg_word_len);
        j["max_numeric_symbolic_frac"] = optional_json(q.max_numeric_symbolic_frac);
        j["min_stopword_frac"] = optional_json(q.min_stopword_frac);
        j["count_arabic_stopwords"] = q.count_arabic_stopwords;
        j["arabic_stopword_weight"] = q.arabic_stopword_weight;
        j["max_oov_frac"] = optional_json(q.max_oov_frac);
        j["max_long_words"] = optional_json(q.max_long_words);
        j["long_word_chars"] = q.long_word_chars;
        j["vocabulary_min_freq"] = p->vocabulary_min_freq;
    }
    return j;
}

void read_params(Fields& f, StageParams& params) {
    std::string preset;
    if (f.has("preset")) f.read("preset", preset);

    if (auto* p = std::get_if<CharnormParams>(&params)) {
        if (!preset.empty()) {
            if (preset == "web") *p = CharnormParams::web();
            else if (preset == "books") *p = CharnormParams::books();
            else throw ConfigError("unknown charnorm preset '" + preset + "' (valid: web, books)");
        }
        f.read("keep_irab", p->keep_irab);
        f.read("max_char_run", p->max_char_run);
        f.read("preserve_zwnj", p->preserve_zwnj);
        f.read("truncate_digit_runs", p->truncate_digit_runs);
        f.read("max_blank_lines", p->max_blank_lines);
        f.read("blocklist", p->blocklist);
    } else if (auto* p = std::get_if<RulesParams>(&params)) {
        f.read("rules", p->rules);
    } else if (auto* p = std::get_if<PageParams>(&params)) {
        f.read("title_field", p->title_field);
    } else if (auto* p = std::get_if<LineParams>(&params)) {
        auto& q = p->policy;
        if (!preset.empty()) q = line_preset(preset);
        f.read("special_ratio_enabled", q.special_ratio_enabled);
        f.read("special_ratio_max", q.special_ratio_max);
        f.read("numeric_symbolic_enabled", q.numeric_symbolic_enabled);
        f.read("numeric_ratio_max", q.numeric_ratio_max);
        f.read("symbolic_ratio_max", q.symbolic_ratio_max);
        f.read("repeat_line_min", q.repeat_line_min);
        if (const json* l = f.get("leading_short_lines")) {
            Fields lf(*l, "leading_short_lines");
            lf.read("enabled", q.leading_short_lines.enabled);
            lf.read("min_words", q.leading_short_lines.min_words);
            lf.read("window", q.leading_short_lines.window);
            lf.finish();
        }
    } else if (auto* p = std::get_if<RepeatParams>(&params)) {
        f.read("min_repeats", p->min_repeats);
    } else if (auto* p = std::get_if<EvalParams>(&params)) {
        auto& q = p->policy;
        if (!preset.empty()) q = policy_preset(preset);
        f.read_optional("min_words", q.min_words);
        f.read_optional("max_nonpersian_char_frac", q.max_nonpersian_char_frac);
        f.read_optional("min_persian_char_frac", q.min_persian_char_frac);
        f.read_optional("max_word_repetition_frac", q.max_word_repetition_frac);
        f.read_optional("max_short_line_frac", q.max_short_line_frac);
        f.read("short_line_words", q.short_line_words);
        f.read_optional("min_avg_word_len", q.min_avg_word_len);
        f.read_optional("max_avg_word_len", q.max_avg_word_len);
        f.read_optional("max_numeric_symbolic_frac", q.max_numeric_symbolic_frac);
        f.read_optional("min_stopword_frac", q.min_stopword_frac);
        f.read("count_arabic_stopwords", q.count_arabic_stopwords);
        f.read("arabic_stopword_weight", q.arabic_stopword_weight);
        f.read_optional("max_oov_frac", q.max_oov_frac);
        f.read_optional("max_long_words", q.max_long_words);
        f.read("long_word_chars", q.long_word_chars);
        f.read("vocabulary_min_freq", p->vocabulary_min_freq);
    } else if (!preset.empty()) {
        throw ConfigError("this op takes no preset");
    }
}

json dedup_json(const PipelineSpec& spec) {
    const auto& d = spec.dedup;
    return json{{"enabled", spec.dedup_enabled},
                {"shingle_k", d.shingle_k},
                {"num_hashes", d.num_hashes},
                {"num_bands", d.num_bands},
                {"seed", d.seed},
                {"mode", dedup::to_string(d.mode)},
                {"exact_similarity_min", d.exact_similarity_min},
                {"canonicalize_numbers", d.canonicalize_numbers},
                {"canonicalize_weekdays", d.canonicalize_weekdays},
                {"banding", dedup::to_string(d.banding)},
                {"window_width", d.window_width}};
}

void read_dedup(const json& j, PipelineSpec& spec) {
    Fields f(j, "dedup");
    auto& d = spec.dedup;
    std::string preset;
    f.read("preset", preset);
    if (preset == "canonical") d = dedup::DedupConfig::canonical();
    else if (preset == "exact") d = dedup::DedupConfig::exact();
    else if (!preset.empty()) throw ConfigError("unknown dedup preset '" + preset + "' (valid: canonical, exact)");
    f.read("enabled", spec.dedup_enabled);
    f.read("shingle_k", d.shingle_k);
    f.read("num_hashes", d.num_hashes);
    f.read("num_bands", d.num_bands);
    f.read("seed", d.seed, 0);
    std::string mode(dedup::to_string(d.mode));
    f.read("mode", mode);
    d.mode = dedup::parse_mode(mode);
    f.read("exact_similarity_min", d.exact_similarity_min);
    f.read("canonicalize_numbers", d.canonicalize_numbers);
    f.read("canonicalize_weekdays", d.canonicalize_weekdays);
    std::string banding(dedup::to_string(d.banding));
    f.read("banding", banding);
    d.banding = dedup::parse_banding(banding);
    f.read("window_width", d.window_width);
    f.finish();
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read failed on " + path.string());
    return ss.str();
}

json counts_json(const StageCounts& c) {
    json dropped = json::object();
    for (const auto& [reason, n] : c.dropped) dropped[std::string(to_string(reason))] = n;
    return json{{"input", c.input}, {"kept", c.kept}, {"dropped", dropped}};
}

StageCounts counts_from(const json& j) {
    StageCounts c;
    c.input = j.at("input").get<std::size_t>();
    c.kept = j.at("kept").get<std::size_t>();
    for (auto it = j.at("dropped").begin(); it != j.at("dropped").end(); ++it) {
        auto reason = parse_drop_reason(it.key());
        if (!reason) throw FormatError("unknown drop reason '" + it.key() + "'", 0);
        c.dropped[*reason] = it.value().get<std::size_t>();
    }
    return c;
}

}  // namespace

std::string_view to_string(Op op) { return info(op).name; }

Op parse_op(std::string_view name) {
    for (const OpInfo& i : kOps) {
        if (i.name == name) return i.op;
    }
    std::string valid;
    for (const OpInfo& i : kOps) valid += (valid.empty() ? "" : ", ") + std::string(i.name);
    throw ConfigError("unknown op '" + std::string(name) + "' (valid: " + valid + ")");
}

Level level_of(Op op) { return info(op).level; }

CharnormParams CharnormParams::books() {
    CharnormParams p;
    p.keep_irab = true;
    p.blocklist = "books";
    return p;
}

bool operator==(const LineParams& a, const LineParams& b) {
    const auto& x = a.policy;
    const auto& y = b.policy;
    return x.special_ratio_enabled == y.special_ratio_enabled && x.special_ratio_max == y.special_ratio_max &&
           x.numeric_symbolic_enabled == y.numeric_symbolic_enabled && x.numeric_ratio_max == y.numeric_ratio_max &&
           x.symbolic_ratio_max == y.symbolic_ratio_max && x.repeat_line_min == y.repeat_line_min &&
           x.leading_short_lines.enabled == y.leading_short_lines.enabled &&
           x.leading_short_lines.min_words == y.leading_short_lines.min_words &&
           x.leading_short_lines.window == y.leading_short_lines.window;
}

Stage make_stage(Op op, std::string name) {
    Stage s;
    s.op = op;
    s.name = name.empty() ? std::string(to_string(op)) : std::move(name);
    switch (op) {
        case Op::Charnorm: s.params = CharnormParams::web(); break;
        case Op::Scrub: s.params = RulesParams{"rules_web"}; break;
        case Op::ScrubPageArtifacts: s.params = PageParams{}; break;
        case Op::DropRatioLines:
        case Op::DropLeadingShortLines: s.params = LineParams{linefilter::LineFilterPolicy::web()}; break;
        case Op::DropRepeatedLines: s.params = RepeatParams{}; break;
        case Op::EvaluateWeb: s.params = EvalParams{docfilter::FilterPolicy::web()}; break;
        case Op::EvaluateBook: s.params = EvalParams{docfilter::FilterPolicy::book()}; break;
        case Op::EvaluateOcr: s.params = EvalParams{docfilter::FilterPolicy::ocr()}; break;
        case Op::EvaluateSocial: s.params = EvalParams{docfilter::FilterPolicy::social()}; break;
        default: break;
    }
    return s;
}

PipelineSpec builtin_spec(SourceKind source) {
    using docfilter::FilterPolicy;
    const LineParams web_lines{linefilter::LineFilterPolicy::web()};
    const LineParams book_lines{linefilter::LineFilterPolicy::books()};

    PipelineSpec spec;
    spec.source = source;
    spec.dedup = dedup::DedupConfig::canonical();
    auto& st = spec.stages;

    const auto web_family = [&](FilterPolicy policy, bool leading_short, bool ratio_lines, bool pii) {
        st.push_back(make_stage(Op::Charnorm));
        st.push_back(make_stage(Op::StripMarkup));
        st.push_back(stage(Op::Scrub, "scrub_web", RulesParams{"rules_web"}));
        if (pii) st.push_back(make_stage(Op::ScrubPii));
        if (ratio_lines) st.push_back(stage(Op::DropRatioLines, "drop_ratio_lines", web_lines));
        if (leading_short) st.push_back(stage(Op::DropLeadingShortLines, "drop_leading_short_lines", web_lines));
        st.push_back(evaluate(Op::EvaluateWeb, std::move(policy)));
        st.push_back(make_stage(Op::CollapseBlankRuns));
    };
    const auto book_stages = [&] {
        st.push_back(stage(Op::Charnorm, "charnorm", CharnormParams::books()));
        st.push_back(stage(Op::Scrub, "scrub_books", RulesParams{"rules_books"}));
    };
    const auto book_tail = [&] {
        st.push_back(make_stage(Op::ScrubPii));
        st.push_back(make_stage(Op::ScrubPageArtifacts));
        st.push_back(stage(Op::DropRatioLines, "drop_ratio_lines", book_lines));
        st.push_back(stage(Op::DropRepeatedLines, "drop_repeated_lines", RepeatParams{3}));
        st.push_back(make_stage(Op::CollapseBlankRuns));
    };

    switch (source) {
        case SourceKind::Web: web_family(FilterPolicy::web(), true, true, false); break;
        case SourceKind::Madlad: web_family(FilterPolicy::madlad(), false, true, false); break;
        case SourceKind::CulturaX: web_family(FilterPolicy::culturax(), false, true, false); break;
        // Blog posts keep numeric and symbolic lines (tables, code, prices).
        case SourceKind::Virgool: web_family(FilterPolicy::virgool(), false, false, true); break;
        case SourceKind::WikiShia:
            web_family(FilterPolicy::wikishia(), false, true, false);
            spec.dedup = dedup::DedupConfig::exact(0.98);
            break;
        case SourceKind::BookText:
        case SourceKind::PaperText:
            // Evaluating first spares the cleanup work on documents that are dropped anyway.
            st.push_back(evaluate(Op::EvaluateBook, FilterPolicy::book()));
            book_stages();
            book_tail();
            break;
        case SourceKind::PaperOcr:
            st.push_back(make_stage(Op::TrimFrontMatter));
            st.push_back(evaluate(Op::EvaluateOcr, FilterPolicy::ocr()));
            book_stages();
            st.push_back(stage(Op::Scrub, "scrub_ocr", RulesParams{"rules_ocr"}));
            book_tail();
            break;
        case SourceKind::Social:
            // Length is judged after links and hashtags are gone.
            st.push_back(make_stage(Op::Charnorm));
            st.push_back(make_stage(Op::ScrubSocial));
            st.push_back(evaluate(Op::EvaluateSocial, FilterPolicy::social()));
            break;
    }
    return spec;
}

PipelineSpec builtin_spec(std::string_view source) { return builtin_spec(source_from_string(source)); }

std::vector<std::string> validate_spec(const PipelineSpec& spec) {
    std::vector<std::string> out;
    const auto& st = spec.stages;

    std::set<std::string> names;
    for (std::size_t i = 0; i < st.size(); ++i) {
        const std::string where = "stage " + std::to_string(i) + " (" + st[i].name + ")";
        if (st[i].name.empty()) out.push_back("params: " + where + " has an empty name");
        if (!names.insert(st[i].name).second || st[i].name == "dedup") out.push_back("duplicate-stage-name: " + where);
        const Stage defaults = make_stage(st[i].op);
        if (st[i].params.index() != defaults.params.index()) {
            out.push_back("params: " + where + " has parameters of the wrong kind for " +
                          std::string(to_string(st[i].op)));
            continue;
        }
        std::vector<std::string> v;
        if (const auto* p = std::get_if<CharnormParams>(&st[i].params)) {
            if (p->max_char_run < 1) v.emplace_back("max_char_run must be at least 1");
            if (p->blocklist != "default" && p->blocklist != "books") v.emplace_back("blocklist must be default or books");
        } else if (const auto* p = std::get_if<RulesParams>(&st[i].params)) {
            if (p->rules.empty()) v.emplace_back("rules must name a rule set");
        } else if (const auto* p = std::get_if<LineParams>(&st[i].params)) {
            v = p->policy.violations();
        } else if (const auto* p = std::get_if<RepeatParams>(&st[i].params)) {
            if (p->min_repeats < 2) v.emplace_back("min_repeats must be at least 2");
        } else if (const auto* p = std::get_if<EvalParams>(&st[i].params)) {
            v = p->policy.violations();
            if (p->vocabulary_min_freq < 1) v.emplace_back("vocabulary_min_freq must be at least 1");
        }
        for (const auto& msg : v) out.push_back("params: " + where + ": " + msg);
    }

    const auto first_of = [&](Level level) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < st.size(); ++i) {
            if (level_of(st[i].op) == level) return i;
        }
        return std::nullopt;
    };
    const auto first_doc = first_of(Level::Document);

    if (spec.source == SourceKind::BookText || spec.source == SourceKind::PaperText) {
        if (!st.empty() && level_of(st.front().op) != Level::Document) {
            out.push_back("document-stage-first: " + std::string(to_string(spec.source)) + " must start with document evaluation, not " +
                          st.front().name);
        }
    } else if (spec.source == SourceKind::PaperOcr) {
        const auto first_char = first_of(Level::Character);
        if (first_char && (!first_doc || *first_char < *first_doc)) {
            out.push_back("document-stage-first: paper_ocr must evaluate documents before " + st[*first_char].name);
        }
    } else if (is_web_family(spec.source)) {
        if (!st.empty() && level_of(st.front().op) != Level::Character) {
            out.push_back("character-stage-first: " + std::string(to_string(spec.source)) + " must start with charnorm, not " +
                          st.front().name);
        }
        if (first_doc) {
            for (std::size_t i = *first_doc + 1; i < st.size(); ++i) {
                if (level_of(st[i].op) == Level::Line && st[i].op != Op::CollapseBlankRuns) {
                    out.push_back("line-stage-after-document: " + st[i].name + " runs after " + st[*first_doc].name);
                }
            }
        }
    }

    for (const auto& v : spec.dedup.violations()) out.push_back(v);
    return out;
}

PipelineSpec parse_spec(std::string_view text) {
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("spec is not valid JSON: ") + e.what());
    }
    Fields top(j, "spec");
    std::string source;
    top.read("source", source);
    if (source.empty()) throw ConfigError("spec: 'source' is required");

    PipelineSpec spec;
    spec.source = source_from_string(source);
    // A spec naming only a source is that source's preset.
    const json* stages = top.get("stages");
    if (!stages) {
        spec = builtin_spec(spec.source);
    } else {
        if (!stages->is_array()) throw ConfigError("spec: 'stages' must be an array");
        PipelineSpec preset = builtin_spec(spec.source);
        spec.dedup = preset.dedup;
        for (std::size_t i = 0; i < stages->size(); ++i) {
            const std::string where = "stage " + std::to_string(i);
            Fields f((*stages)[i], where);
            std::string op;
            f.read("op", op);
            if (op.empty()) throw ConfigError(where + ": 'op' is required");
            std::string name;
            f.read("name", name);
            Stage s = make_stage(parse_op(op), name);
            if (const json* p = f.get("params")) {
                Fields pf(*p, where + " params");
                read_params(pf, s.params);
                pf.finish();
            }
            f.finish();
            spec.stages.push_back(std::move(s));
        }
    }
    if (const json* d = top.get("dedup")) read_dedup(*d, spec);
    top.finish();
    return spec;
}

PipelineSpec load_spec(const std::filesystem::path& path) { return parse_spec(read_file(path)); }

std::string dump_spec(const PipelineSpec& spec) {
    json j;
    j["source"] = to_string(spec.source);
    j["stages"] = json::array();
    for (const Stage& s : spec.stages) {
        json sj{{"op", to_string(s.op)}, {"name", s.name}};
        if (!std::holds_alternative<std::monostate>(s.params)) sj["params"] = params_json(s.params);
        j["stages"].push_back(std::move(sj));
    }
    j["dedup"] = dedup_json(spec);
    return j.dump(2) + "\n";
}

std::string spec_hash(const PipelineSpec& spec) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : dump_spec(spec)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, h >>= 4) out[std::size_t(i)] = digits[h & 0xf];
    return out;
}

Resources Resources::bundled() {
    Resources r;
    r.mapping = charnorm::MappingTable::bundled();
    r.blocked = charnorm::CodepointSet::bundled();
    r.blocked_books = charnorm::CodepointSet::bundled_books();
    for (const std::string& name : scrub::bundled_names()) r.rule_sets.emplace(name, scrub::bundled(name));
    r.markers = std::make_shared<const scrub::MarkerList>(scrub::MarkerList::bundled());
    r.lexicons = docfilter::Lexicons::bundled();
    return r;
}

Resources Resources::from_dir(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw IoError("data directory " + dir.string() + " does not exist");
    Resources r = bundled();
    const auto maybe = [&](const char* rel) -> std::optional<std::string> {
        const fs::path p = dir / rel;
        if (!fs::exists(p)) return std::nullopt;
        return read_file(p);
    };
    if (auto m = maybe("charnorm/mapping.txt")) {
        r.mapping = std::make_shared<const charnorm::MappingTable>(charnorm::MappingTable::parse(*m));
    }
    if (auto b = maybe("charnorm/blocklist.txt")) {
        r.blocked = std::make_shared<const charnorm::CodepointSet>(charnorm::CodepointSet::parse(*b));
    }
    {
        charnorm::CodepointSet books = *r.blocked;
        if (auto b = maybe("charnorm/blocklist_books.txt")) {
            books.merge(charnorm::CodepointSet::parse(*b));
        } else {
            books.merge(*charnorm::CodepointSet::bundled_books());
        }
        r.blocked_books = std::make_shared<const charnorm::CodepointSet>(std::move(books));
    }
    if (fs::is_directory(dir / "rules")) {
        for (const auto& entry : fs::directory_iterator(dir / "rules")) {
            if (entry.path().extension() != ".tsv") continue;
            const std::string name = entry.path().stem().string();
            r.rule_sets.insert_or_assign(name, scrub::RuleSet::parse(name, read_file(entry.path())));
        }
    }
    if (auto m = maybe("rules/front_matter.txt")) {
        r.markers = std::make_shared<const scrub::MarkerList>(scrub::MarkerList::parse(*m));
    }
    if (auto w = maybe("lexicons/stopwords_fa.txt")) {
        r.lexicons.stopwords_fa.clear();
        docfilter::Lexicons::load_words(*w, r.lexicons.stopwords_fa);
    }
    if (auto w = maybe("lexicons/stopwords_ar.txt")) {
        r.lexicons.stopwords_ar.clear();
        docfilter::Lexicons::load_words(*w, r.lexicons.stopwords_ar);
    }
    if (auto w = maybe("lexicons/vocabulary.txt")) docfilter::Lexicons::load_words(*w, r.lexicons.vocabulary);
    return r;
}

const scrub::RuleSet& Resources::rules(std::string_view name) const {
    auto it = rule_sets.find(name);
    if (it == rule_sets.end()) {
        std::string valid;
        for (const auto& [n, _] : rule_sets) valid += (valid.empty() ? "" : ", ") + n;
        throw ConfigError("unknown rule set '" + std::string(name) + "' (available: " + valid + ")");
    }
    return it->second;
}

namespace {

// Result of one stage on one document: new text, or a drop.
struct Step {
    std::string text;
    FilterDecision decision;
};

using StepFn = std::function<Step(const Document&)>;

Step rewrite(std::string text) {
    // A stage that empties a document drops it.
    if (text.empty()) return {std::move(text), FilterDecision::drop(DropReason::TooShort, 0.0, 1.0)};
    return {std::move(text), FilterDecision::keep()};
}

// Resolves a stage's resources up front so errors surface before any document.
// Evaluation stages that calibrate a vocabulary are bound later, per run.
StepFn bind_stage(const Stage& s, const Resources& res, std::shared_ptr<const docfilter::Lexicons> lex) {
    switch (s.op) {
        case Op::Charnorm: {
            const auto& p = std::get<CharnormParams>(s.params);
            charnorm::Options o;
            o.keep_irab = p.keep_irab;
            o.max_char_run = p.max_char_run;
            o.preserve_zwnj = p.preserve_zwnj;
            o.truncate_digit_runs = p.truncate_digit_runs;
            o.max_blank_lines = p.max_blank_lines;
            o.mapping = res.mapping;
            o.blocked = p.blocklist == "books" ? res.blocked_books : res.blocked;
            if (auto v = o.violations(); !v.empty()) throw ConfigError("stage " + s.name + ": " + v.front());
            return [o](const Document& d) { return rewrite(charnorm::normalize(d.text, o)); };
        }
        case Op::StripMarkup:
            return [](const Document& d) { return rewrite(linefilter::strip_markup(d.text)); };
        case Op::Scrub: {
            const scrub::RuleSet* rules = &res.rules(std::get<RulesParams>(s.params).rules);
            return [rules](const Document& d) { return rewrite(scrub::scrub(d.text, *rules).text); };
        }
        case Op::ScrubPii: {
            const scrub::RuleSet* rules = &res.rules("rules_pii");
            return [rules](const Document& d) { return rewrite(scrub::scrub_pii(d.text, *rules).text); };
        }
        case Op::ScrubPageArtifacts: {
            const scrub::RuleSet* rules = &res.rules("rules_page");
            const std::string field = std::get<PageParams>(s.params).title_field;
            return [rules, field](const Document& d) {
                std::optional<std::string_view> title;
                if (auto it = d.metadata.find(field); it != d.metadata.end()) title = it->second;
                return rewrite(scrub::scrub_page_artifacts(d.text, title, *rules).text);
            };
        }
        case Op::ScrubSocial: {
            const scrub::RuleSet* rules = &res.rules("rules_social");
            return [rules](const Document& d) { return rewrite(scrub::scrub_social(d.text, *rules).text); };
        }
        case Op::TrimFrontMatter: {
            auto markers = res.markers;
            return [markers](const Document& d) { return rewrite(scrub::trim_front_matter(d.text, *markers).text); };
        }
        case Op::DropRatioLines: {
            const auto policy = std::get<LineParams>(s.params).policy;
            return [policy](const Document& d) { return rewrite(linefilter::drop_ratio_lines(d.text, policy)); };
        }
        case Op::DropRepeatedLines: {
            const std::size_t n = std::get<RepeatParams>(s.params).min_repeats;
            return [n](const Document& d) { return rewrite(linefilter::drop_repeated_lines(d.text, n)); };
        }
        case Op::DropLeadingShortLines: {
            const auto policy = std::get<LineParams>(s.params).policy;
            return [policy](const Document& d) {
                return rewrite(linefilter::drop_leading_short_lines(d.text, policy));
            };
        }
        case Op::CollapseBlankRuns:
            return [](const Document& d) { return rewrite(linefilter::collapse_blank_runs(d.text)); };
        case Op::EvaluateWeb:
        case Op::EvaluateBook:
        case Op::EvaluateOcr: {
            const auto policy = std::get<EvalParams>(s.params).policy;
            const Op op = s.op;
            return [policy, lex, op](const Document& d) {
                const auto stats = docfilter::compute_stats(d.text, *lex, policy);
                FilterDecision dec = op == Op::EvaluateWeb    ? docfilter::evaluate_web(stats, policy)
                                     : op == Op::EvaluateBook ? docfilter::evaluate_book(stats, policy)
                                                              : docfilter::evaluate_ocr(d, stats, policy);
                return Step{d.text, dec};
            };
        }
        case Op::EvaluateSocial: {
            const auto policy = std::get<EvalParams>(s.params).policy;
            return [policy](const Document& d) { return Step{d.text, docfilter::evaluate_social(d, policy)}; };
        }
    }
    throw Error("unhandled op");
}

bool calibrates(const Stage& s, const Resources& res) {
    const auto* p = std::get_if<EvalParams>(&s.params);
    return p && p->policy.needs_vocabulary() && res.lexicons.vocabulary.empty();
}

void count(StageReport& rep, SourceKind src, std::optional<DropReason> reason) {
    StageCounts& c = rep.by_source[std::string(to_string(src))];
    ++rep.total.input;
    ++c.input;
    if (reason) {
        ++rep.total.dropped[*reason];
        ++c.dropped[*reason];
    } else {
        ++rep.total.kept;
        ++c.kept;
    }
}

}  // namespace

RunResult run(std::vector<Document> corpus, const PipelineSpec& spec, const Resources& resources, unsigned jobs) {
    if (auto v = validate_spec(spec); !v.empty()) {
        std::string msg = "invalid pipeline spec:";
        for (const auto& s : v) msg += "\n  " + s;
        throw ConfigError(msg);
    }
    const auto shared_lex = std::make_shared<const docfilter::Lexicons>(resources.lexicons);
    std::vector<StepFn> steps;
    for (const Stage& s : spec.stages) steps.push_back(bind_stage(s, resources, shared_lex));

    // Every source present in the input gets a row at every stage.
    std::set<std::string> sources;
    for (const Document& d : corpus) sources.insert(std::string(to_string(d.source)));
    const auto new_report = [&](std::string name, std::string op) {
        StageReport r{std::move(name), std::move(op), {}, {}};
        for (const auto& s : sources) r.by_source[s];
        return r;
    };

    RunResult result;
    std::vector<Document> docs = std::move(corpus);
    for (std::size_t si = 0; si < spec.stages.size(); ++si) {
        const Stage& stage = spec.stages[si];
        StepFn step = steps[si];
        if (calibrates(stage, resources) && !docs.empty()) {
            std::vector<std::string_view> texts;
            texts.reserve(docs.size());
            for (const Document& d : docs) texts.emplace_back(d.text);
            auto lex = std::make_shared<docfilter::Lexicons>(resources.lexicons);
            lex->vocabulary = docfilter::build_vocabulary(texts, std::get<EvalParams>(stage.params).vocabulary_min_freq);
            if (lex->vocabulary.empty()) {
                throw ConfigError("stage " + stage.name +
                                  ": too few documents to build a vocabulary; supply lexicons/vocabulary.txt");
            }
            step = bind_stage(stage, resources, std::move(lex));
        }

        std::vector<Step> out(docs.size());
        parallel_for(docs.size(), jobs, [&](std::size_t i) { out[i] = step(docs[i]); });

        StageReport rep = new_report(stage.name, std::string(to_string(stage.op)));
        std::vector<Document> next;
        next.reserve(docs.size());
        for (std::size_t i = 0; i < docs.size(); ++i) {
            const FilterDecision& dec = out[i].decision;
            count(rep, docs[i].source, dec.reason());
            if (dec.dropped()) {
                result.drops.push_back({docs[i].id, docs[i].source, stage.name, *dec.reason(), dec.value(), dec.threshold()});
            } else {
                docs[i].text = std::move(out[i].text);
                next.push_back(std::move(docs[i]));
            }
        }
        result.report.stages.push_back(std::move(rep));
        docs = std::move(next);
    }

    if (spec.dedup_enabled) {
        const double threshold = spec.dedup.mode == dedup::Mode::Exact ? spec.dedup.exact_similarity_min : 0.0;
        std::vector<SourceKind> kinds;
        for (const Document& d : docs) kinds.push_back(d.source);
        std::vector<std::string> ids;
        for (const Document& d : docs) ids.push_back(d.id);

        dedup::DedupResult dr = dedup::dedup_corpus(std::move(docs), spec.dedup, jobs);

        std::map<std::string, double> sim;
        for (const auto& c : dr.report.components) {
            for (const auto& m : c.members) {
                if (m != c.representative) sim[m] = c.max_similarity;
            }
        }
        std::set<std::string> dropped_ids;
        for (const Document& d : dr.dropped) dropped_ids.insert(d.id);

        StageReport rep = new_report("dedup", "dedup");
        for (std::size_t i = 0; i < ids.size(); ++i) {
            const bool dropped = dropped_ids.contains(ids[i]);
            count(rep, kinds[i], dropped ? std::optional(DropReason::Duplicate) : std::nullopt);
            if (dropped) result.drops.push_back({ids[i], kinds[i], "dedup", DropReason::Duplicate, sim[ids[i]], threshold});
        }
        result.report.stages.push_back(std::move(rep));
        result.retained = std::move(dr.retained);
        result.duplicates = std::move(dr.report);
    } else {
        result.retained = std::move(docs);
    }
    return result;
}

std::string format_drop(const DropRecord& d) {
    json j{{"id", d.id},
           {"source", to_string(d.source)},
           {"stage", d.stage},
           {"reason", to_string(d.reason)},
           {"value", d.value},
           {"threshold", d.threshold}};
    return j.dump(-1, ' ', false, json::error_handler_t::strict);
}

DropRecord parse_drop(std::string_view line) {
    try {
        const json j = json::parse(line.begin(), line.end());
        DropRecord d;
        d.id = j.at("id").get<std::string>();
        d.source = source_from_string(j.at("source").get<std::string>());
        d.stage = j.at("stage").get<std::string>();
        const auto reason = parse_drop_reason(j.at("reason").get<std::string>());
        if (!reason) throw FormatError("unknown drop reason", 0);
        d.reason = *reason;
        d.value = j.at("value").get<double>();
        d.threshold = j.at("threshold").get<double>();
        return d;
    } catch (const json::exception& e) {
        throw FormatError(std::string("bad drop record: ") + e.what(), 0);
    } catch (const ConfigError& e) {
        throw FormatError(std::string("bad drop record: ") + e.what(), 0);
    }
}

void write_drop_log(const std::vector<DropRecord>& drops, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    for (const auto& d : drops) out << format_drop(d) << '\n';
    out.flush();
    if (!out) throw IoError("write failed on " + path.string());
}

std::vector<DropRecord> read_drop_log(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<DropRecord> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(parse_drop(line));
        } catch (const FormatError& e) {
            throw FormatError(path.string() + ": " + e.what(), n);
        }
    }
    return out;
}

std::string dump_report(const RunReport& report) {
    json j;
    j["stages"] = json::array();
    for (const auto& st : report.stages) {
        json by = json::object();
        for (const auto& [src, c] : st.by_source) by[src] = counts_json(c);
        j["stages"].push_back(json{{"name", st.name}, {"op", st.op}, {"total", counts_json(st.total)}, {"by_source", by}});
    }
    return j.dump(2) + "\n";
}

RunReport parse_report(std::string_view text) {
    try {
        const json j = json::parse(text.begin(), text.end());
        RunReport r;
        for (const json& s : j.at("stages")) {
            StageReport st;
            st.name = s.at("name").get<std::string>();
            st.op = s.at("op").get<std::string>();
            st.total = counts_from(s.at("total"));
            for (auto it = s.at("by_source").begin(); it != s.at("by_source").end(); ++it) {
                st.by_source[it.key()] = counts_from(it.value());
            }
            r.stages.push_back(std::move(st));
        }
        return r;
    } catch (const json::exception& e) {
        throw FormatError(std::string("bad report: ") + e.what(), 0);
    }
}

RunReport load_report(const std::filesystem::path& path) { return parse_report(read_file(path)); }

}  // namespace refinery::pipeline
