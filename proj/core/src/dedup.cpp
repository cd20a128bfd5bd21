#include "refinery/dedup.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "refinery/docfilter.hpp"
#include "refinery/error.hpp"
#include "refinery/parallel.hpp"
#include "refinery/text.hpp"
#include "refinery/utf8.hpp"

namespace refinery::dedup {

namespace {

constexpr std::uint64_t kEmptyValue = std::numeric_limits<std::uint64_t>::max();
constexpr std::string_view kWeekdaySentinel = "<weekday>";

std::uint64_t fmix64(std::uint64_t k) {
    k ^= k >> 33;
    k *= 0xff51afd7ed558ccdULL;
    k ^= k >> 33;
    k *= 0xc4ceb9fe1a85ec53ULL;
    k ^= k >> 33;
    return k;
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Per-function salts, derived from the seed.
std::vector<std::uint64_t> salts(std::uint64_t seed, std::size_t n) {
    std::vector<std::uint64_t> out(n);
    std::uint64_t state = seed;
    for (auto& s : out) s = splitmix64(state);
    return out;
}

// Weekday names as lexicon keys (no ZWNJ): شنبه .. جمعه.
const std::set<std::string>& weekday_keys() {
    static const std::set<std::string> keys = [] {
        std::set<std::string> k;
        for (std::string_view w : {"شنبه", "یکشنبه", "یک‌شنبه", "دوشنبه", "دو‌شنبه", "سه‌شنبه", "سهشنبه",
                                   "چهارشنبه", "چهار‌شنبه", "پنجشنبه", "پنج‌شنبه", "جمعه"}) {
            k.insert(docfilter::Lexicons::key(w));
        }
        return k;
    }();
    return keys;
}

// First halves of two-word weekday spellings ("سه شنبه").
const std::set<std::string>& weekday_prefix_keys() {
    static const std::set<std::string> keys = [] {
        std::set<std::string> k;
        for (std::string_view w : {"یک", "دو", "سه", "چهار", "پنج"}) k.insert(docfilter::Lexicons::key(w));
        return k;
    }();
    return keys;
}

}  // namespace

std::string_view to_string(Mode m) { return m == Mode::Canonical ? "canonical" : "exact"; }

Mode parse_mode(std::string_view name) {
    if (name == "canonical") return Mode::Canonical;
    if (name == "exact") return Mode::Exact;
    throw ConfigError("unknown dedup mode '" + std::string(name) + "' (valid: canonical, exact)");
}

std::string_view to_string(Banding b) { return b == Banding::Disjoint ? "disjoint" : "sliding"; }

Banding parse_banding(std::string_view name) {
    if (name == "disjoint") return Banding::Disjoint;
    if (name == "sliding") return Banding::Sliding;
    throw ConfigError("unknown banding '" + std::string(name) + "' (valid: disjoint, sliding)");
}

std::size_t DedupConfig::band_stride() const {
    if (banding == Banding::Disjoint) return rows_per_band();
    if (num_bands <= 1 || window_width >= num_hashes) return 0;
    return (num_hashes - window_width) / (num_bands - 1);
}

DedupConfig DedupConfig::canonical() { return DedupConfig{}; }

DedupConfig DedupConfig::exact(double min_similarity) {
    DedupConfig c;
    c.mode = Mode::Exact;
    c.exact_similarity_min = min_similarity;
    c.canonicalize_numbers = false;
    c.canonicalize_weekdays = false;
    return c;
}

std::vector<std::string> DedupConfig::violations() const {
    std::vector<std::string> out;
    if (shingle_k < 1) out.emplace_back("range: shingle_k must be at least 1");
    if (num_hashes < 1) out.emplace_back("range: num_hashes must be at least 1");
    if (num_bands < 1) out.emplace_back("range: num_bands must be at least 1");
    if (num_bands >= 1 && num_hashes % num_bands != 0) {
        out.emplace_back("divisibility: num_hashes (" + std::to_string(num_hashes) + ") is not divisible by num_bands (" +
                         std::to_string(num_bands) + ")");
    }
    if (!(exact_similarity_min >= 0.0 && exact_similarity_min <= 1.0)) {
        out.emplace_back("range: exact_similarity_min must be in [0,1]");
    }
    if (banding == Banding::Sliding && (window_width <= rows_per_band() || window_width > num_hashes)) {
        out.emplace_back("sliding-window: window_width must exceed rows_per_band and not exceed num_hashes");
    }
    return out;
}

std::string canonicalize(std::string_view body, const DedupConfig& cfg) {
    const std::u32string cps = utf8::decode(body);
    std::vector<std::string> toks;
    for (auto tok : text::tokens(cps)) {
        if (cfg.mode == Mode::Exact) {
            toks.push_back(utf8::encode(tok));
            continue;
        }
        std::u32string kept;
        for (char32_t cp : tok) {
            if (!cfg.canonicalize_numbers || text::is_letter(cp)) kept.push_back(cp);
        }
        if (kept.empty() || (kept.size() == 1 && (kept[0] == text::kZwnj || kept[0] == 0x200D))) continue;
        toks.push_back(utf8::encode(kept));
    }

    if (cfg.mode == Mode::Canonical && cfg.canonicalize_weekdays) {
        std::vector<std::string> merged;
        for (std::size_t i = 0; i < toks.size(); ++i) {
            const std::string k = docfilter::Lexicons::key(std::string_view(toks[i]));
            if (weekday_keys().contains(k)) {
                merged.emplace_back(kWeekdaySentinel);
                continue;
            }
            if (i + 1 < toks.size() && weekday_prefix_keys().contains(k) &&
                docfilter::Lexicons::key(std::string_view(toks[i + 1])) == docfilter::Lexicons::key("شنبه")) {
                merged.emplace_back(kWeekdaySentinel);
                ++i;
                continue;
            }
            merged.push_back(toks[i]);
        }
        toks = std::move(merged);
    }

    std::string out;
    for (const std::string& t : toks) {
        if (!out.empty()) out.push_back(' ');
        out += t;
    }
    return out;
}

std::vector<std::string> shingles(std::string_view body, std::size_t k) {
    if (k < 1) throw ConfigError("shingle size must be at least 1");
    const std::u32string cps = utf8::decode(body);
    std::vector<std::string> words;
    for (auto tok : text::tokens(cps)) words.push_back(utf8::encode(tok));

    std::vector<std::string> out;
    if (words.empty()) return out;
    const std::size_t width = std::min(k, words.size());
    for (std::size_t i = 0; i + width <= words.size(); ++i) {
        std::string sh = words[i];
        for (std::size_t j = i + 1; j < i + width; ++j) {
            sh.push_back(' ');
            sh += words[j];
        }
        out.push_back(std::move(sh));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::uint64_t hash_shingle(std::string_view shingle) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : shingle) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return fmix64(h ^ shingle.size());
}

MinHashSignature signature_from_hashes(std::span<const std::uint64_t> shingle_hashes, const DedupConfig& cfg,
                                       std::string doc_id) {
    MinHashSignature sig;
    sig.doc_id = std::move(doc_id);
    sig.values.assign(cfg.num_hashes, kEmptyValue);
    if (shingle_hashes.empty()) {
        sig.empty = true;
        return sig;
    }
    const std::vector<std::uint64_t> salt = salts(cfg.seed, cfg.num_hashes);
    for (std::uint64_t base : shingle_hashes) {
        for (std::size_t i = 0; i < cfg.num_hashes; ++i) {
            const std::uint64_t h = fmix64(base ^ salt[i]);
            if (h < sig.values[i]) sig.values[i] = h;
        }
    }
    return sig;
}

MinHashSignature signature(std::span<const std::string> shingle_set, const DedupConfig& cfg, std::string doc_id) {
    std::vector<std::uint64_t> hashes;
    hashes.reserve(shingle_set.size());
    for (const std::string& s : shingle_set) hashes.push_back(hash_shingle(s));
    return signature_from_hashes(hashes, cfg, std::move(doc_id));
}

double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b) {
    if (a.values.size() != b.values.size()) {
        throw std::invalid_argument("signatures have different lengths (" + std::to_string(a.values.size()) + " vs " +
                                    std::to_string(b.values.size()) + ")");
    }
    if (a.empty || b.empty || a.values.empty()) return 0.0;
    std::size_t agree = 0;
    for (std::size_t i = 0; i < a.values.size(); ++i) agree += a.values[i] == b.values[i] ? 1 : 0;
    return double(agree) / double(a.values.size());
}

std::vector<std::uint64_t> band_keys(const MinHashSignature& sig, const DedupConfig& cfg) {
    const std::size_t width = cfg.band_width();
    const std::size_t stride = cfg.band_stride();
    std::vector<std::uint64_t> keys;
    keys.reserve(cfg.num_bands);
    for (std::size_t b = 0; b < cfg.num_bands; ++b) {
        std::uint64_t h = fmix64(cfg.seed ^ (0x9e3779b97f4a7c15ULL * (b + 1)));
        const std::size_t start = b * stride;
        for (std::size_t i = start; i < start + width && i < sig.values.size(); ++i) {
            h = fmix64(h ^ sig.values[i]) + 0x2545f4914f6cdd1dULL;
        }
        keys.push_back(h);
    }
    return keys;
}

DuplicateReport cluster(std::span<const ClusterInput> docs, const DedupConfig& cfg) {
    UnionFind uf(docs.size());
    std::map<std::pair<std::size_t, std::size_t>, double> edges;
    std::set<std::pair<std::size_t, std::size_t>> rejected;

    const auto consider = [&](std::size_t i, std::size_t j) {
        if (i > j) std::swap(i, j);
        const auto key = std::make_pair(i, j);
        if (edges.contains(key) || rejected.contains(key)) return;
        const double sim = estimate_jaccard(docs[i].signature, docs[j].signature);
        if (cfg.mode == Mode::Exact && sim < cfg.exact_similarity_min) {
            rejected.insert(key);
            return;
        }
        edges.emplace(key, sim);
        uf.unite(i, j);
    };

    for (std::size_t band = 0; band < cfg.num_bands; ++band) {
        std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
        for (std::size_t i = 0; i < docs.size(); ++i) {
            if (docs[i].signature.empty || band >= docs[i].keys.size()) continue;
            buckets[docs[i].keys[band]].push_back(i);
        }
        for (auto& [key, members] : buckets) {
            if (members.size() < 2) continue;
            // Star edges hang off the smallest id, so reported similarities do not depend on input order.
            std::sort(members.begin(), members.end(),
                      [&](std::size_t x, std::size_t y) { return docs[x].doc_id < docs[y].doc_id; });
            if (cfg.mode == Mode::Canonical) {
                for (std::size_t m = 1; m < members.size(); ++m) consider(members[0], members[m]);
            } else {
                for (std::size_t x = 0; x < members.size(); ++x) {
                    for (std::size_t y = x + 1; y < members.size(); ++y) consider(members[x], members[y]);
                }
            }
        }
    }

    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (const auto& [pair, sim] : edges) {
        groups[uf.find(pair.first)];
    }
    for (std::size_t i = 0; i < docs.size(); ++i) {
        auto it = groups.find(uf.find(i));
        if (it != groups.end()) it->second.push_back(i);
    }
    std::map<std::size_t, double> max_sim;
    for (const auto& [pair, sim] : edges) {
        double& m = max_sim[uf.find(pair.first)];
        m = std::max(m, sim);
    }

    DuplicateReport report;
    for (const auto& [root, idx] : groups) {
        DuplicateComponent c;
        for (std::size_t i : idx) c.members.push_back(docs[i].doc_id);
        std::sort(c.members.begin(), c.members.end());
        c.representative = c.members.front();
        c.max_similarity = max_sim[root];
        report.components.push_back(std::move(c));
    }
    std::sort(report.components.begin(), report.components.end(),
              [](const auto& x, const auto& y) { return x.representative < y.representative; });
    for (const auto& [pair, sim] : edges) {
        std::string a = docs[pair.first].doc_id;
        std::string b = docs[pair.second].doc_id;
        if (b < a) std::swap(a, b);
        report.edges.push_back({std::move(a), std::move(b), sim});
    }
    std::sort(report.edges.begin(), report.edges.end(),
              [](const auto& x, const auto& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
    return report;
}

std::vector<std::string> DuplicateReport::dropped_ids() const {
    std::vector<std::string> out;
    for (const auto& c : components) {
        for (const auto& m : c.members) {
            if (m != c.representative) out.push_back(m);
        }
    }
    return out;
}

DedupResult dedup_corpus(std::vector<Document> docs, const DedupConfig& cfg, unsigned jobs) {
    if (auto v = cfg.violations(); !v.empty()) throw ConfigError("invalid dedup config: " + v.front());

    std::vector<ClusterInput> inputs(docs.size());
    parallel_for(docs.size(), jobs, [&](std::size_t i) {
        const std::string canon = canonicalize(docs[i].text, cfg);
        const auto sh = shingles(canon, cfg.shingle_k);
        inputs[i].doc_id = docs[i].id;
        inputs[i].signature = signature(sh, cfg, docs[i].id);
        inputs[i].keys = band_keys(inputs[i].signature, cfg);
    });

    std::map<SourceKind, std::vector<std::size_t>> partitions;
    for (std::size_t i = 0; i < docs.size(); ++i) partitions[docs[i].source].push_back(i);

    DedupResult result;
    std::vector<bool> drop(docs.size(), false);
    for (const auto& [source, idx] : partitions) {
        std::vector<ClusterInput> part;
        part.reserve(idx.size());
        for (std::size_t i : idx) part.push_back(inputs[i]);
        DuplicateReport r = cluster(part, cfg);

        std::unordered_map<std::string, std::size_t> pos;
        for (std::size_t k = 0; k < idx.size(); ++k) pos.emplace(docs[idx[k]].id, idx[k]);
        for (const std::string& id : r.dropped_ids()) drop[pos.at(id)] = true;

        for (auto& c : r.components) result.report.components.push_back(std::move(c));
        for (auto& e : r.edges) result.report.edges.push_back(std::move(e));
    }
    std::sort(result.report.components.begin(), result.report.components.end(),
              [](const auto& x, const auto& y) { return x.representative < y.representative; });
    std::sort(result.report.edges.begin(), result.report.edges.end(),
              [](const auto& x, const auto& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });

    for (std::size_t i = 0; i < docs.size(); ++i) {
        (drop[i] ? result.dropped : result.retained).push_back(std::move(docs[i]));
    }
    return result;
}

std::string format_component(const DuplicateComponent& c, std::size_t component_id) {
    nlohmann::ordered_json rec;
    rec["component_id"] = component_id;
    rec["members"] = c.members;
    rec["representative"] = c.representative;
    rec["max_similarity"] = c.max_similarity;
    return rec.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::strict);
}

void write_duplicate_report(const DuplicateReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    for (std::size_t i = 0; i < report.components.size(); ++i) out << format_component(report.components[i], i) << '\n';
    out.flush();
    if (!out) throw IoError("write failed on " + path.string());
}

UnionFind::UnionFind(std::size_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0); }

std::size_t UnionFind::find(std::size_t x) {
    while (parent_[x] != x) {
        parent_[x] = parent_[parent_[x]];
        x = parent_[x];
    }
    return x;
}

bool UnionFind::unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
}

}  // namespace refinery::dedup
