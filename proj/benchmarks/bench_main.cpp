#include <benchmark/benchmark.h>

#include "refinery/charnorm.hpp"
#include "refinery/dedup.hpp"
#include "refinery/docfilter.hpp"
#include "refinery/pipeline.hpp"
#include "refinery/scrub.hpp"
#include "refinery/utf8.hpp"
#include "synth.hpp"

using namespace refinery;

namespace {

const std::vector<Document>& corpus() {
    static const auto docs = synth::web_corpus(2000, 99);
    return docs;
}

std::size_t corpus_bytes() {
    std::size_t n = 0;
    for (const auto& d : corpus()) n += d.text.size();
    return n;
}

void BM_Normalize(benchmark::State& state) {
    const auto opts = charnorm::Options::web();
    for (auto _ : state) {
        for (const auto& d : corpus()) benchmark::DoNotOptimize(charnorm::normalize(d.text, opts));
    }
    state.SetBytesProcessed(std::int64_t(state.iterations() * corpus_bytes()));
}
BENCHMARK(BM_Normalize)->Unit(benchmark::kMillisecond);

void BM_ScrubWeb(benchmark::State& state) {
    const auto& rules = scrub::bundled("rules_web");
    for (auto _ : state) {
        for (const auto& d : corpus()) benchmark::DoNotOptimize(scrub::scrub(d.text, rules));
    }
    state.SetBytesProcessed(std::int64_t(state.iterations() * corpus_bytes()));
}
BENCHMARK(BM_ScrubWeb)->Unit(benchmark::kMillisecond);

void BM_DocStats(benchmark::State& state) {
    const auto lex = docfilter::Lexicons::bundled();
    const auto policy = docfilter::FilterPolicy::web();
    for (auto _ : state) {
        for (const auto& d : corpus()) benchmark::DoNotOptimize(docfilter::compute_stats(d.text, lex, policy));
    }
    state.SetBytesProcessed(std::int64_t(state.iterations() * corpus_bytes()));
}
BENCHMARK(BM_DocStats)->Unit(benchmark::kMillisecond);

void BM_Signature(benchmark::State& state) {
    dedup::DedupConfig cfg;
    cfg.num_hashes = std::size_t(state.range(0));
    for (auto _ : state) {
        for (const auto& d : corpus()) {
            const auto sh = dedup::shingles(dedup::canonicalize(d.text, cfg), cfg.shingle_k);
            benchmark::DoNotOptimize(dedup::signature(sh, cfg));
        }
    }
    state.SetItemsProcessed(std::int64_t(state.iterations() * corpus().size()));
}
BENCHMARK(BM_Signature)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_WebPipeline(benchmark::State& state) {
    const auto spec = pipeline::builtin_spec(SourceKind::Web);
    const auto res = pipeline::Resources::bundled();
    for (auto _ : state) {
        benchmark::DoNotOptimize(pipeline::run(corpus(), spec, res, unsigned(state.range(0))));
    }
    state.SetItemsProcessed(std::int64_t(state.iterations() * corpus().size()));
}
BENCHMARK(BM_WebPipeline)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

// The distro libbenchmark_main.a ships LTO bytecode from another compiler release.
BENCHMARK_MAIN();
