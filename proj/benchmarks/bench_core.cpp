#include "demosel/baselines.hpp"
#include "demosel/encoder.hpp"
#include "demosel/metrics.hpp"
#include "demosel/policy.hpp"
#include "demosel/sim_generator.hpp"

#include <benchmark/benchmark.h>

using namespace demosel;

namespace {

const CorpusSplit& corpus() {
    static const CorpusSplit s = synth_corpus(0, 200, 200, 100);
    return s;
}

struct PolicyFixture {
    EmbeddingTable table;
    CandidatePool pool;
    PolicyParams params;

    explicit PolicyFixture(std::size_t dim)
        : table(hash_table(corpus(), dim, 0)),
          pool(table, ids_of(corpus().candidates)),
          params(PolicyParams::identity(dim)) {}
};

void BM_Sample(benchmark::State& state) {
    PolicyFixture f(static_cast<std::size_t>(state.range(0)));
    const auto& x = f.table.at(corpus().train[0].id);
    Rng rng(1);
    for (auto _ : state) benchmark::DoNotOptimize(sample_demonstration(f.params, f.pool, x, 5, rng));
}
BENCHMARK(BM_Sample)->Arg(64)->Arg(256);

void BM_GradLogp(benchmark::State& state) {
    PolicyFixture f(static_cast<std::size_t>(state.range(0)));
    const auto& x = f.table.at(corpus().train[0].id);
    Rng rng(1);
    const auto s = sample_demonstration(f.params, f.pool, x, 5, rng);
    for (auto _ : state) benchmark::DoNotOptimize(grad_logp(f.params, f.pool, x, s));
}
BENCHMARK(BM_GradLogp)->Arg(64)->Arg(256);

void BM_HashFeaturize(benchmark::State& state) {
    const auto& c = corpus().train[0];
    for (auto _ : state) benchmark::DoNotOptimize(hash_featurize(c, 256, 0));
}
BENCHMARK(BM_HashFeaturize);

void BM_ScorePair(benchmark::State& state) {
    const auto& c = corpus().dev[0];
    const auto hyp = c.incomplete + " and something more";
    for (auto _ : state) benchmark::DoNotOptimize(score_pair(hyp, *c.rewrite, c.incomplete));
}
BENCHMARK(BM_ScorePair);

void BM_Bm25Select(benchmark::State& state) {
    Bm25Index index(corpus().candidates, {});
    const auto& c = corpus().dev[0];
    for (auto _ : state) benchmark::DoNotOptimize(bm25_select(index, c, 5));
}
BENCHMARK(BM_Bm25Select);

void BM_SimGenerate(benchmark::State& state) {
    CaseIndex index(corpus());
    const auto& c = corpus().dev[0];
    const auto demos = ids_of(corpus().candidates);
    const std::vector<std::string> five(demos.begin(), demos.begin() + 5);
    for (auto _ : state) benchmark::DoNotOptimize(sim_generate(index, c.id, five, 3));
}
BENCHMARK(BM_SimGenerate);

}  // namespace

BENCHMARK_MAIN();
