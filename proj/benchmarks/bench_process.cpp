#include <benchmark/benchmark.h>

#include "manyminds/process.hpp"

using namespace mm::process;

static void CounterDraws(benchmark::State& state) {
    CounterRng rng(1, 0);
    for (auto _ : state) benchmark::DoNotOptimize(rng.next_double());
}
BENCHMARK(CounterDraws);

static void CaricatureWalks(benchmark::State& state) {
    CaricatureSpec spec;
    spec.p = 0.2;
    spec.q = 0.8;
    spec.x = 10.0;
    spec.variant = 'A';
    for (auto _ : state)
        benchmark::DoNotOptimize(
            caricature_simulate(spec, static_cast<std::uint64_t>(state.range(0)), 7).f_a);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(CaricatureWalks)->Arg(1000)->Arg(100000);

static void TwoOutcomeEnsemble(benchmark::State& state) {
    auto evaluator = [](const std::string& node) -> JumpTable {
        JumpTable table;
        if (node != "root") {
            table.absorbing = true;
            return table;
        }
        table.distribution = mm::apriori::jump_distribution(1.0, {{"a", 0.3}, {"b", 0.7}});
        return table;
    };
    RunOptions opts;
    opts.trajectories = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(run_trajectories("root", evaluator, opts).stats.count);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(TwoOutcomeEnsemble)->Arg(1000)->Arg(10000);

BENCHMARK_MAIN();
