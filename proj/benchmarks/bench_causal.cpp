#include <benchmark/benchmark.h>

#include "manyminds/causal.hpp"
#include "manyminds/process.hpp"

using namespace mm::causal;

namespace {

Region box_at(double t, double x) {
    Event lo(4), hi(4);
    lo << t, x, 0, 0;
    hi << t + 0.5, x + 0.5, 0.5, 0.5;
    return Region::box(lo, hi);
}

std::vector<Region> region_pool(std::size_t count) {
    mm::process::CounterRng rng(5, 0);
    std::vector<Region> pool;
    for (std::size_t i = 0; i < count; ++i) {
        Event c(4);
        for (int k = 0; k < 4; ++k) c[k] = (rng.next_double() - 0.5) * 10;
        if (i % 2 == 0) {
            Event half = Event::Constant(4, 0.3 + rng.next_double());
            pool.push_back(Region::box(c - half, c + half));
        } else {
            pool.push_back(Region::ball(c, 0.3 + rng.next_double()));
        }
    }
    return pool;
}

} // namespace

static void RelationBoxBox(benchmark::State& state) {
    Region a = box_at(0, 0);
    Region b = box_at(5, 1);
    for (auto _ : state) benchmark::DoNotOptimize(causal_relation(a, b));
}
BENCHMARK(RelationBoxBox);

static void RelationMixedShapes(benchmark::State& state) {
    auto pool = region_pool(64);
    std::size_t i = 0;
    for (auto _ : state) {
        const Region& a = pool[i % pool.size()];
        const Region& b = pool[(i * 7 + 3) % pool.size()];
        benchmark::DoNotOptimize(causal_relation(a, b));
        ++i;
    }
}
BENCHMARK(RelationMixedShapes);

static void DocketOfChain(benchmark::State& state) {
    std::vector<Region> chain;
    for (int i = 0; i < static_cast<int>(state.range(0)); ++i)
        chain.push_back(box_at(i * 10.0, 0));
    for (auto _ : state) benchmark::DoNotOptimize(docket_of(chain));
}
BENCHMARK(DocketOfChain)->Arg(4)->Arg(8)->Arg(16);

BENCHMARK_MAIN();
