#include <benchmark/benchmark.h>

#include "manyminds/structures.hpp"

using namespace mm::structures;
using mm::causal::Relation;

static void SuccessorsOneNew(benchmark::State& state) {
    SwitchingStructure s = minimal_structure();
    SuccessorOptions opts;
    for (auto _ : state) benchmark::DoNotOptimize(determination_successors(s, opts).size());
}
BENCHMARK(SuccessorsOneNew);

static void SuccessorsNewSwitch(benchmark::State& state) {
    SwitchingStructure s = minimal_structure();
    SuccessorOptions opts;
    opts.alphabet = {Relation::Spacelike};
    for (auto _ : state) benchmark::DoNotOptimize(switch_successors(s, opts).size());
}
BENCHMARK(SuccessorsNewSwitch);

static void Canonicalize(benchmark::State& state) {
    // Two interchangeable switches: the orbit has nontrivial interleavings.
    SwitchingStructure s;
    std::vector<std::vector<Relation>> rel(8, std::vector<Relation>(8, Relation::Spacelike));
    s.docket = mm::causal::Docket(std::move(rel));
    s.phi = {1, 2, -1, -2, 1, 2, -1, -2};
    for (auto _ : state) benchmark::DoNotOptimize(canonicalize(s));
}
BENCHMARK(Canonicalize);

static void ImmediateSuccessors(benchmark::State& state) {
    SwitchingStructure s = minimal_structure();
    SuccessorOptions opts;
    opts.alphabet = {Relation::Spacelike};
    for (auto _ : state) benchmark::DoNotOptimize(immediate_successors(s, opts).size());
}
BENCHMARK(ImmediateSuccessors);

BENCHMARK_MAIN();
