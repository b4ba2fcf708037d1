#include <benchmark/benchmark.h>

#include "manyminds/process.hpp"
#include "manyminds/quantum.hpp"

#include <cmath>

using namespace mm::quantum;

namespace {

double gaussian(mm::process::CounterRng& rng) {
    double u1 = std::max(rng.next_double(), 1e-15);
    double u2 = rng.next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Matrix random_density(int dim, mm::process::CounterRng& rng) {
    Matrix g(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = Complex(gaussian(rng), gaussian(rng));
    Matrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return 0.5 * (rho + Matrix(rho.adjoint()));
}

} // namespace

static void RelEntropy(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    mm::process::CounterRng rng(1, 0);
    AlgebraState s(random_density(dim, rng), AlgebraSpec::full(TensorSpace({dim})));
    AlgebraState r(random_density(dim, rng), AlgebraSpec::full(TensorSpace({dim})));
    for (auto _ : state) benchmark::DoNotOptimize(rel_entropy(s, r));
}
BENCHMARK(RelEntropy)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

static void PartialTrace(benchmark::State& state) {
    mm::process::CounterRng rng(2, 0);
    TensorSpace space({4, 4, 4});
    Matrix rho = random_density(64, rng);
    for (auto _ : state) benchmark::DoNotOptimize(partial_trace(rho, space, {0, 2}));
}
BENCHMARK(PartialTrace);

static void AlgebraClosure(benchmark::State& state) {
    mm::process::CounterRng rng(3, 0);
    TensorSpace space({2, 2});
    Vector v1(2), v2(2);
    v1 << 0.8, 0.6;
    v2 << 0.6, -0.8;
    Matrix p = embed(v1 * v1.adjoint(), space, {0});
    Matrix q = embed(v2 * v2.adjoint(), space, {1});
    for (auto _ : state) {
        AlgebraSpec alg = AlgebraSpec::generated(space, {p, q});
        benchmark::DoNotOptimize(alg.closure_basis().size());
    }
}
BENCHMARK(AlgebraClosure);

static void ConditionalExpectation(benchmark::State& state) {
    mm::process::CounterRng rng(4, 0);
    TensorSpace space({2, 2, 2});
    AlgebraSpec sub = AlgebraSpec::full_on_factors(space, {0, 2});
    Matrix x = random_density(8, rng);
    for (auto _ : state) benchmark::DoNotOptimize(sub.conditional_expectation(x));
}
BENCHMARK(ConditionalExpectation);

BENCHMARK_MAIN();
