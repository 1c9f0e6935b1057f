#include <benchmark/benchmark.h>

#include "hmf/analytic.hpp"
#include "hmf/field.hpp"

using namespace hmf;

static void BM_factor(benchmark::State& state) {
    RingElement x(2, 8, 4);  // q^5
    RingElement y(2, 105, 0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(factor(x));
        benchmark::DoNotOptimize(factor(y));
    }
}
BENCHMARK(BM_factor);

static void BM_canonical_rep(benchmark::State& state) {
    // a far-from-canonical associate: q^5 * eps^8
    RingElement x = RingElement(2, 8, 4) * pow(RingElement(2, 1, 1), 8);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            canonical_rep_mod_squared_units(totally_positive_associate(x)));
}
BENCHMARK(BM_canonical_rep);

static void BM_ideal_reps(benchmark::State& state) {
    long bound = state.range(0);
    for (auto _ : state) benchmark::DoNotOptimize(ideal_reps_up_to_norm(2, bound));
    state.SetComplexityN(bound);
}
BENCHMARK(BM_ideal_reps)->Arg(100)->Arg(400)->Arg(1600)->Complexity();

BENCHMARK_MAIN();
