#include <benchmark/benchmark.h>

#include "hmf/residue.hpp"

using namespace hmf;

namespace {

RingElement q_power(int n) {
    RingElement q(2, 0, 1);
    return canonical_rep_mod_squared_units(totally_positive_associate(
        pow(q, static_cast<unsigned long>(n))));
}

}  // namespace

static void BM_residue_ring(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    RingElement c = q_power(n);
    for (auto _ : state) benchmark::DoNotOptimize(ResidueRing(c));
}
BENCHMARK(BM_residue_ring)->Arg(8)->Arg(12)->Arg(16);

// cached lookup: the cost everything downstream actually pays
static void BM_unit_group_cached(benchmark::State& state) {
    RingElement c = q_power(14);
    unit_group(c);
    for (auto _ : state) benchmark::DoNotOptimize(unit_group(c));
}
BENCHMARK(BM_unit_group_cached);

static void BM_element_order(benchmark::State& state) {
    ResidueRing ring(q_power(14));
    RingElement g(2, 1, 1);
    for (auto _ : state) benchmark::DoNotOptimize(element_order(ring, g));
}
BENCHMARK(BM_element_order);

static void BM_char_eval(benchmark::State& state) {
    DirichletCharacter phi = epsilon_t(RingElement(2, 2, 1));
    RingElement x(2, 3, 4);
    for (auto _ : state) benchmark::DoNotOptimize(char_eval(phi, x));
}
BENCHMARK(BM_char_eval);

BENCHMARK_MAIN();
