#include <benchmark/benchmark.h>

#include "hmf/analytic.hpp"
#include "hmf/qexp.hpp"

using namespace hmf;

namespace {

Box int_box(long x1, long x2) {
    return {field_value(RingElement(2, x1, 0)), field_value(RingElement(2, x2, 0))};
}

}  // namespace

static void BM_theta_series(benchmark::State& state) {
    long x = state.range(0);
    DirichletCharacter triv = epsilon_t(RingElement(2, 1, 0));
    RingElement t(2, 1, 0);
    for (auto _ : state) benchmark::DoNotOptimize(theta_chi_t(triv, t, int_box(x, x)));
    state.SetComplexityN(x);
}
BENCHMARK(BM_theta_series)->Arg(30)->Arg(60)->Arg(120)->Complexity()
    ->Unit(benchmark::kMillisecond);

static void BM_hecke_image(benchmark::State& state) {
    DirichletCharacter triv = epsilon_t(RingElement(2, 1, 0));
    FourierExpansion f = theta_chi_t(triv, RingElement(2, 1, 0), int_box(90, 90));
    RingElement p(2, 3, 0), c(2, 4, 0);
    for (auto _ : state) benchmark::DoNotOptimize(op_T_p2(f, p, triv, c));
}
BENCHMARK(BM_hecke_image)->Unit(benchmark::kMillisecond);

static void BM_theta_eval(benchmark::State& state) {
    int precision = static_cast<int>(state.range(0));
    UpperHalfPoint z{Complex(0.3, 0.9), Complex(-0.2, 1.1)};
    for (auto _ : state) benchmark::DoNotOptimize(theta_eval(2, z, precision));
}
BENCHMARK(BM_theta_eval)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

static void BM_theta_series_eval(benchmark::State& state) {
    DirichletCharacter phi = epsilon_t(RingElement(2, 2, 1));
    RingElement t(2, 1, 0);
    UpperHalfPoint z{Complex(0.1, 1.2), Complex(0.0, 0.8)};
    for (auto _ : state)
        benchmark::DoNotOptimize(theta_series_eval(phi, t, z, 10));
}
BENCHMARK(BM_theta_series_eval)->Unit(benchmark::kMillisecond);

static void BM_automorphy_closed_form(benchmark::State& state) {
    FieldContext ctx = make_field(2);
    QuadVal delta = field_value(ctx.delta);
    QuadVal one = QuadVal::from_rational(2, 1);
    // a gentle lower-triangular-plus-translation element of the theta group
    MatrixOverF g{one, QuadVal(2, Rat(0), Rat(0)),
                  delta * QuadVal::from_rational(2, 2), one};
    UpperHalfPoint z{Complex(0.05, 1.1), Complex(-0.05, 0.9)};
    for (auto _ : state) benchmark::DoNotOptimize(h_garrett(g, z));
}
BENCHMARK(BM_automorphy_closed_form);

BENCHMARK_MAIN();
