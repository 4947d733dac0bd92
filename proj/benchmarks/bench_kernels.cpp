#include <benchmark/benchmark.h>

#include "kinlr/dlr.hpp"
#include "kinlr/reference.hpp"
#include "kinlr/sat.hpp"

using namespace kinlr;

namespace {

struct Landau {
  ProblemSpec p;
  PhaseGrid g;
  LowRankState s;
  explicit Landau(Index n, Index r)
      : g(make_grids(p, n, n, 6.0)), s(initial_condition(p, g, TruncationPolicy::fixed(r), 1)) {}
};

}  // namespace

static void BM_Round(benchmark::State& st) {
  const Landau l(st.range(0), st.range(1));
  const FactoredSum fs = sat_rhs_terms(l.s, efield(l.s), SchemeConfig{});
  for (auto _ : st) benchmark::DoNotOptimize(round(fs, TruncationPolicy::tolerance(1e-8), l.g));
}
BENCHMARK(BM_Round)->Args({64, 8})->Args({256, 8})->Args({256, 16});

static void BM_BugAugmentedStep(benchmark::State& st) {
  const Landau l(st.range(0), st.range(1));
  for (auto _ : st) {
    benchmark::DoNotOptimize(
        step_bug_augmented(l.s, 5e-3, SchemeConfig{}, TruncationPolicy::tolerance(1e-6)));
  }
}
BENCHMARK(BM_BugAugmentedStep)->Args({64, 8})->Args({256, 8});

static void BM_SatEulerStep(benchmark::State& st) {
  const Landau l(st.range(0), st.range(1));
  for (auto _ : st) {
    benchmark::DoNotOptimize(
        step_sat_euler(l.s, 5e-3, SchemeConfig{}, TruncationPolicy::tolerance(1e-6)));
  }
}
BENCHMARK(BM_SatEulerStep)->Args({64, 8})->Args({256, 8});

static void BM_DenseRhs(benchmark::State& st) {
  const Landau l(st.range(0), 1);
  const Matrix F = to_full(l.s);
  const Vector E = efield(l.s);
  for (auto _ : st) benchmark::DoNotOptimize(dense_rhs(F, l.g, E, SchemeConfig{}));
}
BENCHMARK(BM_DenseRhs)->Arg(64)->Arg(256);
BENCHMARK_MAIN();
