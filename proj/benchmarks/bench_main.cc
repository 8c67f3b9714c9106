// bench_main.cc - Micro-benchmarks for the hot paths: exact LP solves,
// grid restriction, and transport solves (added as modules land).

#include <benchmark/benchmark.h>

#include "fusion/lp.hpp"
#include "fusion/measure.hpp"

using namespace fusion;

static void BM_RationalLpSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  LinearProgram lp(n);
  for (int j = 0; j < n; ++j) {
    lp.objective[j] = Rat(j % 5 + 1);
    lp.set_range(j, Rat(0), Rat(3));
  }
  Vec row(n, Rat(1));
  lp.add_row(row, RowSense::LE, Rat(n) / 2);
  for (auto _ : state) {
    LpSolution sol = lp_solve(lp, LpMode::Rational);
    benchmark::DoNotOptimize(sol.objective);
  }
}
BENCHMARK(BM_RationalLpSolve)->Arg(16)->Arg(64)->Arg(256);

static void BM_GridRestrict(benchmark::State& state) {
  GridMeasure g = GridMeasure::uniform(Box({Rat(0), Rat(0)}, {Rat(2), Rat(1)}),
                                       {static_cast<int>(state.range(0)),
                                        static_cast<int>(state.range(0)) / 2});
  ConvexRegion r;
  r.halfspaces.push_back({{Rat(1), Rat(1)}, Rat(1)});
  for (auto _ : state) {
    GridMeasure out = restrict_grid(g, r);
    benchmark::DoNotOptimize(out.total_mass());
  }
}
BENCHMARK(BM_GridRestrict)->Arg(40)->Arg(80);

BENCHMARK_MAIN();
