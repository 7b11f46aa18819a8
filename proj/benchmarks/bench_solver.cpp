#include <benchmark/benchmark.h>

#include "hpc/initial_data.hpp"
#include "hpc/solver.hpp"

using namespace hpc;

static solver::SolverConfig bench_config(int n) {
  solver::SolverConfig sc;
  sc.params.N = n;
  sc.params.L = 6.0;
  sc.params.relax_regime_checks = true;
  sc.store_snapshots = false;
  return sc;
}

static void BM_rhs(benchmark::State& state) {
  const auto sc = bench_config(int(state.range(0)));
  init::InitialDataSpec spec;
  spec.params = sc.params;
  auto data = init::build(spec);
  Field dw, dz, dphi;
  for (auto _ : state) {
    solver::rhs(data.state, sc, dw, dz, dphi);
    benchmark::DoNotOptimize(dw.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_rhs)->Arg(16384)->Arg(131072);

static void BM_step(benchmark::State& state) {
  const auto sc = bench_config(int(state.range(0)));
  init::InitialDataSpec spec;
  spec.params = sc.params;
  auto data = init::build(spec);
  auto s = data.state;
  const double dt = solver::cfl_dt(s, sc);
  for (auto _ : state) {
    solver::step(s, dt, sc);
    benchmark::DoNotOptimize(s.w.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_step)->Arg(16384)->Arg(131072);
