#include <benchmark/benchmark.h>

#include "hpc/burgers_profile.hpp"

static void BM_wbar(benchmark::State& state) {
  double y = 0.0;
  for (auto _ : state) {
    y += 1e-3;
    benchmark::DoNotOptimize(hpc::burgers::wbar(y));
  }
}
BENCHMARK(BM_wbar);

static void BM_profile_sample(benchmark::State& state) {
  double y = -50.0;
  for (auto _ : state) {
    y += 1e-3;
    benchmark::DoNotOptimize(hpc::burgers::sample(y));
  }
}
BENCHMARK(BM_profile_sample);

static void BM_profile_check(benchmark::State& state) {
  const auto grid = hpc::burgers::log_symmetric_grid(1e-6, 1e6, state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(hpc::burgers::check_profile_properties(grid, 1e-10));
  state.SetItemsProcessed(state.iterations() * grid.size());
}
BENCHMARK(BM_profile_check)->Arg(1000)->Arg(50000);
