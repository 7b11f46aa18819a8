#include <benchmark/benchmark.h>

#include <cmath>

#include "hpc/heat_kernel.hpp"

static void BM_convolve(benchmark::State& state) {
  const int n = state.range(0);
  const double dx = 2.0 / n;
  std::vector<double> f(n);
  for (int i = 0; i < n; ++i) f[i] = std::sin(10.0 * i * dx);
  for (auto _ : state) benchmark::DoNotOptimize(hpc::heat::convolve(f, 1e-3, dx));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_convolve)->Arg(4096)->Arg(65536);
