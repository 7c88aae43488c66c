// Serial reference against the OpenMP kernels. The second benchmark
// argument selects the path: 0 serial, 1 parallel.
#include <benchmark/benchmark.h>

#include "nhb/counting.hpp"
#include "nhb/eigensystem.hpp"
#include "nhb/susceptibility.hpp"
#include "nhb/waveform.hpp"

using namespace nhb;

namespace {

Exec exec_of(const benchmark::State& state) {
  return state.range(1) ? Exec::parallel : Exec::serial;
}

void BM_chi3_doppler(benchmark::State& state) {
  const SystemParams sys;
  FieldParams f;
  f.omega3 = 0.8;
  DopplerModel doppler;
  doppler.enabled = true;
  const auto grid = uniform_grid(-20.0, 20.0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(chi3(grid, sys, f, doppler, {}, Axis::real_delta, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_numeric_transform(benchmark::State& state) {
  const auto grid = uniform_grid(-100.0, 100.0, static_cast<std::size_t>(state.range(0)));
  const auto kappa = two_pole_kappa(grid, Complex(1.5, 0.6), Complex(-1.5, 0.6));
  const ComplexSpectrum phi{grid, std::vector<Complex>(grid.size(), 1.0), Axis::real_delta};
  const auto tau = uniform_grid(0.0, 10.0, 401);
  for (auto _ : state)
    benchmark::DoNotOptimize(synthesize_numeric(kappa, phi, tau, {}, exec_of(state)));
}

void BM_poisson_counts(benchmark::State& state) {
  const std::vector<double> means(static_cast<std::size_t>(state.range(0)), 50.0);
  for (auto _ : state) benchmark::DoNotOptimize(poisson_counts(means, 7, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_eigen_sweep(benchmark::State& state) {
  const SystemParams sys;
  const FieldParams f;
  const SweepGrid grid{uniform_grid(0.0, 20.0, static_cast<std::size_t>(state.range(0))),
                       uniform_grid(-2.0, 2.0, 41)};
  for (auto _ : state) benchmark::DoNotOptimize(sweep_eigenvalues(sys, f, grid, exec_of(state)));
}

}  // namespace

BENCHMARK(BM_chi3_doppler)->ArgsProduct({{1024, 4096}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_numeric_transform)->ArgsProduct({{4096, 16384}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_poisson_counts)->ArgsProduct({{1 << 14, 1 << 18}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_eigen_sweep)->ArgsProduct({{201, 2001}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
