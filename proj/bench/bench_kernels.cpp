// Serial reference kernels against their OpenMP counterparts.

#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include "rdv/kernels.hpp"
#include "rdv/morrey.hpp"
#include "rdv/random.hpp"

namespace {

using namespace rdv;

std::vector<double> field_values(std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double x = static_cast<double>(k) / static_cast<double>(n - 1);
    v[k] = 1.0 + std::sin(7.0 * x) * std::sin(7.0 * x) + 5.0 * std::exp(-400.0 * (x - 0.3) * (x - 0.3));
  }
  return v;
}

template <auto Scan>
void window_scan(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Grid1D g(1.0, n);
  const auto values = field_values(n);
  MorreyParams p;
  p.delta = 0.25;
  const auto radii = p.radii(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(Scan(g, values, radii, p.delta));
  state.SetComplexityN(state.range(0));
}

template <auto Pinball>
void pinball(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  std::vector<double> log_rho(n), log_dy(n), scratch(n);
  for (std::size_t k = 0; k < n; ++k) {
    log_rho[k] = std::log(rng.uniform(1e-6, 1.0));
    log_dy[k] = 0.6 * log_rho[k] + rng.uniform(-1.0, 0.0);
  }
  for (auto _ : state) benchmark::DoNotOptimize(Pinball(log_rho, log_dy, 0.6, 0.99, scratch));
}

BENCHMARK(window_scan<kernels::window_scan_serial>)->Name("window_scan/serial")->Arg(201)->Arg(801);
BENCHMARK(window_scan<kernels::window_scan_parallel>)->Name("window_scan/parallel")->Arg(201)->Arg(801)->Arg(3201);
BENCHMARK(pinball<kernels::pinball_serial>)->Name("pinball/serial")->Arg(10'000)->Arg(100'000);
BENCHMARK(pinball<kernels::pinball_parallel>)->Name("pinball/parallel")->Arg(10'000)->Arg(100'000);

}  // namespace

BENCHMARK_MAIN();
