#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "rdv/grid.hpp"
#include "rdv/morrey.hpp"
#include "rdv/random.hpp"

namespace rdv::test {

/// Two-sided Weierstrass-Mandelbrot sum in t with seeded phases. Its Hoelder
/// exponent is `gamma` at every scale between b^-40 and the frequency cutoff.
inline double weierstrass_mandelbrot(double t, double gamma, std::uint64_t seed, double b = 1.5,
                                     double max_frequency = 1e7) {
  Rng rng(seed);
  double s = 0.0;
  for (int k = -20; k <= 40; ++k) {
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double freq = std::pow(b, k);
    if (freq > max_frequency) break;
    s += std::pow(b, -k * gamma) * (std::cos(phase) - std::cos(2.0 * std::numbers::pi * freq * t + phase));
  }
  return s;
}

template <class F>
SpaceTimeArray sample_space_time(std::size_t nx, std::size_t nt, double length, double duration, F&& f) {
  SpaceTimeArray a;
  a.grid = Grid1D(length, nx);
  for (std::size_t i = 0; i < nt; ++i) {
    const double t = duration * static_cast<double>(i) / static_cast<double>(nt - 1);
    std::vector<double> row(nx);
    for (std::size_t k = 0; k < nx; ++k) row[k] = f(a.grid.node(k), t);
    a.times.push_back(t);
    a.rows.push_back(std::move(row));
  }
  return a;
}

/// Time-only field W(t) repeated over 3 nodes, 4001 times on [0, 1].
inline SpaceTimeArray weierstrass_field(double gamma, std::uint64_t seed = 1) {
  std::vector<double> w(4001);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = weierstrass_mandelbrot(static_cast<double>(i) / 4000.0, gamma, seed);
  std::size_t i = 0;
  auto a = sample_space_time(3, w.size(), 1.0, 1.0, [&](double, double) { return 0.0; });
  for (auto& row : a.rows) {
    for (auto& v : row) v = w[i];
    ++i;
  }
  return a;
}

inline Field random_field(const Grid1D& grid, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  Rng rng(seed, 77);
  std::vector<double> v(grid.size());
  for (auto& x : v) x = rng.uniform(lo, hi);
  return Field(grid, std::move(v));
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("rdv_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline double relative_error(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace rdv::test
