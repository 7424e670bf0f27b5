#include "rdv/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <omp.h>

namespace rdv::kernels {

namespace {

bool better(double value, std::size_t center, double radius, const WindowMax& best) {
  if (value != best.value) return value > best.value;
  if (center != best.center) return center < best.center;
  return radius > best.radius;
}

/// Exact integral of the piecewise-linear interpolant over [a, b].
double window_integral_direct(const Grid1D& grid, std::span<const double> g, double a, double b) {
  const double h = grid.spacing();
  const std::size_t cells = grid.size() - 1;
  if (b <= a) return 0.0;
  auto first = static_cast<std::size_t>(std::floor(a / h));
  first = std::min(first, cells - 1);
  double total = 0.0;
  for (std::size_t k = first; k < cells; ++k) {
    const double xk = grid.node(k);
    if (xk >= b) break;
    const double s = std::max(a, xk);
    const double e = std::min(b, grid.node(k + 1));
    if (e <= s) continue;
    const double slope = (g[k + 1] - g[k]) / h;
    const double gs = g[k] + slope * (s - xk);
    const double ge = g[k] + slope * (e - xk);
    total += 0.5 * (e - s) * (gs + ge);
  }
  return total;
}

void check_inputs(const Grid1D& grid, std::span<const double> values, std::span<const double> radii) {
  if (values.size() != grid.size()) throw std::invalid_argument("window scan: size mismatch");
  if (radii.empty()) throw std::invalid_argument("window scan: empty radius set");
}

}  // namespace

WindowMax window_scan_serial(const Grid1D& grid, std::span<const double> nonneg_values,
                             std::span<const double> radii, double delta) {
  check_inputs(grid, nonneg_values, radii);
  const double L = grid.length();
  WindowMax best{-1.0, 0, 0.0};
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const double x0 = grid.node(c);
    for (double eps : radii) {
      const double mass =
          window_integral_direct(grid, nonneg_values, std::max(0.0, x0 - eps), std::min(L, x0 + eps));
      const double value = std::pow(eps, -delta) * mass;
      if (better(value, c, eps, best)) best = WindowMax{value, c, eps};
    }
  }
  return best;
}

WindowMax window_scan_parallel(const Grid1D& grid, std::span<const double> nonneg_values,
                               std::span<const double> radii, double delta) {
  check_inputs(grid, nonneg_values, radii);
  const double L = grid.length();
  const PrefixIntegral prefix(grid, nonneg_values);
  std::vector<double> weights(radii.size());
  for (std::size_t r = 0; r < radii.size(); ++r) weights[r] = std::pow(radii[r], -delta);

  WindowMax best{-1.0, 0, 0.0};
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel
  {
    WindowMax local{-1.0, 0, 0.0};
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t c = 0; c < n; ++c) {
      const double x0 = grid.node(static_cast<std::size_t>(c));
      for (std::size_t r = 0; r < radii.size(); ++r) {
        const double eps = radii[r];
        const double value = weights[r] * prefix.over(std::max(0.0, x0 - eps), std::min(L, x0 + eps));
        if (better(value, static_cast<std::size_t>(c), eps, local)) {
          local = WindowMax{value, static_cast<std::size_t>(c), eps};
        }
      }
    }
#pragma omp critical(rdv_window_scan)
    {
      if (better(local.value, local.center, local.radius, best)) best = local;
    }
  }
  return best;
}

namespace {

std::size_t quantile_rank(std::size_t n, double quantile) {
  const auto k = static_cast<std::size_t>(std::ceil(quantile * static_cast<double>(n)));
  return std::min(n - 1, k == 0 ? 0 : k - 1);
}

double pinball(double r, double q) { return r >= 0.0 ? q * r : (q - 1.0) * r; }

}  // namespace

PinballResult pinball_serial(std::span<const double> log_rho, std::span<const double> log_dy,
                             double gamma, double quantile, std::span<double> scratch) {
  const std::size_t n = log_rho.size();
  if (n == 0 || log_dy.size() != n || scratch.size() != n) {
    throw std::invalid_argument("pinball: size mismatch");
  }
  for (std::size_t k = 0; k < n; ++k) scratch[k] = log_dy[k] - gamma * log_rho[k];
  const std::size_t rank = quantile_rank(n, quantile);
  std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(rank), scratch.end());
  const double offset = scratch[rank];
  double loss = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    loss += pinball(log_dy[k] - gamma * log_rho[k] - offset, quantile);
  }
  return {loss / static_cast<double>(n), offset};
}

PinballResult pinball_parallel(std::span<const double> log_rho, std::span<const double> log_dy,
                               double gamma, double quantile, std::span<double> scratch) {
  const std::size_t n = log_rho.size();
  if (n == 0 || log_dy.size() != n || scratch.size() != n) {
    throw std::invalid_argument("pinball: size mismatch");
  }
  const auto sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < sn; ++k) scratch[k] = log_dy[k] - gamma * log_rho[k];
  const std::size_t rank = quantile_rank(n, quantile);
  std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(rank), scratch.end());
  const double offset = scratch[rank];
  double loss = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : loss)
  for (std::ptrdiff_t k = 0; k < sn; ++k) {
    loss += pinball(log_dy[k] - gamma * log_rho[k] - offset, quantile);
  }
  return {loss / static_cast<double>(n), offset};
}

}  // namespace rdv::kernels
