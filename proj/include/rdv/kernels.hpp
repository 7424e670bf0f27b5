#pragma once

// Data-parallel inner loops. Each kernel has a plain serial reference that
// the tests and benchmarks compare against the OpenMP version.

#include <cstddef>
#include <span>

#include "rdv/grid.hpp"

namespace rdv::kernels {

struct WindowMax {
  double value = 0.0;
  std::size_t center = 0;  // node index
  double radius = 0.0;
};

/// max over node centres x0 and radii eps of eps^-delta * int_{[x0-eps,x0+eps] cap (0,L)} g,
/// g the piecewise-linear interpolant of `nonneg_values`.
/// Reference version: integrates every window cell by cell.
WindowMax window_scan_serial(const Grid1D& grid, std::span<const double> nonneg_values,
                             std::span<const double> radii, double delta);

/// Same quantity through a prefix integral, OpenMP over centres. Ties go to
/// the smaller centre index and then the larger radius so results do not
/// depend on the thread count.
WindowMax window_scan_parallel(const Grid1D& grid, std::span<const double> nonneg_values,
                               std::span<const double> radii, double delta);

/// Quantile-regression objective for a fixed slope:
///   residual_k = log_dy[k] - gamma * log_rho[k],
///   offset     = `quantile`-quantile of the residuals,
///   loss       = mean pinball loss of residual_k - offset.
/// `scratch` must have the same size as the inputs.
struct PinballResult {
  double loss = 0.0;
  double offset = 0.0;
};

PinballResult pinball_serial(std::span<const double> log_rho, std::span<const double> log_dy,
                             double gamma, double quantile, std::span<double> scratch);
PinballResult pinball_parallel(std::span<const double> log_rho, std::span<const double> log_dy,
                               double gamma, double quantile, std::span<double> scratch);

}  // namespace rdv::kernels
