#include "rdv/morrey.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rdv/kernels.hpp"

namespace rdv {

void MorreyParams::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("morrey: delta must lie in (0,1)");
  if (octaves < 1) throw std::invalid_argument("morrey: empty radius set");
  if (radii_per_octave < 1) throw std::invalid_argument("morrey: radii_per_octave must be >= 1");
}

std::vector<double> MorreyParams::radii(double length) const {
  validate();
  std::vector<double> out;
  const int s = radii_per_octave;
  for (int j = s; j <= octaves * s; ++j) {
    out.push_back(length * std::exp2(-static_cast<double>(j) / s));
  }
  return out;
}

namespace {

std::vector<double> absolute_values(const Field& f) {
  if (!f.all_finite()) throw std::invalid_argument("morrey_norm: non-finite field");
  std::vector<double> a(f.size());
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = std::abs(f[k]);
  return a;
}

MorreyValue to_value(const Grid1D& grid, const kernels::WindowMax& w) {
  return MorreyValue{std::max(0.0, w.value), grid.node(w.center), w.radius};
}

}  // namespace

MorreyValue morrey_norm_detail(const Field& f, const MorreyParams& params) {
  const auto radii = params.radii(f.grid().length());
  const auto a = absolute_values(f);
  return to_value(f.grid(), kernels::window_scan_parallel(f.grid(), a, radii, params.delta));
}

MorreyValue morrey_norm_reference(const Field& f, const MorreyParams& params) {
  const auto radii = params.radii(f.grid().length());
  const auto a = absolute_values(f);
  return to_value(f.grid(), kernels::window_scan_serial(f.grid(), a, radii, params.delta));
}

double morrey_norm(const Field& f, const MorreyParams& params) {
  return morrey_norm_detail(f, params).value;
}

namespace {

double smoothstep(double t) { return t * t * t * (10.0 + t * (-15.0 + 6.0 * t)); }
double smoothstep_derivative(double t) { return 30.0 * t * t * (1.0 - t) * (1.0 - t); }

}  // namespace

double plateau_profile(double s) {
  const double a = std::abs(s);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  // rounding can push the quintic a few ulp past 1 next to |s| = 2
  return std::clamp(1.0 - smoothstep(a - 1.0), 0.0, 1.0);
}

double plateau_profile_derivative(double s) {
  const double a = std::abs(s);
  if (a <= 1.0 || a >= 2.0) return 0.0;
  const double d = -smoothstep_derivative(a - 1.0);
  return s < 0.0 ? -d : d;
}

double reference_bump_mass() {
  // plateau contributes 2; composite Simpson on each degree-15 transition,
  // error O(h^4) ~ 1e-13 at 2000 panels.
  constexpr int panels = 2000;
  const double h = 1.0 / panels;
  double sum = 0.0;
  for (int k = 0; k <= panels; ++k) {
    const double eta = plateau_profile(1.0 + k * h);
    const double w = (k == 0 || k == panels) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    sum += w * eta * eta * eta;
  }
  return 2.0 + 2.0 * sum * h / 3.0;
}

CutoffFunction make_cutoff(const Grid1D& grid, double eps, double x0, double vanishing_exponent) {
  if (!(eps > 0.0 && eps < grid.length())) throw std::invalid_argument("make_cutoff: eps outside (0, L)");
  if (!(vanishing_exponent >= 1.0 / 3.0 && vanishing_exponent < 2.0 / 3.0)) {
    throw std::invalid_argument("make_cutoff: vanishing exponent outside [1/3, 2/3)");
  }
  if (!std::isfinite(x0)) throw std::invalid_argument("make_cutoff: non-finite centre");
  CutoffFunction phi;
  phi.center = x0;
  phi.radius = eps;
  phi.vanishing_exponent = vanishing_exponent;
  std::vector<double> v(grid.size()), dv(grid.size());
  double c = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double s = (grid.node(k) - x0) / eps;
    const double eta = plateau_profile(s);
    v[k] = eta * eta * eta;
    dv[k] = 3.0 * eta * eta * plateau_profile_derivative(s) / eps;
    if (v[k] > 1e-14) c = std::max(c, std::abs(dv[k]) / std::pow(v[k], vanishing_exponent));
  }
  phi.c_phi = c;
  phi.values = Field(grid, std::move(v));
  phi.derivative = Field(grid, std::move(dv));
  return phi;
}

std::optional<std::size_t> cutoff_bound_violation(const CutoffFunction& phi, double slack) {
  for (std::size_t k = 0; k < phi.values.size(); ++k) {
    const double v = phi.values[k];
    if (v <= 1e-14) continue;
    if (std::abs(phi.derivative[k]) > phi.c_phi * std::pow(v, phi.vanishing_exponent) * (1.0 + slack)) {
      return k;
    }
  }
  return std::nullopt;
}

double localized_mass(const Field& z, const CutoffFunction& phi) {
  require_same_grid(z.grid(), phi.values.grid());
  std::vector<double> prod(z.size());
  for (std::size_t k = 0; k < prod.size(); ++k) prod[k] = z[k] * phi.values[k];
  return integrate(Field(z.grid(), std::move(prod)));
}

AuxiliaryFields auxiliary_fields(const Trajectory& traj, double tau) {
  if (traj.snapshots.empty()) throw std::invalid_argument("auxiliary_fields: empty trajectory");
  const double tol = 1e-9 * std::max(1.0, std::abs(traj.end_time()));
  std::size_t first = traj.snapshots.size();
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    if (std::abs(traj.snapshots[i].time - tau) <= tol) {
      first = i;
      break;
    }
  }
  if (first == traj.snapshots.size()) throw std::invalid_argument("auxiliary_fields: tau is not a snapshot time");
  if (traj.snapshots.size() - first < 2) {
    throw std::invalid_argument("auxiliary_fields: need at least two snapshots from tau on");
  }
  const auto& d = traj.diffusion;
  const Grid1D grid = traj.grid();
  const std::size_t n = grid.size();

  AuxiliaryFields out;
  out.z.grid = out.w.grid = out.y.grid = grid;
  std::vector<double> running(n, 0.0);
  for (std::size_t i = first; i < traj.snapshots.size(); ++i) {
    const StateVector& s = traj.snapshots[i];
    if (s.species_count() != d.size()) throw std::invalid_argument("auxiliary_fields: species/diffusion mismatch");
    require_same_grid(s.grid(), grid);
    std::vector<double> z(n, 0.0), w(n, 0.0);
    for (std::size_t j = 0; j < s.species_count(); ++j) {
      const auto u = s.species[j].values();
      for (std::size_t k = 0; k < n; ++k) {
        z[k] += u[k];
        w[k] += d[j] * u[k];
      }
    }
    if (!out.w.rows.empty()) {
      const auto& prev = out.w.rows.back();
      const double dt = s.time - out.w.times.back();
      for (std::size_t k = 0; k < n; ++k) running[k] += 0.5 * dt * (prev[k] + w[k]);
    }
    out.z.times.push_back(s.time);
    out.w.times.push_back(s.time);
    out.y.times.push_back(s.time);
    out.z.rows.push_back(std::move(z));
    out.w.rows.push_back(std::move(w));
    auto yd = derivative(Field(grid, running));
    // Differences below the round-off of the running integral are noise.
    double scale = 0.0;
    for (double r : running) scale = std::max(scale, std::abs(r));
    const double floor = 16.0 * std::numeric_limits<double>::epsilon() * scale / grid.spacing();
    for (auto& v : yd.values()) {
      if (std::abs(v) <= floor) v = 0.0;
    }
    out.y.rows.emplace_back(yd.values().begin(), yd.values().end());
  }
  return out;
}

double delta_from_gamma(double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("delta_from_gamma: gamma must be positive");
  return gamma / (1.0 + 2.0 * gamma);
}

MorreySeries track_morrey(const Trajectory& traj, const MorreyParams& params) {
  MorreySeries out;
  if (traj.snapshots.empty()) return out;
  const std::size_t m = traj.snapshots.front().species_count();
  out.species.assign(m, {});
  out.sup_species.assign(m, 0.0);
  const double mid = 0.5 * (traj.start_time() + traj.end_time());
  double sup_first = 0.0, sup_second = 0.0;
  for (const auto& s : traj.snapshots) {
    Field z(s.grid(), 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      z += s.species[j];
      const double mj = morrey_norm(s.species[j], params);
      out.species[j].push_back(mj);
      out.sup_species[j] = std::max(out.sup_species[j], mj);
    }
    const double mz = morrey_norm(z, params);
    out.times.push_back(s.time);
    out.z.push_back(mz);
    out.sup_z = std::max(out.sup_z, mz);
    if (s.time <= mid) sup_first = std::max(sup_first, mz);
    if (s.time >= mid) sup_second = std::max(sup_second, mz);
  }
  out.nonconcentration_ratio = sup_first > 0.0 ? sup_second / sup_first : (sup_second > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
  return out;
}

}  // namespace rdv
