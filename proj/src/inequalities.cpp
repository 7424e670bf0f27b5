#include "rdv/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rdv/random.hpp"

namespace rdv {

std::string to_string(EnsembleKind k) {
  switch (k) {
    case EnsembleKind::fourier: return "fourier";
    case EnsembleKind::bumps: return "bumps";
    case EnsembleKind::mixed: return "mixed";
  }
  return "unknown";
}

EnsembleKind parse_ensemble_kind(const std::string& s) {
  if (s == "fourier") return EnsembleKind::fourier;
  if (s == "bumps") return EnsembleKind::bumps;
  if (s == "mixed") return EnsembleKind::mixed;
  throw std::invalid_argument("unknown ensemble kind '" + s + "'");
}

void EnsembleSpec::validate() const {
  if (sample_count < 1) throw std::invalid_argument("ensemble: sample_count must be >= 1");
  if (!std::isfinite(amplitude_min) || !std::isfinite(amplitude_max) || amplitude_min < 0.0 ||
      amplitude_max < amplitude_min) {
    throw std::invalid_argument("ensemble: need 0 <= amplitude_min <= amplitude_max, finite");
  }
  if (!(min_width >= 0.0)) throw std::invalid_argument("ensemble: min_width must be >= 0");
}

namespace {

std::vector<double> fourier_sample(const Grid1D& grid, const EnsembleSpec& spec, Rng& rng) {
  const double L = grid.length();
  std::vector<double> v(grid.size(), 0.0);
  double shift = 0.0;
  for (std::size_t j = 1; j <= spec.mode_count; ++j) {
    const double a = rng.uniform(spec.amplitude_min, spec.amplitude_max) * rng.sign();
    shift += std::abs(a);
    const double freq = static_cast<double>(j) * M_PI / L;
    for (std::size_t k = 0; k < v.size(); ++k) v[k] += a * std::cos(freq * grid.node(k));
  }
  if (spec.nonnegative) {
    for (auto& x : v) x = std::max(0.0, x + shift);
  }
  return v;
}

std::vector<double> bump_sample(const Grid1D& grid, const EnsembleSpec& spec, Rng& rng) {
  const double L = grid.length();
  const double w_lo = std::max(spec.min_width, 4.0 * grid.spacing());
  const double w_hi = std::max(w_lo, 0.25 * L);
  std::vector<double> v(grid.size(), 0.0);
  const std::size_t count = spec.bump_count == 0 ? 0 : 1 + rng.index(spec.bump_count);
  for (std::size_t j = 0; j < count; ++j) {
    double c = rng.uniform(spec.amplitude_min, spec.amplitude_max);
    if (!spec.nonnegative) c *= rng.sign();
    const double w = w_lo * std::exp(rng.uniform() * std::log(w_hi / w_lo));
    const double x0 = rng.uniform(std::min(2.0 * w, 0.5 * L), std::max(L - 2.0 * w, 0.5 * L));
    for (std::size_t k = 0; k < v.size(); ++k) {
      const double eta = plateau_profile((grid.node(k) - x0) / w);
      v[k] += c * eta * eta * eta;
    }
  }
  return v;
}

}  // namespace

std::vector<Field> generate_ensemble(const Grid1D& grid, const EnsembleSpec& spec) {
  spec.validate();
  std::vector<Field> out;
  out.reserve(spec.sample_count);
  for (std::size_t s = 0; s < spec.sample_count; ++s) {
    Rng rng(spec.seed, s);
    EnsembleKind kind = spec.kind;
    int pick = 0;
    if (kind == EnsembleKind::mixed) {
      pick = static_cast<int>(rng.index(3));
      kind = pick == 1 ? EnsembleKind::bumps : EnsembleKind::fourier;
    }
    std::vector<double> v = kind == EnsembleKind::fourier ? fourier_sample(grid, spec, rng)
                                                          : bump_sample(grid, spec, rng);
    if (pick == 2) {
      const auto extra = bump_sample(grid, spec, rng);
      for (std::size_t k = 0; k < v.size(); ++k) v[k] += extra[k];
    }
    out.emplace_back(grid, std::move(v));
  }
  return out;
}

namespace {

double weighted_integral(const Field& u, const Field& phi, auto&& g) {
  std::vector<double> v(u.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double p = phi[k];
    v[k] = p * p * g(k);
  }
  return integrate(Field(u.grid(), std::move(v)));
}

struct LocalNorms {
  double l1 = 0.0;
  double l2 = 0.0;
};

LocalNorms support_norms(const Field& u, const CutoffFunction& phi) {
  const double a = phi.center - 2.0 * phi.radius;
  const double b = phi.center + 2.0 * phi.radius;
  std::vector<double> sq(u.size());
  for (std::size_t k = 0; k < sq.size(); ++k) sq[k] = u[k] * u[k];
  const double l2sq = window_l1(Field(u.grid(), std::move(sq)), a, b);
  return LocalNorms{window_l1(u, a, b), std::sqrt(l2sq)};
}

double safe_ratio(double lhs, double rhs) {
  if (lhs == 0.0) return 0.0;
  if (rhs == 0.0) return std::numeric_limits<double>::infinity();
  return lhs / rhs;
}

/// Both key ratios are invariant under u -> s u, so u is divided by its
/// largest magnitude on supp phi first; this keeps far bump tails
/// (values ~1e-30 and below) from underflowing in the fourth powers.
Field normalised_on_support(const Field& u, const CutoffFunction& phi) {
  double peak = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (std::abs(u.grid().node(k) - phi.center) <= 2.0 * phi.radius) peak = std::max(peak, std::abs(u[k]));
  }
  Field out = u;
  if (peak > 0.0) out *= 1.0 / peak;
  return out;
}

}  // namespace

double check_key1(const Field& u_in, const CutoffFunction& phi) {
  require_same_grid(u_in.grid(), phi.values.grid());
  const Field u = normalised_on_support(u_in, phi);
  const Field du = derivative(u);
  const double lhs = weighted_integral(u, phi.values, [&](std::size_t k) {
    const double s = u[k] * u[k];
    return s * s;
  });
  const double grad = weighted_integral(u, phi.values, [&](std::size_t k) { return du[k] * du[k]; });
  const double l1 = support_norms(u, phi).l1;
  const double c3 = phi.c_phi * phi.c_phi * phi.c_phi;
  return safe_ratio(lhs, l1 * l1 * (grad + c3 * l1 * l1));
}

double check_key2(const Field& u_in, const CutoffFunction& phi, double delta) {
  require_same_grid(u_in.grid(), phi.values.grid());
  if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("check_key2: delta must lie in [0,1)");
  const Field u = normalised_on_support(u_in, phi);
  const Field du = derivative(u);
  const double lhs = weighted_integral(u, phi.values, [&](std::size_t k) { return std::pow(std::abs(u[k]), 4.0 + delta); });
  const double grad = weighted_integral(u, phi.values, [&](std::size_t k) { return du[k] * du[k]; });
  const auto norms = support_norms(u, phi);
  const double rhs = std::pow(norms.l1, 2.0 - delta) * std::pow(norms.l2, 2.0 * delta) * grad +
                     std::pow(phi.c_phi, 3.0 + delta) * std::pow(norms.l1, 4.0 + delta);
  return safe_ratio(lhs, rhs);
}

PartitionError::PartitionError(const std::string& what, std::size_t piece_, std::size_t node_)
    : std::runtime_error(what + " (piece " + std::to_string(piece_) + ", node " + std::to_string(node_) + ")"),
      piece(piece_),
      node(node_) {}

namespace {

struct RawBump {
  double value = 0.0;
  double slope = 0.0;
};

RawBump raw_bump(double x, double center, double eps) {
  const double s = (x - center) / eps;
  const double eta = plateau_profile(s);
  return RawBump{eta * eta * eta, 3.0 * eta * eta * plateau_profile_derivative(s) / eps};
}

/// Normalised value and derivative of every piece at x.
void normalised_at(double x, const std::vector<double>& centers, double eps, std::vector<double>& val,
                   std::vector<double>& der) {
  const std::size_t k = centers.size();
  double s2 = 0.0, ds2 = 0.0;
  std::vector<RawBump> raw(k);
  for (std::size_t j = 0; j < k; ++j) {
    raw[j] = raw_bump(x, centers[j], eps);
    s2 += raw[j].value * raw[j].value;
    ds2 += 2.0 * raw[j].value * raw[j].slope;
  }
  const double s = std::sqrt(s2);
  const double ds = ds2 / (2.0 * s);
  for (std::size_t j = 0; j < k; ++j) {
    val[j] = raw[j].value / s;
    der[j] = raw[j].slope / s - raw[j].value * ds / s2;
  }
}

}  // namespace

std::vector<CutoffFunction> partition_of_unity(const Grid1D& grid, double eps, double stride_factor) {
  const double L = grid.length();
  if (!(eps > 0.0 && eps < 0.5 * L)) throw std::invalid_argument("partition_of_unity: eps must lie in (0, L/2)");
  if (!(stride_factor > 0.0 && stride_factor <= 2.0)) {
    throw std::invalid_argument("partition_of_unity: stride_factor must lie in (0, 2]");
  }
  const double stride = stride_factor * eps;
  const auto count = static_cast<std::size_t>(std::ceil(L / stride - 1e-12)) + 1;
  std::vector<double> centers(count);
  for (std::size_t j = 0; j < count; ++j) centers[j] = static_cast<double>(j) * stride;

  const std::size_t n = grid.size();
  std::vector<std::vector<double>> val(count, std::vector<double>(n)), der(count, std::vector<double>(n));
  std::vector<double> c(count, 0.0);
  std::vector<double> v(count), d(count);
  auto accumulate_constant = [&](double x) {
    normalised_at(x, centers, eps, v, d);
    for (std::size_t j = 0; j < count; ++j) {
      if (v[j] > 1e-14) c[j] = std::max(c[j], std::abs(d[j]) / std::cbrt(v[j]));
    }
  };
  constexpr int kSub = 8;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = grid.node(k);
    normalised_at(x, centers, eps, v, d);
    for (std::size_t j = 0; j < count; ++j) {
      val[j][k] = v[j];
      der[j][k] = d[j];
    }
    accumulate_constant(x);
    if (k + 1 < n) {
      for (int q = 1; q < kSub; ++q) accumulate_constant(x + grid.spacing() * q / kSub);
    }
  }

  for (std::size_t k = 0; k < n; ++k) {
    double sum = 0.0;
    for (std::size_t j = 0; j < count; ++j) sum += val[j][k] * val[j][k];
    if (!(std::abs(sum - 1.0) <= 1e-12)) throw PartitionError("sum of squares differs from 1", 0, k);
  }
  std::vector<CutoffFunction> out;
  out.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    if (!std::isfinite(c[j])) throw PartitionError("non-finite vanishing-order constant", j, 0);
    for (std::size_t k = 0; k < n; ++k) {
      const double p = val[j][k];
      if (!(p >= 0.0 && p <= 1.0 + 1e-15)) throw PartitionError("value outside [0,1]", j, k);
      if (p > 1e-14 && std::abs(der[j][k]) > c[j] * std::cbrt(p) * (1.0 + 1e-12)) {
        throw PartitionError("vanishing-order bound violated", j, k);
      }
    }
    CutoffFunction phi;
    phi.center = centers[j];
    phi.radius = eps;
    phi.vanishing_exponent = 1.0 / 3.0;
    phi.c_phi = c[j];
    phi.values = Field(grid, std::move(val[j]));
    phi.derivative = Field(grid, std::move(der[j]));
    out.push_back(std::move(phi));
  }
  return out;
}

namespace {

struct InterpTerms {
  double lhs = 0.0;
  double morrey_grad = 0.0;
  double l1_4 = 0.0;
};

InterpTerms interp_terms(const Field& u, const MorreyParams& morrey) {
  std::vector<double> u4(u.size()), du2(u.size());
  const Field du = derivative(u);
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double s = u[k] * u[k];
    u4[k] = s * s;
    du2[k] = du[k] * du[k];
  }
  const double m = morrey_norm(u, morrey);
  const double l1 = lp_norm(u, 1.0);
  const double l1sq = l1 * l1;
  return InterpTerms{integrate(Field(u.grid(), std::move(u4))), m * m * integrate(Field(u.grid(), std::move(du2))),
                     l1sq * l1sq};
}

}  // namespace

double check_interp_morrey(const Field& u, const MorreyParams& morrey, double eps_weight, double c_cal) {
  const auto t = interp_terms(u, morrey);
  return t.lhs - eps_weight * t.morrey_grad - c_cal * t.l1_4;
}

double interp_morrey_threshold(const Field& u, const MorreyParams& morrey, double eps_weight) {
  if (!(eps_weight > 0.0)) throw std::invalid_argument("interp_morrey: eps_weight must be positive");
  const auto t = interp_terms(u, morrey);
  const double excess = t.lhs - eps_weight * t.morrey_grad;
  if (excess <= 0.0) return 0.0;
  return safe_ratio(excess, t.l1_4);
}

std::string to_string(InequalityId id) {
  switch (id) {
    case InequalityId::key1: return "key1";
    case InequalityId::key2: return "key2";
    case InequalityId::interp_morrey: return "interp_morrey";
  }
  return "unknown";
}

InequalityId parse_inequality(const std::string& s) {
  if (s == "key1") return InequalityId::key1;
  if (s == "key2") return InequalityId::key2;
  if (s == "interp_morrey") return InequalityId::interp_morrey;
  throw std::invalid_argument("unknown inequality '" + s + "'");
}

namespace {

std::vector<CutoffFunction> cutoff_family(const Grid1D& grid, const InequalityParams& params) {
  const double a = params.id == InequalityId::key2 ? (1.0 + params.delta) / (3.0 + params.delta) : 1.0 / 3.0;
  std::vector<CutoffFunction> out;
  for (double r : params.cutoff_radii) {
    for (double c : params.cutoff_centers) {
      out.push_back(make_cutoff(grid, r * grid.length(), c * grid.length(), a));
    }
  }
  return out;
}

double sample_constant_with(const Field& u, const InequalityParams& params,
                            const std::vector<CutoffFunction>& family) {
  if (params.id == InequalityId::interp_morrey) {
    MorreyParams mp;
    mp.delta = params.delta;
    return interp_morrey_threshold(u, mp, params.eps_weight);
  }
  double best = 0.0;
  for (const auto& phi : family) {
    const double r = params.id == InequalityId::key1 ? check_key1(u, phi) : check_key2(u, phi, params.delta);
    best = std::max(best, r);
  }
  return best;
}

std::vector<double> per_sample_constants(const std::vector<Field>& ensemble, const InequalityParams& params,
                                         bool parallel) {
  std::vector<double> out(ensemble.size(), 0.0);
  if (ensemble.empty()) return out;
  const auto family = params.id == InequalityId::interp_morrey ? std::vector<CutoffFunction>{}
                                                               : cutoff_family(ensemble.front().grid(), params);
  const auto n = static_cast<std::ptrdiff_t>(ensemble.size());
#pragma omp parallel for schedule(dynamic, 8) if (parallel)
  for (std::ptrdiff_t s = 0; s < n; ++s) {
    const auto k = static_cast<std::size_t>(s);
    out[k] = sample_constant_with(ensemble[k], params, family);
  }
  return out;
}

}  // namespace

double sample_constant(const Field& u, const InequalityParams& params) {
  const auto family = params.id == InequalityId::interp_morrey ? std::vector<CutoffFunction>{}
                                                               : cutoff_family(u.grid(), params);
  return sample_constant_with(u, params, family);
}

CalibrationResult calibrate_constant(const std::vector<Field>& ensemble, const InequalityParams& params,
                                     bool parallel) {
  if (ensemble.empty()) throw std::invalid_argument("calibrate_constant: empty ensemble");
  CalibrationResult out;
  out.per_sample = per_sample_constants(ensemble, params, parallel);
  for (std::size_t k = 0; k < out.per_sample.size(); ++k) {
    if (out.per_sample[k] > out.constant) {
      out.constant = out.per_sample[k];
      out.argmax = k;
    }
  }
  return out;
}

ValidationResult validate_constant(const std::vector<Field>& ensemble, const InequalityParams& params,
                                   double constant, bool parallel) {
  ValidationResult out;
  const auto values = per_sample_constants(ensemble, params, parallel);
  out.checked = values.size();
  for (std::size_t k = 0; k < values.size(); ++k) {
    out.max_ratio = std::max(out.max_ratio, values[k]);
    if (values[k] > constant) {
      if (!out.witness) out.witness = k;
      ++out.violations;
    }
  }
  return out;
}

InequalityReport run_inequality_check(const Grid1D& grid, const EnsembleSpec& train, std::uint64_t heldout_seed,
                                      const InequalityParams& params, double safety_factor,
                                      double calibration_scale) {
  if (heldout_seed == train.seed) throw std::invalid_argument("held-out seed must differ from the training seed");
  if (!(safety_factor > 0.0) || !(calibration_scale > 0.0)) {
    throw std::invalid_argument("safety_factor and calibration_scale must be positive");
  }
  EnsembleSpec held = train;
  held.seed = heldout_seed;
  const auto train_set = generate_ensemble(grid, train);
  const auto held_set = generate_ensemble(grid, held);
  const auto cal = calibrate_constant(train_set, params);

  InequalityReport rep;
  rep.inequality = to_string(params.id);
  rep.delta = params.delta;
  rep.eps_weight = params.eps_weight;
  rep.samples = train.sample_count;
  rep.max_ratio = cal.constant;
  rep.calibrated_c = safety_factor * calibration_scale * cal.constant;
  rep.seed = train.seed;
  rep.heldout_seed = heldout_seed;
  const auto val = validate_constant(held_set, params, rep.calibrated_c);
  rep.violations = val.violations;
  rep.heldout_max_ratio = val.max_ratio;
  rep.witness = val.witness;
  return rep;
}

XiBound xi_admissible(double delta) {
  if (!(delta > 0.0)) return XiBound{0.0, true};
  if (!(delta < 1.0)) throw std::invalid_argument("xi_admissible: delta must lie in (0,1)");
  // positive root of xi^2 + (3 + delta) xi - 2 delta = 0, written without cancellation
  const double b = 3.0 + delta;
  return XiBound{4.0 * delta / (b + std::sqrt(b * b + 8.0 * delta)), true};
}

}  // namespace rdv
