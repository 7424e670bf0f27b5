#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rdv/kernels.hpp"
#include "rdv/morrey.hpp"
#include "rdv/random.hpp"

namespace rdv {

namespace {

/// Offsets always reach this many steps, so short arrays still span a decade in rho.
constexpr std::size_t kMinOffsetSpan = 16;

/// Log-uniform index offset in [1, room] that keeps idx + offset inside [0, n).
std::ptrdiff_t draw_offset(Rng& rng, std::size_t idx, std::size_t n, std::size_t max_offset) {
  const std::size_t room_lo = std::min(idx, max_offset);
  const std::size_t room_hi = std::min(n - 1 - idx, max_offset);
  const std::size_t room = std::max(room_lo, room_hi);
  auto mag = static_cast<std::size_t>(
      std::floor(std::exp(rng.uniform() * std::log(static_cast<double>(room) + 1.0))));
  mag = std::clamp<std::size_t>(mag, 1, room);
  const bool up_ok = mag <= room_hi;
  const bool down_ok = mag <= room_lo;
  bool up = up_ok;
  if (up_ok && down_ok) up = rng.sign() > 0.0;
  return up ? static_cast<std::ptrdiff_t>(mag) : -static_cast<std::ptrdiff_t>(mag);
}

enum class Direction : unsigned char { none, space, time };

struct PairSample {
  double log_rho = 0.0;
  double log_dy = 0.0;
  Direction dir = Direction::none;
};

struct DirectionFit {
  std::vector<double> log_rho;
  std::vector<double> log_dy;
  double gamma = 1.0;

  bool active() const { return !log_rho.empty(); }
};

kernels::PinballResult pinball(DirectionFit& f, double gamma, double q, bool parallel,
                               std::vector<double>& scratch) {
  scratch.resize(f.log_rho.size());
  return parallel ? kernels::pinball_parallel(f.log_rho, f.log_dy, gamma, q, scratch)
                  : kernels::pinball_serial(f.log_rho, f.log_dy, gamma, q, scratch);
}

/// Minimises the profile pinball loss over gamma. The profile is convex in
/// gamma (partial minimum of a jointly convex function), so golden-section
/// search finds the global minimiser.
double fit_slope(DirectionFit& f, double q, bool parallel, std::vector<double>& scratch) {
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = 1e-3, b = 2.0;
  double c = b - ratio * (b - a), d = a + ratio * (b - a);
  double fc = pinball(f, c, q, parallel, scratch).loss;
  double fd = pinball(f, d, q, parallel, scratch).loss;
  for (int it = 0; it < 80; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = pinball(f, c, q, parallel, scratch).loss;
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = pinball(f, d, q, parallel, scratch).loss;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

HolderEstimate estimate_holder(const SpaceTimeArray& y, const HolderOptions& opts) {
  const std::size_t nt = y.time_count();
  const std::size_t nx = y.grid.size();
  if (y.sample_count() < 100) throw std::invalid_argument("estimate_holder: need at least 100 samples");
  if (y.rows.size() != nt) throw std::invalid_argument("estimate_holder: row/time count mismatch");
  if (!(opts.quantile > 0.0 && opts.quantile < 1.0)) {
    throw std::invalid_argument("estimate_holder: quantile must lie in (0,1)");
  }
  if (!(opts.max_offset_fraction > 0.0 && opts.max_offset_fraction <= 1.0)) {
    throw std::invalid_argument("estimate_holder: max_offset_fraction must lie in (0,1]");
  }
  if (opts.pair_count == 0) throw std::invalid_argument("estimate_holder: pair_count must be positive");

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& row : y.rows) {
    if (row.size() != nx) throw std::invalid_argument("estimate_holder: ragged rows");
    for (double v : row) {
      if (!std::isfinite(v)) throw std::invalid_argument("estimate_holder: non-finite Y");
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  HolderEstimate est;
  if (lo == hi) {
    est.degenerate = true;
    return est;
  }

  // Pure spatial pairs measure |dY| against |dx|^2, pure temporal pairs
  // against |dt|; mixed pairs follow from the triangle inequality.
  auto span_of = [&](std::size_t n) {
    const double cap = std::ceil(opts.max_offset_fraction * static_cast<double>(n - 1));
    return std::max<std::size_t>({1, static_cast<std::size_t>(cap), std::min<std::size_t>(kMinOffsetSpan, n - 1)});
  };
  const std::size_t max_dx = nx > 1 ? span_of(nx) : 1;
  const std::size_t max_dt = nt > 1 ? span_of(nt) : 1;
  std::vector<PairSample> pairs(opts.pair_count);
  const auto count = static_cast<std::ptrdiff_t>(opts.pair_count);
#pragma omp parallel for schedule(static) if (opts.parallel)
  for (std::ptrdiff_t p = 0; p < count; ++p) {
    Rng rng(opts.seed, static_cast<std::uint64_t>(p));
    const std::size_t i = rng.index(nt);
    const std::size_t k = rng.index(nx);
    const bool spatial = nt < 2 || rng.uniform() < 0.5;
    PairSample s;
    double rho = 0.0, dy = 0.0;
    if (spatial) {
      const std::size_t k2 = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(k) + draw_offset(rng, k, nx, max_dx));
      const double dx = y.grid.node(k2) - y.grid.node(k);
      rho = dx * dx;
      dy = std::abs(y.rows[i][k2] - y.rows[i][k]);
    } else {
      const std::size_t i2 = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + draw_offset(rng, i, nt, max_dt));
      rho = std::abs(y.times[i2] - y.times[i]);
      dy = std::abs(y.rows[i2][k] - y.rows[i][k]);
    }
    if (rho > 0.0 && dy > 0.0) {
      s = PairSample{std::log(rho), std::log(dy), spatial ? Direction::space : Direction::time};
    }
    pairs[static_cast<std::size_t>(p)] = s;
  }

  DirectionFit space, time;
  for (const auto& s : pairs) {
    if (s.dir == Direction::none) continue;
    DirectionFit& f = s.dir == Direction::space ? space : time;
    f.log_rho.push_back(s.log_rho);
    f.log_dy.push_back(s.log_dy);
  }
  if (!space.active() && !time.active()) {
    est.degenerate = true;
    return est;
  }

  std::vector<double> scratch;
  double gamma = 1.0;
  for (DirectionFit* f : {&space, &time}) {
    if (!f->active()) continue;
    f->gamma = fit_slope(*f, opts.quantile, opts.parallel, scratch);
    gamma = std::min(gamma, f->gamma);
  }
  gamma = std::clamp(gamma, 1e-3, 1.0);

  double offset = -std::numeric_limits<double>::infinity();
  double loss = 0.0;
  std::size_t used = 0;
  for (DirectionFit* f : {&space, &time}) {
    if (!f->active()) continue;
    const auto r = pinball(*f, gamma, opts.quantile, opts.parallel, scratch);
    offset = std::max(offset, r.offset);
    loss += r.loss * static_cast<double>(f->log_rho.size());
    used += f->log_rho.size();
  }
  std::size_t above = 0;
  for (const DirectionFit* f : {&space, &time}) {
    for (std::size_t k = 0; k < f->log_rho.size(); ++k) {
      if (f->log_dy[k] > offset + gamma * f->log_rho[k]) ++above;
    }
  }
  est.gamma = gamma;
  est.constant = std::exp(offset);
  est.fit_residual = loss / static_cast<double>(used);
  est.pair_count = used;
  est.violation_fraction = static_cast<double>(above) / static_cast<double>(used);
  return est;
}

}  // namespace rdv
