#include "rdv/grid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace rdv {

Grid1D::Grid1D(double length, std::size_t node_count)
    : length_(length), node_count_(node_count), spacing_(0.0) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw std::invalid_argument("Grid1D: length must be finite and positive");
  }
  if (node_count < 3) {
    throw std::invalid_argument("Grid1D: need at least 3 nodes");
  }
  spacing_ = length / static_cast<double>(node_count - 1);
}

std::vector<double> Grid1D::nodes() const {
  std::vector<double> x(node_count_);
  for (std::size_t k = 0; k < node_count_; ++k) x[k] = node(k);
  return x;
}

Field::Field(Grid1D grid, double value) : grid_(grid), values_(grid.size(), value) {}

Field::Field(Grid1D grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw std::invalid_argument("Field: value count " + std::to_string(values_.size()) +
                                " does not match node count " + std::to_string(grid_.size()));
  }
}

bool Field::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Field& Field::operator+=(const Field& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator*(double s, Field f) { return f *= s; }

void require_same_grid(const Grid1D& a, const Grid1D& b) {
  if (!(a == b)) throw std::invalid_argument("fields live on different grids");
}

namespace {

void require_finite(const Field& f, const char* what) {
  if (!f.all_finite()) throw std::invalid_argument(std::string(what) + ": non-finite field value");
}

}  // namespace

std::vector<double> trapezoid_weights(const Grid1D& grid) {
  std::vector<double> w(grid.size(), grid.spacing());
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

double integrate(const Field& f) {
  require_finite(f, "integrate");
  const auto v = f.values();
  double interior = 0.0;
  for (std::size_t k = 1; k + 1 < v.size(); ++k) interior += v[k];
  return f.grid().spacing() * (interior + 0.5 * (v.front() + v.back()));
}

Field derivative(const Field& f) {
  const auto v = f.values();
  const std::size_t n = v.size();
  const double inv2h = 0.5 / f.grid().spacing();
  std::vector<double> d(n);
  // Written as differences so that constants map to exactly zero.
  d[0] = (3.0 * (v[1] - v[0]) - (v[2] - v[1])) * inv2h;
  for (std::size_t k = 1; k + 1 < n; ++k) d[k] = (v[k + 1] - v[k - 1]) * inv2h;
  d[n - 1] = (3.0 * (v[n - 1] - v[n - 2]) - (v[n - 2] - v[n - 3])) * inv2h;
  return Field(f.grid(), std::move(d));
}

double lp_norm(const Field& f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  require_finite(f, "lp_norm");
  Field g(f.grid());
  for (std::size_t k = 0; k < f.size(); ++k) g[k] = std::pow(std::abs(f[k]), p);
  return std::pow(integrate(g), 1.0 / p);
}

double linf_norm(const Field& f) {
  require_finite(f, "linf_norm");
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

PrefixIntegral::PrefixIntegral(const Grid1D& grid, std::span<const double> values)
    : spacing_(grid.spacing()),
      length_(grid.length()),
      values_(values.begin(), values.end()),
      prefix_(values.size(), 0.0) {
  for (std::size_t k = 1; k < values_.size(); ++k) {
    prefix_[k] = prefix_[k - 1] + 0.5 * spacing_ * (values_[k - 1] + values_[k]);
  }
}

double PrefixIntegral::up_to(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= length_) return prefix_.back();
  const double s = x / spacing_;
  auto k = static_cast<std::size_t>(s);
  if (k >= values_.size() - 1) k = values_.size() - 2;
  const double theta = s - static_cast<double>(k);
  const double g0 = values_[k];
  const double g1 = values_[k + 1];
  return prefix_[k] + spacing_ * (theta * g0 + 0.5 * theta * theta * (g1 - g0));
}

double window_l1(const Field& f, double a, double b) {
  // Summed over the overlapping cells only, so a small window next to large
  // values elsewhere keeps full relative accuracy.
  const Grid1D& grid = f.grid();
  const double h = grid.spacing();
  a = std::max(a, 0.0);
  b = std::min(b, grid.length());
  if (!(b > a)) return 0.0;
  const std::size_t cells = grid.size() - 1;
  const auto first = std::min(static_cast<std::size_t>(a / h), cells - 1);
  double total = 0.0;
  for (std::size_t k = first; k < cells; ++k) {
    const double xk = grid.node(k);
    if (xk >= b) break;
    const double s = std::max(a, xk);
    const double e = std::min(b, grid.node(k + 1));
    if (!(e > s)) continue;
    const double g0 = std::abs(f[k]);
    const double slope = (std::abs(f[k + 1]) - g0) / h;
    total += 0.5 * (e - s) * (2.0 * g0 + slope * ((s - xk) + (e - xk)));
  }
  return total;
}

std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& os, const Field& f) {
  os << "x,value\n";
  for (std::size_t k = 0; k < f.size(); ++k) {
    os << format_real(f.grid().node(k)) << ',' << format_real(f[k]) << '\n';
  }
}

}  // namespace rdv
