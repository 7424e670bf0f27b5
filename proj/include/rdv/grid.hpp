#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace rdv {

/// Uniform node-centred mesh on (0, L); nodes x_k = k*h include both endpoints.
class Grid1D {
 public:
  Grid1D(double length, std::size_t node_count);

  double length() const { return length_; }
  std::size_t size() const { return node_count_; }
  double spacing() const { return spacing_; }
  double node(std::size_t k) const { return static_cast<double>(k) * spacing_; }
  std::vector<double> nodes() const;

  bool operator==(const Grid1D& other) const = default;

 private:
  double length_;
  std::size_t node_count_;
  double spacing_;
};

/// Scalar function sampled at the nodes of a Grid1D.
class Field {
 public:
  explicit Field(Grid1D grid, double value = 0.0);
  Field(Grid1D grid, std::vector<double> values);

  template <class F>
  static Field from_function(const Grid1D& grid, F&& f) {
    std::vector<double> v(grid.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = f(grid.node(k));
    return Field(grid, std::move(v));
  }

  const Grid1D& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t k) const { return values_[k]; }
  double& operator[](std::size_t k) { return values_[k]; }

  bool all_finite() const;

  Field& operator+=(const Field& other);
  Field& operator*=(double s);

 private:
  Grid1D grid_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator*(double s, Field f);

/// Throws std::invalid_argument unless both grids are identical.
void require_same_grid(const Grid1D& a, const Grid1D& b);

/// Composite trapezoid rule. Rejects non-finite input.
double integrate(const Field& f);

/// Trapezoid weights h*(1/2, 1, ..., 1, 1/2).
std::vector<double> trapezoid_weights(const Grid1D& grid);

/// Second-order differences: centred inside, one-sided at the two ends.
Field derivative(const Field& f);

double lp_norm(const Field& f, double p);
double linf_norm(const Field& f);

/// Running integral of the piecewise-linear interpolant of a nodal sequence.
/// `over(a, b)` integrates exactly over any sub-interval of [0, L], including
/// partial end cells.
class PrefixIntegral {
 public:
  PrefixIntegral(const Grid1D& grid, std::span<const double> values);

  double up_to(double x) const;
  double over(double a, double b) const { return up_to(b) - up_to(a); }

 private:
  double spacing_;
  double length_;
  std::vector<double> values_;
  std::vector<double> prefix_;
};

/// L1 norm of f over [a, b] intersected with the domain, using the
/// piecewise-linear interpolant of |f|.
double window_l1(const Field& f, double a, double b);

/// Shortest decimal string that round-trips, at most 17 significant digits.
std::string format_real(double v);

/// CSV with header "x,value" and one row per node.
void write_csv(std::ostream& os, const Field& f);

}  // namespace rdv
