#include "rdv/initial_data.hpp"

#include <cmath>
#include <stdexcept>

#include "rdv/random.hpp"

namespace rdv {

Field random_cosine_field(const Grid1D& grid, double peak, std::size_t modes, std::uint64_t seed,
                          std::uint64_t stream) {
  if (!(peak >= 0.0) || !std::isfinite(peak)) throw std::invalid_argument("random_cosine: peak must be >= 0");
  if (modes == 0) return Field(grid, 0.5 * peak);
  Rng rng(seed, stream);
  std::vector<double> a(modes);
  double total = 0.0;
  for (std::size_t k = 0; k < modes; ++k) {
    a[k] = rng.uniform(-1.0, 1.0) / static_cast<double>(k + 1);
    total += std::abs(a[k]);
  }
  const double L = grid.length();
  return Field::from_function(grid, [&](double x) {
    double s = 0.0;
    for (std::size_t k = 0; k < modes; ++k) s += a[k] * std::cos(static_cast<double>(k + 1) * M_PI * x / L);
    return 0.5 * peak * (1.0 + (total > 0.0 ? s / total : 0.0));
  });
}

StateVector random_cosine_state(const Grid1D& grid, std::size_t species, double peak, std::size_t modes,
                                std::uint64_t seed) {
  std::vector<Field> f;
  for (std::size_t i = 0; i < species; ++i) f.push_back(random_cosine_field(grid, peak, modes, seed, i));
  return make_state(0.0, std::move(f));
}

StateVector constant_state(const Grid1D& grid, const std::vector<double>& values) {
  std::vector<Field> f;
  for (double v : values) f.emplace_back(grid, v);
  return make_state(0.0, std::move(f));
}

StateVector cosine_state(const Grid1D& grid, std::size_t species, double mean, double amplitude) {
  if (std::abs(amplitude) > mean) throw std::invalid_argument("cosine_state: data would be negative");
  const double L = grid.length();
  std::vector<Field> f;
  for (std::size_t i = 0; i < species; ++i) {
    f.push_back(Field::from_function(grid, [&](double x) { return mean + amplitude * std::cos(M_PI * x / L); }));
  }
  return make_state(0.0, std::move(f));
}

StateVector spike_state(const Grid1D& grid, std::size_t species, double mass, double width, double center) {
  if (!(width > 0.0) || !(mass >= 0.0)) throw std::invalid_argument("spike_state: need width > 0, mass >= 0");
  std::vector<Field> f;
  f.push_back(Field::from_function(grid, [&](double x) {
    return std::abs(x - center) <= 0.5 * width * (1.0 + 1e-12) ? mass / width : 0.0;
  }));
  for (std::size_t i = 1; i < species; ++i) f.emplace_back(grid, 0.0);
  return make_state(0.0, std::move(f));
}

}  // namespace rdv
