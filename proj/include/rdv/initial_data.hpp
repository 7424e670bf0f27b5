#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rdv/systems.hpp"

namespace rdv {

/// (peak/2) * (1 + sum_k a_k cos(k pi x / L) / sum_k |a_k|), a_k = U(-1,1)/k,
/// k = 1..modes. Values lie in [0, peak] for every resolution, and the
/// function itself does not depend on the grid.
Field random_cosine_field(const Grid1D& grid, double peak, std::size_t modes, std::uint64_t seed,
                          std::uint64_t stream = 0);

/// One random_cosine_field per species, species i on stream i.
StateVector random_cosine_state(const Grid1D& grid, std::size_t species, double peak, std::size_t modes,
                                std::uint64_t seed);

StateVector constant_state(const Grid1D& grid, const std::vector<double>& values);

/// mean + amplitude * cos(pi x / L) for every species; requires amplitude <= mean.
StateVector cosine_state(const Grid1D& grid, std::size_t species, double mean, double amplitude);

/// mass / width on the nodes with |x - center| <= width/2, zero elsewhere,
/// in species 0; other species are zero.
StateVector spike_state(const Grid1D& grid, std::size_t species, double mass, double width, double center);

}  // namespace rdv
