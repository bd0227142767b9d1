#pragma once

// Analytic test cubes and random physical compositions.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "muellerkit/polcore.hpp"
#include "muellerkit/random.hpp"

namespace muellerkit {

struct CompositionParams {
  std::array<double, 3> depolarizer{1.0, 1.0, 1.0};  ///< diag(1, a, b, c)
  double retarder_axis = 0.0;
  double retardance = 0.0;
  Vec3 d_vec{};

  [[nodiscard]] MuellerMatrix matrix() const {
    return compose(make_diagonal_depolarizer(depolarizer[0], depolarizer[1], depolarizer[2]),
                   make_linear_retarder(retarder_axis, retardance), make_diattenuator(d_vec));
  }
  [[nodiscard]] double expected_depolarization() const {
    return 1.0 - (std::abs(depolarizer[0]) + std::abs(depolarizer[1]) + std::abs(depolarizer[2])) / 3.0;
  }
  [[nodiscard]] double expected_diattenuation() const { return norm(d_vec); }
};

/// diag(1,a,b,c) is physical iff all four of (1 +- a +- b +- c)/4 with an even
/// number of minus signs among a, b, c are nonnegative.
inline bool diagonal_depolarizer_physical(double a, double b, double c) noexcept {
  return 1 + a + b + c >= 0 && 1 + a - b - c >= 0 && 1 - a + b - c >= 0 && 1 - a - b + c >= 0;
}

/// Depolarizer entries in [0.3, 1] (resampled until physical), retarder axis
/// and retardance in [0, pi), diattenuation magnitude in [0, 0.8] along a
/// uniformly random direction.
inline CompositionParams random_composition(Xoshiro256& rng) {
  CompositionParams p;
  do {
    for (auto& x : p.depolarizer) x = rng.uniform(0.3, 1.0);
  } while (!diagonal_depolarizer_physical(p.depolarizer[0], p.depolarizer[1], p.depolarizer[2]));
  p.retarder_axis = rng.uniform(0.0, std::numbers::pi);
  p.retardance = rng.uniform(0.0, std::numbers::pi);
  const double z = rng.uniform(-1.0, 1.0);
  const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double r = std::sqrt(1.0 - z * z);
  const double mag = rng.uniform(0.0, 0.8);
  p.d_vec = {mag * r * std::cos(phi), mag * r * std::sin(phi), mag * z};
  return p;
}

/// Cube of independent random physical compositions, scaled by `gain`.
inline MuellerCube random_physical_cube(std::uint32_t h, std::uint32_t w, std::vector<double> wavelengths,
                                        std::uint64_t seed, double gain = 1.0) {
  MuellerCube cube(h, w, std::move(wavelengths));
  Xoshiro256 rng(seed);
  for (auto& m : cube.data) m = gain * random_composition(rng).matrix();
  return cube;
}

}  // namespace muellerkit
