#pragma once

// Exact spatial augmentation of Mueller cubes and of their parameter maps.
//
// A SpatialTransform is applied as: optional horizontal mirror, optional
// vertical mirror, then a counter-clockwise quarter-turn rotation. Mirrors
// conjugate each matrix by diag(1,1,-1,-1); an odd number of quarter turns
// conjugates by the frame rotation R(pi/2) = diag(1,-1,-1,1).

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <tuple>
#include <utility>
#include <vector>

#include "muellerkit/errors.hpp"
#include "muellerkit/polcore.hpp"

namespace muellerkit {

enum class QuarterTurn : std::uint8_t { Deg0 = 0, Deg90 = 1, Deg180 = 2, Deg270 = 3 };

struct SpatialTransform {
  QuarterTurn rotation = QuarterTurn::Deg0;
  bool flip_h = false;
  bool flip_v = false;

  friend bool operator==(const SpatialTransform&, const SpatialTransform&) = default;
};

/// The eight distinct elements of the square's symmetry group.
inline std::array<SpatialTransform, 8> all_transforms() {
  std::array<SpatialTransform, 8> out{};
  for (int k = 0; k < 4; ++k) {
    out[2 * k] = {static_cast<QuarterTurn>(k), false, false};
    out[2 * k + 1] = {static_cast<QuarterTurn>(k), true, false};
  }
  return out;
}

/// Object rotation by theta: R(-theta) * M * R(theta). A retarder with fast
/// axis a becomes one with fast axis a + theta.
inline MuellerMatrix rotate_frame(const MuellerMatrix& m, double theta) noexcept {
  return make_rotator(-theta) * m * make_rotator(theta);
}

namespace detail {

/// Conjugation by a diagonal +-1 matrix flips the sign of m(i,j) whenever
/// exactly one of i, j is in `flipped`.
inline MuellerMatrix sign_conjugate(MuellerMatrix m, std::array<bool, 4> flipped) noexcept {
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      if (flipped[i] != flipped[j]) m(i, j) = -m(i, j);
  return m;
}

inline MuellerMatrix transform_matrix(const MuellerMatrix& m, const SpatialTransform& t) noexcept {
  MuellerMatrix out = m;
  if (t.flip_h != t.flip_v) out = sign_conjugate(out, {false, false, true, true});
  if (static_cast<int>(t.rotation) % 2 == 1) out = sign_conjugate(out, {false, true, true, false});
  return out;
}

}  // namespace detail

/// Output dimensions (height, width) after applying t to an h x w plane.
inline std::pair<std::uint32_t, std::uint32_t> transformed_dims(std::uint32_t h, std::uint32_t w,
                                                                const SpatialTransform& t) noexcept {
  if (static_cast<int>(t.rotation) % 2 == 1) return {w, h};
  return {h, w};
}

/// Destination (row, col) of source pixel (r, c).
inline std::pair<std::size_t, std::size_t> transformed_position(std::size_t r, std::size_t c, std::size_t h,
                                                                std::size_t w, const SpatialTransform& t) noexcept {
  if (t.flip_h) c = w - 1 - c;
  if (t.flip_v) r = h - 1 - r;
  switch (t.rotation) {
    case QuarterTurn::Deg0: return {r, c};
    case QuarterTurn::Deg90: return {w - 1 - c, r};
    case QuarterTurn::Deg180: return {h - 1 - r, w - 1 - c};
    case QuarterTurn::Deg270: return {c, h - 1 - r};
  }
  return {r, c};
}

/// Spatially permutes one h x w plane; no values change.
template <class T>
std::vector<T> permute_plane(const std::vector<T>& src, std::uint32_t h, std::uint32_t w, const SpatialTransform& t) {
  if (src.size() != std::size_t{h} * w) throw Error(ErrorCode::DimensionMismatch, "plane size does not match dims");
  const std::size_t ow = transformed_dims(h, w, t).second;
  std::vector<T> dst(src.size());
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < w; ++c) {
      const auto [dr, dc] = transformed_position(r, c, h, w, t);
      dst[dr * ow + dc] = src[r * w + c];
    }
  return dst;
}

/// Permutes pixels and conjugates each matrix by the matching frame operator.
inline MuellerCube rotate_cube(const MuellerCube& cube, const SpatialTransform& t) {
  cube.check();
  const std::size_t plane = cube.pixels_per_plane();
  MuellerCube out = cube;
  std::tie(out.height, out.width) = transformed_dims(cube.height, cube.width, t);
  for (std::size_t b = 0; b < cube.bands(); ++b) {
    std::vector<MuellerMatrix> band(cube.data.begin() + static_cast<std::ptrdiff_t>(b * plane),
                                    cube.data.begin() + static_cast<std::ptrdiff_t>((b + 1) * plane));
    for (auto& m : band) m = detail::transform_matrix(m, t);
    auto moved = permute_plane(band, cube.height, cube.width, t);
    std::copy(moved.begin(), moved.end(), out.data.begin() + static_cast<std::ptrdiff_t>(b * plane));
    if (cube.m00_plane) {
      std::vector<double> gains(cube.m00_plane->begin() + static_cast<std::ptrdiff_t>(b * plane),
                                cube.m00_plane->begin() + static_cast<std::ptrdiff_t>((b + 1) * plane));
      auto g = permute_plane(gains, cube.height, cube.width, t);
      std::copy(g.begin(), g.end(), out.m00_plane->begin() + static_cast<std::ptrdiff_t>(b * plane));
    }
  }
  return out;
}

/// The same spatial permutation on already-decomposed maps. Depolarization,
/// retardance and diattenuation are frame invariant, so no value changes.
inline LuChipmanMaps augment_params(const LuChipmanMaps& maps, const SpatialTransform& t) {
  LuChipmanMaps out = maps;
  std::tie(out.height, out.width) = transformed_dims(maps.height, maps.width, t);
  for (std::size_t b = 0; b < maps.bands.size(); ++b) {
    const auto& src = maps.bands[b];
    auto& dst = out.bands[b];
    dst.depolarization = permute_plane(src.depolarization, maps.height, maps.width, t);
    dst.retardance = permute_plane(src.retardance, maps.height, maps.width, t);
    dst.diattenuation = permute_plane(src.diattenuation, maps.height, maps.width, t);
    dst.status = permute_plane(src.status, maps.height, maps.width, t);
  }
  return out;
}

/// Replaces unmeasured elements with `fill` and records the mask. Masks
/// accumulate by bitwise AND; a full mask on an unmasked cube is a no-op.
inline MuellerCube apply_mask(const MuellerCube& cube, const ElementMask& mask, double fill = 0.0) {
  cube.check();
  MuellerCube out = cube;
  for (auto& m : out.data) m = apply_mask(m, mask, fill);
  if (cube.mask) {
    ElementMask merged = *cube.mask & mask;
    out.mask = ElementMask(merged.bits(), merged.bits() == cube.mask->bits() ? cube.mask->name() : mask.name());
  } else if (!mask.is_full()) {
    out.mask = mask;
  }
  return out;
}

}  // namespace muellerkit
