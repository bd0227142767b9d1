#pragma once

// Lu-Chipman polar decomposition M = M_Delta * M_R * M_D.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "muellerkit/errors.hpp"
#include "muellerkit/jacobi.hpp"
#include "muellerkit/parallel.hpp"
#include "muellerkit/polcore.hpp"
#include "muellerkit/realizability.hpp"

namespace muellerkit {

struct DecomposeOptions {
  bool project_unphysical = true;
  double d_singular_eps = 1e-9;
  double det_eps = 1e-12;
  double clip = kProjectionClip;
  double tol_phys = kPhysicalTolerance;
  std::vector<std::size_t> wavelengths;  ///< band indices; empty selects all
  std::size_t workers = 1;

  void check() const {
    if (!(d_singular_eps > 0.0) || !(det_eps > 0.0))
      throw Error(ErrorCode::InvalidArgument, "decomposition epsilons must be positive");
  }
};

struct VectorMagnitude {
  double magnitude = 0.0;
  Vec3 vec{};
  bool clamped = false;
};

namespace detail {

inline VectorMagnitude clamped_magnitude(Vec3 v) noexcept {
  VectorMagnitude out;
  const double n = norm(v);
  if (n > 1.0) {
    for (auto& x : v) x /= n;
    out.magnitude = 1.0;
    out.clamped = true;
  } else {
    out.magnitude = n;
  }
  out.vec = v;
  return out;
}

}  // namespace detail

/// D_vec = (m01, m02, m03) / m00. A magnitude above 1 (noise) is pulled back
/// onto the unit sphere and flagged.
inline VectorMagnitude diattenuation(const MuellerMatrix& m) noexcept {
  const double m00 = m(0, 0);
  return detail::clamped_magnitude({m(0, 1) / m00, m(0, 2) / m00, m(0, 3) / m00});
}

/// P_vec = (m10, m20, m30) / m00, clamped like diattenuation().
inline VectorMagnitude polarizance(const MuellerMatrix& m) noexcept {
  const double m00 = m(0, 0);
  return detail::clamped_magnitude({m(1, 0) / m00, m(2, 0) / m00, m(3, 0) / m00});
}

namespace detail {

struct SymmetricRoot {
  Mat3 root;          ///< sign * sqrt(A)
  Mat3 inverse_root;  ///< valid only when invertible
  bool invertible = false;
};

/// sign * A^(1/2) and its inverse for symmetric PSD A, from one Jacobi pass.
inline SymmetricRoot symmetric_root(const Mat3& a, double sign) {
  const auto eig = jacobi_eigen<3>(a.values(), true);
  std::array<double, 3> s{};
  bool invertible = true;
  for (std::size_t k = 0; k < 3; ++k) {
    s[k] = std::sqrt(std::max(eig.values[k], 0.0));
    if (!(s[k] > 0.0)) invertible = false;
  }
  SymmetricRoot out;
  out.invertible = invertible;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      double r = 0.0;
      double ri = 0.0;
      for (std::size_t k = 0; k < 3; ++k) {
        const double uu = eig.vectors[i * 3 + k] * eig.vectors[j * 3 + k];
        r += s[k] * uu;
        if (invertible) ri += uu / s[k];
      }
      out.root(i, j) = sign * r;
      out.inverse_root(i, j) = sign * ri;
    }
  return out;
}

inline double retardance_from_block(const Mat3& m_r) noexcept {
  const double c = std::clamp((m_r.trace() + 1.0) / 2.0 - 1.0, -1.0, 1.0);
  return std::acos(c);
}

}  // namespace detail

/// Decomposes one pixel. Non-finite and zero-intensity input throws; every
/// other input yields finite fields with a status describing how far the
/// decomposition got.
inline LuChipmanPixel decompose_pixel(const MuellerMatrix& input, const DecomposeOptions& opts = {}) {
  if (!input.all_finite()) throw Error(ErrorCode::NonFinite, "decompose_pixel: non-finite matrix");
  LuChipmanPixel px;

  MuellerMatrix m = normalize(input).matrix;
  if (opts.project_unphysical) {
    auto proj = project_physical(m, opts.clip, opts.tol_phys);
    if (!proj.report.physical) {
      m = normalize(proj.matrix).matrix;
      px.projected = true;
    }
  } else if (!is_physical(m, opts.tol_phys).physical) {
    px.status = PixelStatus::UnphysicalInput;
  }
  if (!m.all_finite()) throw Error(ErrorCode::NonFinite, "decompose_pixel: normalization overflowed");

  const auto diat = diattenuation(m);
  const auto pol = polarizance(m);
  px.diattenuation = diat.magnitude;
  px.d_vec = diat.vec;
  px.d_clamped = diat.clamped;
  px.p_vec = pol.vec;
  px.m_diattenuator = make_diattenuator(diat.vec);

  const double d2 = diat.magnitude * diat.magnitude;
  if (diat.magnitude >= 1.0 - opts.d_singular_eps) {
    px.status = PixelStatus::DegenerateDiattenuator;
    px.retardance = 0.0;
    px.depolarization = 0.0;
    return px;
  }

  // M_D^-1 = M_D(-d) / (1 - D^2)
  const Vec3 neg{-diat.vec[0], -diat.vec[1], -diat.vec[2]};
  const MuellerMatrix md_inv = (1.0 / (1.0 - d2)) * make_diattenuator(neg);
  const MuellerMatrix m_prime = m * md_inv;
  const Mat3 mp = lower_right(m_prime);
  const Mat3 gram = mp * mp.transposed();
  const double det = determinant(mp);

  const bool singular = std::abs(det) < opts.det_eps;
  const double sign = (!singular && det < 0.0) ? -1.0 : 1.0;
  const auto root = detail::symmetric_root(gram, sign);
  const Mat3& m_delta = root.root;

  Mat3 m_r = Mat3::identity();
  if (singular || !root.invertible) {
    px.status = PixelStatus::SingularDepolarizer;
    px.retardance = 0.0;
  } else {
    m_r = root.inverse_root * mp;
    px.retardance = detail::retardance_from_block(m_r);
  }
  px.depolarization = std::clamp(1.0 - std::abs(m_delta.trace()) / 3.0, 0.0, 1.0);

  // P_Delta = (P - m d) / (1 - D^2), with the unclamped first column so the
  // factors reproduce the input.
  const Vec3 p_raw = first_col_tail(m);
  const Vec3 md = lower_right(m) * diat.vec;
  Vec3 p_delta{};
  for (std::size_t i = 0; i < 3; ++i) p_delta[i] = (p_raw[i] - md[i]) / (1.0 - d2);
  px.m_depolarizer = assemble(1.0, Vec3{}, p_delta, m_delta);
  px.m_retarder = assemble(1.0, Vec3{}, Vec3{}, m_r);

  if (!(px.m_depolarizer.all_finite() && px.m_retarder.all_finite() && std::isfinite(px.retardance) &&
        std::isfinite(px.depolarization))) {
    px.status = PixelStatus::SingularDepolarizer;
    px.m_depolarizer = MuellerMatrix::identity();
    px.m_retarder = MuellerMatrix::identity();
    px.retardance = 0.0;
    px.depolarization = 0.0;
  }
  return px;
}

/// M_Delta * M_R * M_D from the stored factors.
inline MuellerMatrix reconstruct(const LuChipmanPixel& px) {
  if (px.status == PixelStatus::DegenerateDiattenuator || px.status == PixelStatus::SingularDepolarizer)
    throw Error(ErrorCode::DegenerateNoReconstruction, "pixel factors are conventional, not a factorization");
  return compose(px.m_depolarizer, px.m_retarder, px.m_diattenuator);
}

/// Runs decompose_pixel on every (band, pixel). Pixels that cannot be
/// decomposed at all (non-finite, zero intensity) are marked UnphysicalInput
/// with zero parameters; nothing else is affected.
inline LuChipmanMaps decompose_cube(const MuellerCube& cube, const DecomposeOptions& opts = {}) {
  cube.check();
  opts.check();
  if (cube.is_masked())
    throw Error(ErrorCode::MaskedInput, "numeric decomposition needs all 16 Mueller elements");

  std::vector<std::size_t> selected = opts.wavelengths;
  if (selected.empty())
    for (std::size_t b = 0; b < cube.bands(); ++b) selected.push_back(b);
  std::vector<double> wl;
  for (std::size_t b : selected) {
    if (b >= cube.bands()) throw Error(ErrorCode::DimensionMismatch, "wavelength index out of range");
    wl.push_back(cube.wavelengths_nm[b]);
  }

  LuChipmanMaps maps(cube.height, cube.width, wl);
  const std::size_t plane = cube.pixels_per_plane();
  const std::size_t total = plane * selected.size();
  parallel_for(total, opts.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const std::size_t s = k / plane;
      const std::size_t p = k % plane;
      auto& band = maps.bands[s];
      try {
        const auto px = decompose_pixel(cube.data[selected[s] * plane + p], opts);
        band.depolarization[p] = px.depolarization;
        band.retardance[p] = px.retardance;
        band.diattenuation[p] = px.diattenuation;
        band.status[p] = px.status;
      } catch (const Error&) {
        band.depolarization[p] = 0.0;
        band.retardance[p] = 0.0;
        band.diattenuation[p] = 0.0;
        band.status[p] = PixelStatus::UnphysicalInput;
      }
    }
  });
  return maps;
}

}  // namespace muellerkit
