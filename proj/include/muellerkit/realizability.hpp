#pragma once

// Coherency matrix, physical-realizability test and projection.
//
// H = 1/4 * sum_ij m(i,j) * (sigma_i kron conj(sigma_j)) with
//   sigma_0 = I, sigma_1 = diag(1,-1), sigma_2 = [[0,1],[1,0]], sigma_3 = [[0,-i],[i,0]].
// tr(H) = m(0,0) and m(i,j) = tr((sigma_i kron conj(sigma_j))^H H).
// A Mueller matrix is physically realizable iff H is positive semidefinite.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <vector>

#include "muellerkit/errors.hpp"
#include "muellerkit/jacobi.hpp"
#include "muellerkit/parallel.hpp"
#include "muellerkit/polcore.hpp"

namespace muellerkit {

using Complex = std::complex<double>;

inline constexpr double kPhysicalTolerance = 1e-9;
inline constexpr double kProjectionClip = 1e-6;
inline constexpr double kHermitianTolerance = 1e-10;

/// 4x4 complex Hermitian matrix, row-major.
class CoherencyMatrix {
 public:
  CoherencyMatrix() = default;
  explicit CoherencyMatrix(const std::array<Complex, 16>& h) : h_(h) {}

  Complex& operator()(std::size_t i, std::size_t j) noexcept { return h_[i * 4 + j]; }
  Complex operator()(std::size_t i, std::size_t j) const noexcept { return h_[i * 4 + j]; }
  [[nodiscard]] const std::array<Complex, 16>& values() const noexcept { return h_; }

  [[nodiscard]] Complex trace() const noexcept { return h_[0] + h_[5] + h_[10] + h_[15]; }

  [[nodiscard]] double hermitian_defect() const noexcept {
    double d = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = i; j < 4; ++j) d = std::max(d, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return d;
  }

  [[nodiscard]] double frobenius() const noexcept {
    double s = 0.0;
    for (const auto& z : h_) s += std::norm(z);
    return std::sqrt(s);
  }

 private:
  std::array<Complex, 16> h_{};
};

namespace detail {

// sigma_i kron conj(sigma_j) has exactly one nonzero per row. For basis
// element (i,j), row r has `coef` at column `col[r]`.
struct PauliKronEntry {
  std::array<std::uint8_t, 4> col;
  std::array<Complex, 4> coef;
};

inline const std::array<PauliKronEntry, 16>& pauli_kron_table() {
  static const std::array<PauliKronEntry, 16> table = [] {
    using C = Complex;
    // Each 2x2 Pauli matrix: row r has value val[r] at column c[r].
    struct P2 {
      std::array<int, 2> c;
      std::array<C, 2> val;
    };
    const std::array<P2, 4> sigma{{
        {{0, 1}, {C(1, 0), C(1, 0)}},
        {{0, 1}, {C(1, 0), C(-1, 0)}},
        {{1, 0}, {C(1, 0), C(1, 0)}},
        {{1, 0}, {C(0, -1), C(0, 1)}},
    }};
    std::array<PauliKronEntry, 16> t{};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        PauliKronEntry e{};
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) {
            const int row = 2 * a + b;
            e.col[row] = static_cast<std::uint8_t>(2 * sigma[i].c[a] + sigma[j].c[b]);
            e.coef[row] = sigma[i].val[a] * std::conj(sigma[j].val[b]);
          }
        t[4 * i + j] = e;
      }
    return t;
  }();
  return table;
}

/// Real symmetric 8x8 embedding [[Re H, -Im H],[Im H, Re H]]; each eigenvalue
/// of H appears twice.
inline std::array<double, 64> real_embedding(const CoherencyMatrix& h) noexcept {
  std::array<double, 64> s{};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      const double re = 0.5 * (h(i, j).real() + h(j, i).real());
      const double im = 0.5 * (h(i, j).imag() - h(j, i).imag());
      s[i * 8 + j] = re;
      s[(i + 4) * 8 + (j + 4)] = re;
      s[i * 8 + (j + 4)] = -im;
      s[(i + 4) * 8 + j] = im;
    }
  return s;
}

}  // namespace detail

inline CoherencyMatrix to_coherency(const MuellerMatrix& m) noexcept {
  const auto& table = detail::pauli_kron_table();
  CoherencyMatrix h;
  for (std::size_t ij = 0; ij < 16; ++ij) {
    const double w = 0.25 * m.values()[ij];
    if (w == 0.0) continue;
    const auto& e = table[ij];
    for (std::size_t r = 0; r < 4; ++r) h(r, e.col[r]) += w * e.coef[r];
  }
  return h;
}

inline MuellerMatrix from_coherency(const CoherencyMatrix& h) {
  if (!(h.hermitian_defect() <= kHermitianTolerance))
    throw Error(ErrorCode::NotHermitian, "coherency matrix is not Hermitian");
  const auto& table = detail::pauli_kron_table();
  MuellerMatrix m;
  for (std::size_t ij = 0; ij < 16; ++ij) {
    const auto& e = table[ij];
    Complex acc = 0.0;
    for (std::size_t r = 0; r < 4; ++r) acc += std::conj(e.coef[r]) * h(r, e.col[r]);
    m.values()[ij] = acc.real();
  }
  return m;
}

struct HermitianEigen {
  std::array<double, 4> values{};                 ///< descending
  std::array<std::array<Complex, 4>, 4> vectors{};  ///< vectors[k] pairs with values[k]
};

/// Eigenvalues only, via the doubled spectrum of the real embedding.
inline std::array<double, 4> hermitian_eigenvalues(const CoherencyMatrix& h) {
  const auto eig = jacobi_eigen<8>(detail::real_embedding(h), false);
  std::array<double, 4> out{};
  for (std::size_t k = 0; k < 4; ++k) out[k] = 0.5 * (eig.values[2 * k] + eig.values[2 * k + 1]);
  return out;
}

/// Full decomposition. Each complex eigenvector x + iy comes from a real
/// eigenvector (x; y) of the embedding; the eight real candidates span every
/// eigenspace twice over, so four are picked by pivoted complex Gram-Schmidt
/// (largest remaining residual first) and their eigenvalues are taken as
/// Rayleigh quotients.
inline HermitianEigen hermitian_eigen(const CoherencyMatrix& h) {
  const auto eig = jacobi_eigen<8>(detail::real_embedding(h), true);

  std::array<std::array<Complex, 4>, 8> cand{};
  for (std::size_t k = 0; k < 8; ++k)
    for (std::size_t r = 0; r < 4; ++r) cand[k][r] = Complex(eig.vectors[r * 8 + k], eig.vectors[(r + 4) * 8 + k]);

  std::array<std::array<Complex, 4>, 4> basis{};
  std::array<bool, 8> used{};
  for (std::size_t n = 0; n < 4; ++n) {
    std::size_t best = 8;
    double best_norm = -1.0;
    std::array<Complex, 4> best_vec{};
    for (std::size_t k = 0; k < 8; ++k) {
      if (used[k]) continue;
      auto v = cand[k];
      for (std::size_t b = 0; b < n; ++b) {
        Complex dot = 0.0;
        for (std::size_t r = 0; r < 4; ++r) dot += std::conj(basis[b][r]) * v[r];
        for (std::size_t r = 0; r < 4; ++r) v[r] -= dot * basis[b][r];
      }
      double nn = 0.0;
      for (const auto& z : v) nn += std::norm(z);
      if (nn > best_norm) {
        best_norm = nn;
        best = k;
        best_vec = v;
      }
    }
    used[best] = true;
    const double len = std::sqrt(best_norm);
    for (auto& z : best_vec) z /= len;
    basis[n] = best_vec;
  }

  std::array<std::pair<double, std::size_t>, 4> ranked{};
  for (std::size_t n = 0; n < 4; ++n) {
    Complex q = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      Complex hv = 0.0;
      for (std::size_t j = 0; j < 4; ++j) hv += h(i, j) * basis[n][j];
      q += std::conj(basis[n][i]) * hv;
    }
    ranked[n] = {q.real(), n};
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

  HermitianEigen out;
  for (std::size_t k = 0; k < 4; ++k) {
    out.values[k] = ranked[k].first;
    out.vectors[k] = basis[ranked[k].second];
  }
  return out;
}

struct RealizabilityReport {
  std::array<double, 4> eigenvalues{};  ///< descending
  double min_eigenvalue = 0.0;
  bool physical = false;
  std::uint32_t band = 0;
  std::uint32_t row = 0;
  std::uint32_t col = 0;
};

inline RealizabilityReport is_physical(const MuellerMatrix& m, double tol_phys = kPhysicalTolerance) {
  if (!m.all_finite()) throw Error(ErrorCode::NonFinite, "is_physical: non-finite matrix");
  RealizabilityReport rep;
  rep.eigenvalues = hermitian_eigenvalues(to_coherency(m));
  rep.min_eigenvalue = rep.eigenvalues[3];
  rep.physical = rep.min_eigenvalue >= -tol_phys;
  return rep;
}

struct ProjectionResult {
  MuellerMatrix matrix;
  RealizabilityReport report;  ///< describes the input
};

/// Raises every negative coherency eigenvalue to `clip` and maps back.
/// Inputs that already pass is_physical are returned bit-for-bit. The trace
/// (hence m(0,0)) is not renormalized.
inline ProjectionResult project_physical(const MuellerMatrix& m, double clip = kProjectionClip,
                                         double tol_phys = kPhysicalTolerance) {
  if (!m.all_finite()) throw Error(ErrorCode::NonFinite, "project_physical: non-finite matrix");
  const CoherencyMatrix h = to_coherency(m);
  const HermitianEigen eig = hermitian_eigen(h);

  RealizabilityReport rep;
  rep.eigenvalues = eig.values;
  rep.min_eigenvalue = eig.values[3];
  rep.physical = rep.min_eigenvalue >= -tol_phys;
  if (rep.physical) return {m, rep};

  CoherencyMatrix projected;
  for (std::size_t k = 0; k < 4; ++k) {
    const double lambda = eig.values[k] < 0.0 ? clip : eig.values[k];
    const auto& v = eig.vectors[k];
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = i; j < 4; ++j) projected(i, j) += lambda * v[i] * std::conj(v[j]);
  }
  for (std::size_t i = 0; i < 4; ++i) {
    projected(i, i) = Complex(projected(i, i).real(), 0.0);
    for (std::size_t j = i + 1; j < 4; ++j) projected(j, i) = std::conj(projected(i, j));
  }
  return {from_coherency(projected), rep};
}

struct ScanResult {
  double fraction_physical = 0.0;
  std::size_t physical_count = 0;
  std::vector<RealizabilityReport> reports;  ///< cube data order
};

/// Per-pixel physicality over the whole cube. Non-finite pixels are reported
/// unphysical with NaN eigenvalues.
inline ScanResult scan_cube(const MuellerCube& cube, double tol_phys = kPhysicalTolerance,
                            std::size_t workers = 1) {
  cube.check();
  ScanResult out;
  out.reports.resize(cube.data.size());
  const std::size_t plane = cube.pixels_per_plane();
  parallel_for(cube.data.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      RealizabilityReport rep;
      const auto& m = cube.data[k];
      if (m.all_finite()) {
        rep = is_physical(m, tol_phys);
      } else {
        rep.eigenvalues.fill(std::numeric_limits<double>::quiet_NaN());
        rep.min_eigenvalue = std::numeric_limits<double>::quiet_NaN();
        rep.physical = false;
      }
      rep.band = static_cast<std::uint32_t>(k / plane);
      rep.row = static_cast<std::uint32_t>((k % plane) / cube.width);
      rep.col = static_cast<std::uint32_t>(k % cube.width);
      out.reports[k] = rep;
    }
  });
  out.physical_count = static_cast<std::size_t>(
      std::count_if(out.reports.begin(), out.reports.end(), [](const auto& r) { return r.physical; }));
  out.fraction_physical = static_cast<double>(out.physical_count) / static_cast<double>(out.reports.size());
  return out;
}

/// project_physical over every pixel; the cube keeps its metadata.
inline MuellerCube project_cube(const MuellerCube& cube, double clip = kProjectionClip,
                                double tol_phys = kPhysicalTolerance, std::size_t workers = 1) {
  cube.check();
  MuellerCube out = cube;
  parallel_for(cube.data.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k)
      if (cube.data[k].all_finite()) out.data[k] = project_physical(cube.data[k], clip, tol_phys).matrix;
  });
  return out;
}

}  // namespace muellerkit
