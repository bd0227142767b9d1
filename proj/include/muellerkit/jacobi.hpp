#pragma once

// Cyclic Jacobi eigensolver for small real symmetric matrices.
//
// The same engine serves the 3x3 depolarizer square root and the 8x8 real
// embedding of the 4x4 Hermitian coherency matrix. Rotations are applied in a
// fixed (p, q) order so results are bit-reproducible.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>

#include "muellerkit/errors.hpp"

namespace muellerkit {

inline constexpr double kJacobiRelTol = 1e-13;
inline constexpr int kJacobiMaxSweeps = 64;

template <std::size_t N>
struct SymmetricEigen {
  std::array<double, N> values{};      ///< descending
  std::array<double, N * N> vectors{};  ///< row-major; column k pairs with values[k]
};

/// Eigen-decomposes the symmetric matrix `a` (row-major, only the symmetric
/// part is meaningful). Converged when every off-diagonal entry is below
/// kJacobiRelTol * ||a||_F. Throws NoConvergence after kJacobiMaxSweeps.
template <std::size_t N>
SymmetricEigen<N> jacobi_eigen(std::array<double, N * N> a, bool want_vectors = true) {
  auto at = [&a](std::size_t i, std::size_t j) -> double& { return a[i * N + j]; };

  std::array<double, N * N> v{};
  if (want_vectors)
    for (std::size_t i = 0; i < N; ++i) v[i * N + i] = 1.0;

  double frob = 0.0;
  for (double x : a) frob += x * x;
  frob = std::sqrt(frob);
  if (!std::isfinite(frob)) throw Error(ErrorCode::NonFinite, "jacobi_eigen: non-finite input");
  const double threshold = kJacobiRelTol * frob;

  bool converged = false;
  for (int sweep = 0; sweep <= kJacobiMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < N; ++p)
      for (std::size_t q = p + 1; q < N; ++q) off = std::max(off, std::abs(at(p, q)));
    if (off <= threshold) {
      converged = true;
      break;
    }
    if (sweep == kJacobiMaxSweeps) break;

    for (std::size_t p = 0; p + 1 < N; ++p) {
      for (std::size_t q = p + 1; q < N; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        at(p, p) -= t * apq;
        at(q, q) += t * apq;
        at(p, q) = 0.0;
        at(q, p) = 0.0;
        for (std::size_t r = 0; r < N; ++r) {
          if (r == p || r == q) continue;
          const double arp = at(r, p);
          const double arq = at(r, q);
          at(r, p) = at(p, r) = c * arp - s * arq;
          at(r, q) = at(q, r) = s * arp + c * arq;
        }
        if (want_vectors) {
          for (std::size_t r = 0; r < N; ++r) {
            const double vrp = v[r * N + p];
            const double vrq = v[r * N + q];
            v[r * N + p] = c * vrp - s * vrq;
            v[r * N + q] = s * vrp + c * vrq;
          }
        }
      }
    }
  }
  if (!converged) throw Error(ErrorCode::NoConvergence, "jacobi_eigen: sweep limit reached");

  std::array<std::size_t, N> order{};
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return at(x, x) > at(y, y); });

  SymmetricEigen<N> out;
  for (std::size_t k = 0; k < N; ++k) {
    out.values[k] = at(order[k], order[k]);
    if (want_vectors)
      for (std::size_t r = 0; r < N; ++r) out.vectors[r * N + k] = v[r * N + order[k]];
  }
  return out;
}

}  // namespace muellerkit
