#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace muellerkit {

using Vec3 = std::array<double, 3>;

inline double norm(const Vec3& v) noexcept { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

/// Dense row-major square matrix of fixed order. Used for the 3x3 blocks of
/// the decomposition and as the storage of MuellerMatrix.
template <std::size_t N>
class SquareMatrix {
 public:
  static constexpr std::size_t order = N;

  constexpr SquareMatrix() noexcept = default;
  constexpr explicit SquareMatrix(const std::array<double, N * N>& values) noexcept : a_(values) {}

  static constexpr SquareMatrix identity() noexcept {
    SquareMatrix m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = 1.0;
    return m;
  }

  static constexpr SquareMatrix diagonal(const std::array<double, N>& d) noexcept {
    SquareMatrix m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = d[i];
    return m;
  }

  constexpr double& operator()(std::size_t i, std::size_t j) noexcept { return a_[i * N + j]; }
  constexpr double operator()(std::size_t i, std::size_t j) const noexcept { return a_[i * N + j]; }

  [[nodiscard]] constexpr const std::array<double, N * N>& values() const noexcept { return a_; }
  [[nodiscard]] constexpr std::array<double, N * N>& values() noexcept { return a_; }

  [[nodiscard]] constexpr SquareMatrix transposed() const noexcept {
    SquareMatrix t;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  [[nodiscard]] constexpr double trace() const noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) s += (*this)(i, i);
    return s;
  }

  [[nodiscard]] bool all_finite() const noexcept {
    return std::all_of(a_.begin(), a_.end(), [](double x) { return std::isfinite(x); });
  }

  friend constexpr bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

  friend constexpr SquareMatrix operator*(const SquareMatrix& x, const SquareMatrix& y) noexcept {
    SquareMatrix r;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t k = 0; k < N; ++k) {
        const double xik = x(i, k);
        for (std::size_t j = 0; j < N; ++j) r(i, j) += xik * y(k, j);
      }
    return r;
  }

  friend constexpr SquareMatrix operator*(double s, SquareMatrix x) noexcept {
    for (auto& v : x.a_) v *= s;
    return x;
  }

  friend constexpr SquareMatrix operator+(SquareMatrix x, const SquareMatrix& y) noexcept {
    for (std::size_t k = 0; k < N * N; ++k) x.a_[k] += y.a_[k];
    return x;
  }

  friend constexpr SquareMatrix operator-(SquareMatrix x, const SquareMatrix& y) noexcept {
    for (std::size_t k = 0; k < N * N; ++k) x.a_[k] -= y.a_[k];
    return x;
  }

 private:
  std::array<double, N * N> a_{};
};

using Mat3 = SquareMatrix<3>;

inline double determinant(const Mat3& m) noexcept {
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

inline Vec3 operator*(const Mat3& m, const Vec3& v) noexcept {
  return {m(0, 0) * v[0] + m(0, 1) * v[1] + m(0, 2) * v[2], m(1, 0) * v[0] + m(1, 1) * v[1] + m(1, 2) * v[2],
          m(2, 0) * v[0] + m(2, 1) * v[1] + m(2, 2) * v[2]};
}

template <std::size_t N>
double max_abs_diff(const SquareMatrix<N>& a, const SquareMatrix<N>& b) noexcept {
  double d = 0.0;
  for (std::size_t k = 0; k < N * N; ++k) d = std::max(d, std::abs(a.values()[k] - b.values()[k]));
  return d;
}

}  // namespace muellerkit
