#pragma once

// Core polarimetric types and the canonical Mueller-element constructors.
//
// Conventions (Stokes basis I, Q, U, V):
//   rotator      R(t) = [[1,0,0,0],[0,cos2t,sin2t,0],[0,-sin2t,cos2t,0],[0,0,0,1]]
//   retarder     fast axis at theta, retardance delta, C = cos2theta, S = sin2theta:
//                [[1,0,0,0],
//                 [0, C^2 + S^2 cos d, S C (1 - cos d), -S sin d],
//                 [0, S C (1 - cos d), S^2 + C^2 cos d,  C sin d],
//                 [0, S sin d,        -C sin d,          cos d ]]
//   diattenuator [[1, D^T],[D, sqrt(1-D^2) I + (1 - sqrt(1-D^2)) Dhat Dhat^T]]

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "muellerkit/errors.hpp"
#include "muellerkit/matrix.hpp"

namespace muellerkit {

/// Pixels whose total intensity m(0,0) is at or below this are treated as black
/// or saturated and are never divided through.
inline constexpr double kZeroIntensity = 1e-9;

using MuellerMatrix = SquareMatrix<4>;

inline Vec3 first_row_tail(const MuellerMatrix& m) noexcept { return {m(0, 1), m(0, 2), m(0, 3)}; }
inline Vec3 first_col_tail(const MuellerMatrix& m) noexcept { return {m(1, 0), m(2, 0), m(3, 0)}; }

inline Mat3 lower_right(const MuellerMatrix& m) noexcept {
  Mat3 r;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r(i, j) = m(i + 1, j + 1);
  return r;
}

/// Assembles [[corner, row^T],[col, block]].
inline MuellerMatrix assemble(double corner, const Vec3& row, const Vec3& col, const Mat3& block) noexcept {
  MuellerMatrix m;
  m(0, 0) = corner;
  for (std::size_t i = 0; i < 3; ++i) {
    m(0, i + 1) = row[i];
    m(i + 1, 0) = col[i];
    for (std::size_t j = 0; j < 3; ++j) m(i + 1, j + 1) = block(i, j);
  }
  return m;
}

struct NormalizeResult {
  MuellerMatrix matrix;  ///< m(0,0) == 1 exactly
  double m00 = 1.0;      ///< gain that was divided out
};

inline NormalizeResult normalize(const MuellerMatrix& m) {
  const double m00 = m(0, 0);
  for (double v : m.values())
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "matrix has a non-finite entry");
  if (m00 <= kZeroIntensity) throw Error(ErrorCode::M00NonPositive, "m(0,0) = " + std::to_string(m00));
  MuellerMatrix out = m;
  for (auto& v : out.values()) v /= m00;
  out(0, 0) = 1.0;
  return {out, m00};
}

inline MuellerMatrix make_diattenuator(const Vec3& d_vec) {
  const double d = norm(d_vec);
  // Unit vectors built in floating point can land an ulp or two above 1.
  if (!(d <= 1.0 + 1e-12)) throw Error(ErrorCode::DOutOfRange, "|D| = " + std::to_string(d));
  Mat3 block = Mat3::identity();
  if (d > 0.0) {
    const double a = std::sqrt(std::max(0.0, 1.0 - d * d));
    const Vec3 u{d_vec[0] / d, d_vec[1] / d, d_vec[2] / d};
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) block(i, j) = (i == j ? a : 0.0) + (1.0 - a) * (u[i] * u[j]);
  }
  return assemble(1.0, d_vec, d_vec, block);
}

inline MuellerMatrix make_linear_retarder(double theta, double delta) noexcept {
  const double c = std::cos(2.0 * theta);
  const double s = std::sin(2.0 * theta);
  const double cd = std::cos(delta);
  const double sd = std::sin(delta);
  return MuellerMatrix({1.0, 0.0, 0.0, 0.0,                                  //
                        0.0, c * c + s * s * cd, s * c * (1.0 - cd), -s * sd,  //
                        0.0, s * c * (1.0 - cd), s * s + c * c * cd, c * sd,   //
                        0.0, s * sd, -c * sd, cd});
}

inline MuellerMatrix make_diagonal_depolarizer(double a, double b, double c) noexcept {
  return MuellerMatrix::diagonal({1.0, a, b, c});
}

inline MuellerMatrix make_rotator(double theta) noexcept {
  const double c = std::cos(2.0 * theta);
  const double s = std::sin(2.0 * theta);
  return MuellerMatrix({1.0, 0.0, 0.0, 0.0,  //
                        0.0, c, s, 0.0,      //
                        0.0, -s, c, 0.0,     //
                        0.0, 0.0, 0.0, 1.0});
}

/// M_Delta * M_R * M_D, the forward Lu-Chipman ordering.
inline MuellerMatrix compose(const MuellerMatrix& depolarizer, const MuellerMatrix& retarder,
                             const MuellerMatrix& diattenuator) noexcept {
  return depolarizer * retarder * diattenuator;
}

// ---------------------------------------------------------------------------
// Element masks

/// 16-bit mask over Mueller elements; bit 4*i + j covers m(i,j).
class ElementMask {
 public:
  ElementMask() = default;
  explicit ElementMask(std::uint16_t bits, std::string name = {}) : bits_(bits), name_(std::move(name)) {}

  static ElementMask full() { return ElementMask(0xFFFF, "full"); }

  static ElementMask upper_left_3x3() {
    std::uint16_t b = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) b |= static_cast<std::uint16_t>(1u << (4 * i + j));
    return ElementMask(b, "ul3x3");
  }

  static ElementMask first_row_col() {
    std::uint16_t b = 0;
    for (int k = 0; k < 4; ++k) b |= static_cast<std::uint16_t>((1u << k) | (1u << (4 * k)));
    return ElementMask(b, "first-row-col");
  }

  /// Rows/cols 0-2 plus m(3,3); drops the linear-circular coupling terms.
  static ElementMask linear_only() {
    return ElementMask(static_cast<std::uint16_t>(upper_left_3x3().bits() | (1u << 15)), "linear-only");
  }

  static std::optional<ElementMask> preset(const std::string& name) {
    if (name == "full") return full();
    if (name == "ul3x3") return upper_left_3x3();
    if (name == "first-row-col") return first_row_col();
    if (name == "linear-only") return linear_only();
    return std::nullopt;
  }

  [[nodiscard]] bool test(std::size_t i, std::size_t j) const noexcept { return (bits_ >> (4 * i + j)) & 1u; }
  [[nodiscard]] std::uint16_t bits() const noexcept { return bits_; }
  [[nodiscard]] bool is_full() const noexcept { return bits_ == 0xFFFF; }
  [[nodiscard]] const std::string& name() const noexcept { return name_; }

  friend bool operator==(const ElementMask& a, const ElementMask& b) noexcept { return a.bits_ == b.bits_; }

 private:
  std::uint16_t bits_ = 0xFFFF;
  std::string name_;
};

inline ElementMask operator&(const ElementMask& a, const ElementMask& b) {
  return ElementMask(static_cast<std::uint16_t>(a.bits() & b.bits()));
}

inline MuellerMatrix apply_mask(MuellerMatrix m, const ElementMask& mask, double fill = 0.0) noexcept {
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      if (!mask.test(i, j)) m(i, j) = fill;
  return m;
}

// ---------------------------------------------------------------------------
// Cubes

enum class Dtype : std::uint32_t { F32 = 0, F64 = 1, U8 = 2 };

/// H x W x wavelengths stack of Mueller matrices, stored [lambda][row][col].
struct MuellerCube {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::vector<double> wavelengths_nm;
  std::vector<MuellerMatrix> data;
  bool normalized = false;
  std::optional<std::vector<double>> m00_plane;  ///< same [lambda][row][col] order as data
  std::optional<ElementMask> mask;
  Dtype storage = Dtype::F32;  ///< on-disk precision; in memory values are always double

  MuellerCube() = default;
  MuellerCube(std::uint32_t h, std::uint32_t w, std::vector<double> wavelengths,
              const MuellerMatrix& fill = MuellerMatrix::identity())
      : height(h), width(w), wavelengths_nm(std::move(wavelengths)),
        data(std::size_t{h} * w * wavelengths_nm.size(), fill) {}

  [[nodiscard]] std::size_t pixels_per_plane() const noexcept { return std::size_t{height} * width; }
  [[nodiscard]] std::size_t bands() const noexcept { return wavelengths_nm.size(); }
  [[nodiscard]] std::size_t index(std::size_t band, std::size_t row, std::size_t col) const noexcept {
    return (band * height + row) * width + col;
  }
  MuellerMatrix& at(std::size_t band, std::size_t row, std::size_t col) { return data[index(band, row, col)]; }
  [[nodiscard]] const MuellerMatrix& at(std::size_t band, std::size_t row, std::size_t col) const {
    return data[index(band, row, col)];
  }

  [[nodiscard]] bool is_masked() const noexcept { return mask.has_value() && !mask->is_full(); }

  /// Throws DimensionMismatch when any structural invariant fails.
  void check() const {
    if (height == 0 || width == 0 || wavelengths_nm.empty())
      throw Error(ErrorCode::DimensionMismatch, "cube has an empty dimension");
    if (data.size() != pixels_per_plane() * bands())
      throw Error(ErrorCode::DimensionMismatch, "data length does not match H*W*bands");
    for (std::size_t k = 1; k < wavelengths_nm.size(); ++k)
      if (!(wavelengths_nm[k] > wavelengths_nm[k - 1]))
        throw Error(ErrorCode::DimensionMismatch, "wavelengths must be strictly increasing");
    if (m00_plane && m00_plane->size() != data.size())
      throw Error(ErrorCode::DimensionMismatch, "m00 plane length does not match data");
    if (normalized && !m00_plane) throw Error(ErrorCode::DimensionMismatch, "normalized cube without m00 plane");
  }
};

/// Divides every pixel by its own m(0,0) and keeps the gains in m00_plane.
/// Fails on the first zero-intensity pixel rather than producing a partially
/// normalized cube.
inline MuellerCube normalize_cube(const MuellerCube& cube) {
  cube.check();
  if (cube.normalized) return cube;
  MuellerCube out = cube;
  std::vector<double> gains(cube.data.size());
  for (std::size_t k = 0; k < cube.data.size(); ++k) {
    try {
      auto [m, g] = normalize(cube.data[k]);
      out.data[k] = m;
      gains[k] = g;
    } catch (const Error& e) {
      throw Error(e.code(), "pixel " + std::to_string(k) + ": " + e.what());
    }
  }
  out.m00_plane = std::move(gains);
  out.normalized = true;
  return out;
}

// ---------------------------------------------------------------------------
// Decomposition results

enum class PixelStatus : std::uint8_t {
  Ok = 0,
  DegenerateDiattenuator = 1,
  SingularDepolarizer = 2,
  UnphysicalInput = 3,
};

struct LuChipmanPixel {
  double diattenuation = 0.0;   ///< D = |d_vec|, in [0,1]
  double retardance = 0.0;      ///< R in radians, [0, pi]
  double depolarization = 0.0;  ///< Delta in [0,1]
  Vec3 d_vec{};
  Vec3 p_vec{};
  MuellerMatrix m_diattenuator = MuellerMatrix::identity();
  MuellerMatrix m_retarder = MuellerMatrix::identity();
  MuellerMatrix m_depolarizer = MuellerMatrix::identity();
  PixelStatus status = PixelStatus::Ok;
  bool d_clamped = false;  ///< |d_vec| exceeded 1 and was rescaled onto the unit sphere
  bool projected = false;  ///< input was projected onto the physical set first
};

struct LuChipmanBand {
  double wavelength_nm = 0.0;
  std::vector<double> depolarization;
  std::vector<double> retardance;
  std::vector<double> diattenuation;
  std::vector<PixelStatus> status;
};

struct LuChipmanMaps {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::vector<LuChipmanBand> bands;

  LuChipmanMaps() = default;
  LuChipmanMaps(std::uint32_t h, std::uint32_t w, const std::vector<double>& wavelengths) : height(h), width(w) {
    const std::size_t n = std::size_t{h} * w;
    for (double wl : wavelengths)
      bands.push_back({wl, std::vector<double>(n), std::vector<double>(n), std::vector<double>(n),
                       std::vector<PixelStatus>(n, PixelStatus::Ok)});
  }

  [[nodiscard]] std::size_t pixels_per_plane() const noexcept { return std::size_t{height} * width; }
};

}  // namespace muellerkit
