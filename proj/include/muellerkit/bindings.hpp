#pragma once

// Array-boundary entry points for host-language extensions. A host wraps its
// array object in an ArrayView, calls one of the bind_* functions, and takes
// ownership of the returned buffers. Results match the file-based CLI bitwise.

#include <cstddef>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "muellerkit/augment.hpp"
#include "muellerkit/luchipman.hpp"
#include "muellerkit/polcore.hpp"
#include "muellerkit/realizability.hpp"

namespace muellerkit::bind {

enum class ElementType { F32, F64 };

/// Borrowed buffer descriptor. Strides are in bytes; an empty stride list
/// means C-contiguous.
struct ArrayView {
  const void* base = nullptr;
  std::vector<std::size_t> shape;
  std::vector<std::ptrdiff_t> strides;
  ElementType type = ElementType::F64;
};

/// Owned result buffer, row-major.
template <typename T>
struct Array {
  std::vector<std::size_t> shape;
  std::vector<T> values;
};

namespace detail {

inline std::size_t element_size(ElementType t) noexcept { return t == ElementType::F32 ? 4 : 8; }

inline void require_contiguous(const ArrayView& v) {
  if (v.base == nullptr) throw Error(ErrorCode::InvalidArgument, "array view has no buffer");
  if (v.strides.empty()) return;
  if (v.strides.size() != v.shape.size()) throw Error(ErrorCode::NotContiguous, "stride and shape ranks differ");
  auto expected = static_cast<std::ptrdiff_t>(element_size(v.type));
  for (std::size_t k = v.shape.size(); k-- > 0;) {
    if (v.shape[k] > 1 && v.strides[k] != expected)
      throw Error(ErrorCode::NotContiguous, "array is not C-contiguous");
    expected *= static_cast<std::ptrdiff_t>(v.shape[k]);
  }
}

inline double load(const ArrayView& v, std::size_t k) noexcept {
  if (v.type == ElementType::F32) {
    float f;
    std::memcpy(&f, static_cast<const char*>(v.base) + 4 * k, 4);
    return f;
  }
  double d;
  std::memcpy(&d, static_cast<const char*>(v.base) + 8 * k, 8);
  return d;
}

/// Shape must be [bands, H, W, 4, 4].
inline MuellerCube cube_from_view(const ArrayView& v) {
  require_contiguous(v);
  if (v.shape.size() != 5 || v.shape[3] != 4 || v.shape[4] != 4)
    throw Error(ErrorCode::DimensionMismatch, "expected shape [bands, H, W, 4, 4]");
  if (v.shape[0] == 0 || v.shape[1] == 0 || v.shape[2] == 0 || v.shape[1] > UINT32_MAX || v.shape[2] > UINT32_MAX)
    throw Error(ErrorCode::DimensionMismatch, "empty or oversized cube dimension");
  std::vector<double> wl(v.shape[0]);
  for (std::size_t b = 0; b < wl.size(); ++b) wl[b] = static_cast<double>(b);
  MuellerCube cube(static_cast<std::uint32_t>(v.shape[1]), static_cast<std::uint32_t>(v.shape[2]), std::move(wl));
  cube.storage = v.type == ElementType::F32 ? Dtype::F32 : Dtype::F64;
  std::size_t k = 0;
  for (auto& m : cube.data)
    for (auto& x : m.values()) x = load(v, k++);
  return cube;
}

}  // namespace detail

struct DecomposeArrays {
  Array<double> depolarization, retardance, diattenuation;  ///< [bands, H, W]
  Array<std::uint8_t> status;
};

inline DecomposeArrays bind_decompose(const ArrayView& cube, const DecomposeOptions& opts = {}) {
  const auto maps = decompose_cube(detail::cube_from_view(cube), opts);
  const std::vector<std::size_t> shape{maps.bands.size(), maps.height, maps.width};
  DecomposeArrays out{{shape, {}}, {shape, {}}, {shape, {}}, {shape, {}}};
  for (const auto& b : maps.bands) {
    out.depolarization.values.insert(out.depolarization.values.end(), b.depolarization.begin(), b.depolarization.end());
    out.retardance.values.insert(out.retardance.values.end(), b.retardance.begin(), b.retardance.end());
    out.diattenuation.values.insert(out.diattenuation.values.end(), b.diattenuation.begin(), b.diattenuation.end());
    for (auto s : b.status) out.status.values.push_back(static_cast<std::uint8_t>(s));
  }
  return out;
}

/// Result has the input's shape; values are rounded to the input element type
/// exactly as the cube writer would store them.
inline Array<double> bind_project(const ArrayView& cube, double clip = kProjectionClip, std::size_t workers = 1) {
  const auto in = detail::cube_from_view(cube);
  const auto projected = project_cube(in, clip, kPhysicalTolerance, workers);
  Array<double> out{cube.shape, {}};
  out.values.reserve(projected.data.size() * 16);
  for (const auto& m : projected.data)
    for (double x : m.values())
      out.values.push_back(in.storage == Dtype::F32 ? static_cast<double>(static_cast<float>(x)) : x);
  return out;
}

/// 1 where the pixel is physical, shape [bands, H, W].
inline Array<std::uint8_t> bind_is_physical(const ArrayView& cube, double tol = kPhysicalTolerance,
                                            std::size_t workers = 1) {
  const auto scan = scan_cube(detail::cube_from_view(cube), tol, workers);
  Array<std::uint8_t> out{{cube.shape[0], cube.shape[1], cube.shape[2]}, {}};
  out.values.reserve(scan.reports.size());
  for (const auto& r : scan.reports) out.values.push_back(r.physical ? 1 : 0);
  return out;
}

inline Array<double> bind_rotate_frame(const ArrayView& cube, double theta) {
  const auto in = detail::cube_from_view(cube);
  Array<double> out{cube.shape, {}};
  out.values.reserve(in.data.size() * 16);
  for (const auto& m : in.data) {
    const auto r = rotate_frame(m, theta);
    for (double x : r.values()) out.values.push_back(x);
  }
  return out;
}

inline Array<double> bind_apply_mask(const ArrayView& cube, std::uint16_t bits, double fill = 0.0) {
  const auto masked = apply_mask(detail::cube_from_view(cube), ElementMask(bits), fill);
  Array<double> out{cube.shape, {}};
  out.values.reserve(masked.data.size() * 16);
  for (const auto& m : masked.data)
    for (double x : m.values()) out.values.push_back(x);
  return out;
}

}  // namespace muellerkit::bind
