#pragma once

// Binary container formats. All integers and floats are little-endian.
//
// MMC1 cube file
//   offset  size  field
//   0       4     magic "MMC1"
//   4       4     u32 version (1)
//   8       4     u32 height
//   12      4     u32 width
//   16      4     u32 n_wavelengths
//   20      4     u32 dtype (0 = f32, 1 = f64)
//   24      4     u32 flags (bit0 normalized, bit1 m00 plane, bit2 mask)
//   28      4n    f32 wavelengths_nm[n], strictly increasing
//   ...     2     u16 element mask, bit 4*i+j = m(i,j)   (only if flag bit2)
//   ...           H*W*n*16 dtype values, order [lambda][row][col][i][j]
//   ...           H*W*n dtype values of pre-normalization m(0,0) (only if bit1)
//
// MMP1 plane file
//   0       4     magic "MMP1"
//   4       4     u32 version (1)
//   8       4     u32 height
//   12      4     u32 width
//   16      4     u32 dtype (0 = f32, 1 = f64, 2 = u8)
//   20      4     u32 kind (0 DELTA, 1 RET, 2 DIAT, 3 STATUS, 4 M00, 5 LABEL)
//   24      4     f32 wavelength_nm (0 when not applicable)
//   28            H*W dtype values, row-major

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "muellerkit/errors.hpp"
#include "muellerkit/polcore.hpp"
#include "muellerkit/realizability.hpp"

namespace muellerkit::io {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

inline constexpr std::uint32_t kFormatVersion = 1;
inline constexpr std::uint32_t kFlagNormalized = 1u << 0;
inline constexpr std::uint32_t kFlagM00Plane = 1u << 1;
inline constexpr std::uint32_t kFlagMask = 1u << 2;

enum class PlaneKind : std::uint32_t { Delta = 0, Ret = 1, Diat = 2, Status = 3, M00 = 4, Label = 5 };

constexpr std::string_view kind_name(PlaneKind k) noexcept {
  switch (k) {
    case PlaneKind::Delta: return "delta";
    case PlaneKind::Ret: return "ret";
    case PlaneKind::Diat: return "diat";
    case PlaneKind::Status: return "status";
    case PlaneKind::M00: return "m00";
    case PlaneKind::Label: return "label";
  }
  return "unknown";
}

constexpr std::size_t dtype_size(Dtype d) noexcept {
  switch (d) {
    case Dtype::F32: return 4;
    case Dtype::F64: return 8;
    case Dtype::U8: return 1;
  }
  return 0;
}

namespace detail {

class ByteWriter {
 public:
  void bytes(std::string_view s) { buf_.insert(buf_.end(), s.begin(), s.end()); }

  template <class T>
  void scalar(T v) {
    std::array<char, sizeof(T)> raw;
    std::memcpy(raw.data(), &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
    buf_.insert(buf_.end(), raw.begin(), raw.end());
  }

  void value(double v, Dtype d) {
    switch (d) {
      case Dtype::F32: scalar(static_cast<float>(v)); break;
      case Dtype::F64: scalar(v); break;
      case Dtype::U8: scalar(static_cast<std::uint8_t>(v)); break;
    }
  }

  [[nodiscard]] std::vector<char>& buffer() noexcept { return buf_; }

 private:
  std::vector<char> buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const char> data) noexcept : data_(data) {}

  [[nodiscard]] std::size_t remaining() const noexcept { return data_.size() - pos_; }

  void require(std::size_t n, const char* what) const {
    if (remaining() < n) throw Error(ErrorCode::TruncatedFile, std::string("file ends inside ") + what);
  }

  std::string_view bytes(std::size_t n, const char* what) {
    require(n, what);
    std::string_view s(data_.data() + pos_, n);
    pos_ += n;
    return s;
  }

  template <class T>
  T scalar(const char* what) {
    require(sizeof(T), what);
    std::array<char, sizeof(T)> raw;
    std::memcpy(raw.data(), data_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
    pos_ += sizeof(T);
    T v;
    std::memcpy(&v, raw.data(), sizeof(T));
    return v;
  }

  double value(Dtype d, const char* what) {
    switch (d) {
      case Dtype::F32: return static_cast<double>(scalar<float>(what));
      case Dtype::F64: return scalar<double>(what);
      case Dtype::U8: return static_cast<double>(scalar<std::uint8_t>(what));
    }
    return 0.0;
  }

 private:
  std::span<const char> data_;
  std::size_t pos_ = 0;
};

/// a * b with overflow reported as DimOverflow.
inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) throw Error(ErrorCode::DimOverflow, "declared dimensions overflow");
  return r;
}

inline std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  if (__builtin_add_overflow(a, b, &r)) throw Error(ErrorCode::DimOverflow, "declared dimensions overflow");
  return r;
}

inline Dtype parse_dtype(std::uint32_t raw, bool allow_u8) {
  if (raw == 0) return Dtype::F32;
  if (raw == 1) return Dtype::F64;
  if (raw == 2 && allow_u8) return Dtype::U8;
  throw Error(ErrorCode::BadHeader, "unknown dtype " + std::to_string(raw));
}

inline std::vector<char> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::BadPath, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_all(const std::filesystem::path& path, const std::vector<char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::BadPath, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::BadPath, "write failed for " + path.string());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Cubes

inline std::vector<char> encode_cube(const MuellerCube& cube) {
  cube.check();
  if (cube.storage == Dtype::U8) throw Error(ErrorCode::InvalidArgument, "cubes are stored as f32 or f64");
  detail::ByteWriter w;
  w.bytes("MMC1");
  w.scalar(kFormatVersion);
  w.scalar(cube.height);
  w.scalar(cube.width);
  w.scalar(static_cast<std::uint32_t>(cube.bands()));
  w.scalar(static_cast<std::uint32_t>(cube.storage));
  std::uint32_t flags = 0;
  if (cube.normalized) flags |= kFlagNormalized;
  if (cube.m00_plane) flags |= kFlagM00Plane;
  if (cube.mask) flags |= kFlagMask;
  w.scalar(flags);
  for (double wl : cube.wavelengths_nm) w.scalar(static_cast<float>(wl));
  if (cube.mask) w.scalar(cube.mask->bits());
  for (const auto& m : cube.data)
    for (double v : m.values()) w.value(v, cube.storage);
  if (cube.m00_plane)
    for (double v : *cube.m00_plane) w.value(v, cube.storage);
  return std::move(w.buffer());
}

/// Parses an MMC1 image. Never reads past `bytes` and never allocates more
/// than the input can back; malformed input raises a typed Error.
inline MuellerCube decode_cube(std::span<const char> bytes) {
  detail::ByteReader r(bytes);
  if (r.remaining() < 4) throw Error(ErrorCode::TruncatedFile, "file shorter than magic");
  if (r.bytes(4, "magic") != "MMC1") throw Error(ErrorCode::BadMagic, "expected MMC1");
  const auto version = r.scalar<std::uint32_t>("header");
  if (version != kFormatVersion) throw Error(ErrorCode::UnsupportedVersion, "version " + std::to_string(version));

  MuellerCube cube;
  cube.height = r.scalar<std::uint32_t>("header");
  cube.width = r.scalar<std::uint32_t>("header");
  const auto n_wl = r.scalar<std::uint32_t>("header");
  cube.storage = detail::parse_dtype(r.scalar<std::uint32_t>("header"), false);
  const auto flags = r.scalar<std::uint32_t>("header");
  if (cube.height == 0 || cube.width == 0 || n_wl == 0) throw Error(ErrorCode::BadHeader, "zero dimension");
  if (flags & ~(kFlagNormalized | kFlagM00Plane | kFlagMask)) throw Error(ErrorCode::BadHeader, "unknown flag bits");
  cube.normalized = flags & kFlagNormalized;
  const bool has_m00 = flags & kFlagM00Plane;
  if (cube.normalized && !has_m00) throw Error(ErrorCode::BadHeader, "normalized cube without m00 plane");

  r.require(std::size_t{n_wl} * 4, "wavelength table");
  cube.wavelengths_nm.resize(n_wl);
  for (auto& wl : cube.wavelengths_nm) {
    wl = static_cast<double>(r.scalar<float>("wavelength table"));
    if (!std::isfinite(wl)) throw Error(ErrorCode::BadHeader, "non-finite wavelength");
  }
  for (std::size_t k = 1; k < n_wl; ++k)
    if (!(cube.wavelengths_nm[k] > cube.wavelengths_nm[k - 1]))
      throw Error(ErrorCode::BadHeader, "wavelengths not strictly increasing");
  if (flags & kFlagMask) cube.mask = ElementMask(r.scalar<std::uint16_t>("mask"));

  const std::uint64_t n_pix = detail::checked_mul(detail::checked_mul(cube.height, cube.width), n_wl);
  const std::uint64_t elem = dtype_size(cube.storage);
  std::uint64_t need = detail::checked_mul(detail::checked_mul(n_pix, 16), elem);
  if (has_m00) need = detail::checked_add(need, detail::checked_mul(n_pix, elem));
  if (need > r.remaining()) throw Error(ErrorCode::TruncatedFile, "payload shorter than declared dimensions");
  if (need < r.remaining()) throw Error(ErrorCode::TrailingData, "bytes after declared payload");

  cube.data.resize(n_pix);
  for (auto& m : cube.data)
    for (auto& v : m.values()) v = r.value(cube.storage, "payload");
  if (has_m00) {
    cube.m00_plane.emplace(n_pix);
    for (auto& v : *cube.m00_plane) v = r.value(cube.storage, "m00 plane");
  }
  return cube;
}

inline void write_cube(const MuellerCube& cube, const std::filesystem::path& path) {
  detail::write_all(path, encode_cube(cube));
}

inline MuellerCube read_cube(const std::filesystem::path& path) {
  const auto bytes = detail::read_all(path);
  return decode_cube(bytes);
}

// ---------------------------------------------------------------------------
// Planes

struct Plane {
  PlaneKind kind = PlaneKind::Delta;
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  Dtype dtype = Dtype::F64;
  double wavelength_nm = 0.0;
  std::vector<double> values;  ///< u8 planes hold integral values 0..255
};

inline std::vector<char> encode_plane(const Plane& p) {
  if (p.height == 0 || p.width == 0) throw Error(ErrorCode::DimensionMismatch, "plane has an empty dimension");
  if (p.values.size() != std::size_t{p.height} * p.width)
    throw Error(ErrorCode::DimensionMismatch, "plane payload does not match dims");
  if (p.dtype == Dtype::U8)
    for (double v : p.values)
      if (!(v >= 0.0 && v <= 255.0 && v == std::floor(v)))
        throw Error(ErrorCode::InvalidArgument, "u8 plane value out of range");
  detail::ByteWriter w;
  w.bytes("MMP1");
  w.scalar(kFormatVersion);
  w.scalar(p.height);
  w.scalar(p.width);
  w.scalar(static_cast<std::uint32_t>(p.dtype));
  w.scalar(static_cast<std::uint32_t>(p.kind));
  w.scalar(static_cast<float>(p.wavelength_nm));
  for (double v : p.values) w.value(v, p.dtype);
  return std::move(w.buffer());
}

inline Plane decode_plane(std::span<const char> bytes) {
  detail::ByteReader r(bytes);
  if (r.remaining() < 4) throw Error(ErrorCode::TruncatedFile, "file shorter than magic");
  if (r.bytes(4, "magic") != "MMP1") throw Error(ErrorCode::BadMagic, "expected MMP1");
  const auto version = r.scalar<std::uint32_t>("header");
  if (version != kFormatVersion) throw Error(ErrorCode::UnsupportedVersion, "version " + std::to_string(version));
  Plane p;
  p.height = r.scalar<std::uint32_t>("header");
  p.width = r.scalar<std::uint32_t>("header");
  p.dtype = detail::parse_dtype(r.scalar<std::uint32_t>("header"), true);
  const auto kind = r.scalar<std::uint32_t>("header");
  if (kind > static_cast<std::uint32_t>(PlaneKind::Label)) throw Error(ErrorCode::BadHeader, "unknown plane kind");
  p.kind = static_cast<PlaneKind>(kind);
  p.wavelength_nm = static_cast<double>(r.scalar<float>("header"));
  if (!std::isfinite(p.wavelength_nm)) throw Error(ErrorCode::BadHeader, "non-finite wavelength");
  if (p.height == 0 || p.width == 0) throw Error(ErrorCode::BadHeader, "zero dimension");
  const std::uint64_t n = detail::checked_mul(p.height, p.width);
  const std::uint64_t need = detail::checked_mul(n, dtype_size(p.dtype));
  if (need > r.remaining()) throw Error(ErrorCode::TruncatedFile, "payload shorter than declared dimensions");
  if (need < r.remaining()) throw Error(ErrorCode::TrailingData, "bytes after declared payload");
  p.values.resize(n);
  for (auto& v : p.values) v = r.value(p.dtype, "payload");
  return p;
}

inline void write_plane(const Plane& p, const std::filesystem::path& path) { detail::write_all(path, encode_plane(p)); }

inline Plane read_plane(const std::filesystem::path& path) {
  const auto bytes = detail::read_all(path);
  return decode_plane(bytes);
}

/// Shortest decimal that round-trips the f32 wavelength, e.g. "450", "532.5".
inline std::string wavelength_tag(double wavelength_nm) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), static_cast<float>(wavelength_nm));
  return std::string(buf.data(), res.ptr);
}

inline std::string plane_filename(PlaneKind kind, double wavelength_nm, std::string_view ext = ".mmp") {
  return std::string(kind_name(kind)) + "_" + wavelength_tag(wavelength_nm) + std::string(ext);
}

// ---------------------------------------------------------------------------
// Parameter maps

/// One PlaneFile per (kind, wavelength) named <kind>_<wavelength>.mmp.
/// Scalar planes use `dtype` (f64 by default); status planes are u8.
inline std::vector<std::filesystem::path> write_maps(const LuChipmanMaps& maps, const std::filesystem::path& dir,
                                                     Dtype dtype = Dtype::F64) {
  if (dtype == Dtype::U8) throw Error(ErrorCode::InvalidArgument, "parameter planes need a float dtype");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::BadPath, "cannot create " + dir.string());
  std::vector<std::filesystem::path> written;
  for (const auto& band : maps.bands) {
    auto emit = [&](PlaneKind kind, Dtype dt, std::vector<double> values) {
      Plane p{kind, maps.height, maps.width, dt, band.wavelength_nm, std::move(values)};
      const auto path = dir / plane_filename(kind, band.wavelength_nm);
      write_plane(p, path);
      written.push_back(path);
    };
    emit(PlaneKind::Delta, dtype, band.depolarization);
    emit(PlaneKind::Ret, dtype, band.retardance);
    emit(PlaneKind::Diat, dtype, band.diattenuation);
    std::vector<double> status(band.status.size());
    for (std::size_t k = 0; k < status.size(); ++k) status[k] = static_cast<double>(band.status[k]);
    emit(PlaneKind::Status, Dtype::U8, std::move(status));
  }
  return written;
}

/// Collects every .mmp in `dir`; each wavelength found must carry all four
/// of delta, ret, diat and status planes with matching dimensions.
inline LuChipmanMaps read_maps(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw Error(ErrorCode::BadPath, "not a directory: " + dir.string());

  std::map<double, std::map<PlaneKind, Plane>> by_wavelength;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".mmp") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    Plane p = read_plane(f);
    if (p.kind == PlaneKind::Delta || p.kind == PlaneKind::Ret || p.kind == PlaneKind::Diat ||
        p.kind == PlaneKind::Status)
      by_wavelength[p.wavelength_nm][p.kind] = std::move(p);
  }
  if (by_wavelength.empty()) throw Error(ErrorCode::MissingPlane, "no parameter planes in " + dir.string());

  LuChipmanMaps maps;
  bool first = true;
  for (auto& [wl, planes] : by_wavelength) {
    for (PlaneKind k : {PlaneKind::Delta, PlaneKind::Ret, PlaneKind::Diat, PlaneKind::Status})
      if (!planes.count(k))
        throw Error(ErrorCode::MissingPlane, std::string(kind_name(k)) + " plane missing at " + wavelength_tag(wl));
    for (const auto& [k, p] : planes) {
      if (first) {
        maps.height = p.height;
        maps.width = p.width;
        first = false;
      } else if (p.height != maps.height || p.width != maps.width) {
        throw Error(ErrorCode::DimensionMismatch, "planes disagree on dimensions");
      }
    }
    LuChipmanBand band;
    band.wavelength_nm = wl;
    band.depolarization = std::move(planes[PlaneKind::Delta].values);
    band.retardance = std::move(planes[PlaneKind::Ret].values);
    band.diattenuation = std::move(planes[PlaneKind::Diat].values);
    for (double v : planes[PlaneKind::Status].values) {
      if (v > static_cast<double>(PixelStatus::UnphysicalInput))
        throw Error(ErrorCode::BadHeader, "unknown pixel status value");
      band.status.push_back(static_cast<PixelStatus>(static_cast<std::uint8_t>(v)));
    }
    maps.bands.push_back(std::move(band));
  }
  return maps;
}

// ---------------------------------------------------------------------------
// Validation

struct ValidationReport {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::size_t bands = 0;
  Dtype dtype = Dtype::F32;
  bool normalized = false;
  bool has_m00_plane = false;
  std::optional<std::uint16_t> mask_bits;
  std::size_t pixels = 0;
  std::size_t nan_entries = 0;
  std::size_t inf_entries = 0;
  std::size_t zero_intensity_pixels = 0;
  std::size_t unphysical_pixels = 0;
  std::size_t normalization_violations = 0;  ///< normalized cube pixels with m(0,0) != 1
  double fraction_physical = 0.0;

  [[nodiscard]] bool has_defects() const noexcept {
    return nan_entries + inf_entries + zero_intensity_pixels + unphysical_pixels + normalization_violations > 0;
  }
};

inline ValidationReport validate_cube(const MuellerCube& cube, double tol_phys = kPhysicalTolerance,
                                      std::size_t workers = 1) {
  ValidationReport rep;
  rep.height = cube.height;
  rep.width = cube.width;
  rep.bands = cube.bands();
  rep.dtype = cube.storage;
  rep.normalized = cube.normalized;
  rep.has_m00_plane = cube.m00_plane.has_value();
  if (cube.mask) rep.mask_bits = cube.mask->bits();
  rep.pixels = cube.data.size();
  for (const auto& m : cube.data) {
    for (double v : m.values()) {
      if (std::isnan(v)) ++rep.nan_entries;
      else if (std::isinf(v)) ++rep.inf_entries;
    }
    if (std::isfinite(m(0, 0)) && m(0, 0) <= kZeroIntensity) ++rep.zero_intensity_pixels;
    if (cube.normalized && m(0, 0) != 1.0) ++rep.normalization_violations;
  }
  const auto scan = scan_cube(cube, tol_phys, workers);
  rep.fraction_physical = scan.fraction_physical;
  rep.unphysical_pixels = scan.reports.size() - scan.physical_count;
  return rep;
}

inline ValidationReport validate_file(const std::filesystem::path& path, double tol_phys = kPhysicalTolerance,
                                      std::size_t workers = 1) {
  return validate_cube(read_cube(path), tol_phys, workers);
}

}  // namespace muellerkit::io
