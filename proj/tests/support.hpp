#pragma once

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "muellerkit/muellerkit.hpp"

namespace testing_support {

using muellerkit::MuellerMatrix;
using muellerkit::Xoshiro256;

/// Entries uniform in [-1, 1]; typically unphysical.
inline MuellerMatrix random_matrix(Xoshiro256& rng) {
  MuellerMatrix m;
  for (auto& x : m.values()) x = rng.uniform(-1.0, 1.0);
  return m;
}

/// Like random_matrix but with m00 = 1 and a little more weight on the diagonal,
/// so a good share of draws are physical.
inline MuellerMatrix random_near_physical(Xoshiro256& rng) {
  MuellerMatrix m;
  for (auto& x : m.values()) x = rng.uniform(-0.3, 0.3);
  m(0, 0) = 1.0;
  for (std::size_t i = 1; i < 4; ++i) m(i, i) = rng.uniform(-1.0, 1.0);
  return m;
}

inline MuellerMatrix random_physical(Xoshiro256& rng) { return muellerkit::random_composition(rng).matrix(); }

/// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("muellerkit_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  [[nodiscard]] const std::filesystem::path& path() const { return path_; }
  [[nodiscard]] std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing_support

namespace testing_support {

inline bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

/// Field-by-field bitwise comparison (NaN payloads included).
inline bool cubes_identical(const muellerkit::MuellerCube& a, const muellerkit::MuellerCube& b) {
  if (a.height != b.height || a.width != b.width || a.normalized != b.normalized || a.storage != b.storage)
    return false;
  if (a.wavelengths_nm.size() != b.wavelengths_nm.size() || a.data.size() != b.data.size()) return false;
  for (std::size_t k = 0; k < a.wavelengths_nm.size(); ++k)
    if (!same_bits(a.wavelengths_nm[k], b.wavelengths_nm[k])) return false;
  for (std::size_t k = 0; k < a.data.size(); ++k)
    for (std::size_t e = 0; e < 16; ++e)
      if (!same_bits(a.data[k].values()[e], b.data[k].values()[e])) return false;
  if (a.m00_plane.has_value() != b.m00_plane.has_value()) return false;
  if (a.m00_plane)
    for (std::size_t k = 0; k < a.m00_plane->size(); ++k)
      if (!same_bits((*a.m00_plane)[k], (*b.m00_plane)[k])) return false;
  if (a.mask.has_value() != b.mask.has_value()) return false;
  return !a.mask || a.mask->bits() == b.mask->bits();
}

}  // namespace testing_support
