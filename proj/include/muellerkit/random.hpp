#pragma once

// Pinned pseudo-random generation. Every split and synthetic cube derives
// from these definitions, so they must stay bit-identical across platforms:
//
//   splitmix64:   z = (s += 0x9E3779B97F4A7C15);
//                 z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9;
//                 z = (z ^ (z >> 27)) * 0x94D049BB133111EB;
//                 return z ^ (z >> 31);
//   xoshiro256**: state = four successive splitmix64 outputs of the seed;
//                 result = rotl(s1 * 5, 7) * 9, then the standard update.
//   bounded(n):   reject raw draws below (2^64 - n) mod n, return raw mod n.
//   shuffle:      Fisher-Yates from the top: for i = n-1 .. 1 swap(a[i], a[bounded(i+1)]).
//   uniform01:    (raw >> 11) * 2^-53.

#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

namespace muellerkit {

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}
  constexpr std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Xoshiro256(std::uint64_t seed) noexcept {
    SplitMix64 sm(seed);
    for (auto& w : s_) w = sm.next();
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  constexpr result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Unbiased integer in [0, n); n must be positive.
  constexpr std::uint64_t bounded(std::uint64_t n) noexcept {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = (*this)();
      if (r >= threshold) return r % n;
    }
  }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  constexpr double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4]{};
};

/// 0..n-1 in the pinned shuffled order for `seed`.
inline std::vector<std::uint64_t> shuffled_indices(std::uint64_t n, std::uint64_t seed) {
  std::vector<std::uint64_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::uint64_t{0});
  Xoshiro256 rng(seed);
  for (std::uint64_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng.bounded(i)]);
  return idx;
}

}  // namespace muellerkit
