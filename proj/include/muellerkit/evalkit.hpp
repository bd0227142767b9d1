#pragma once

// Segmentation/classification metrics and the few-shot / cross-validation
// protocol arithmetic.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "muellerkit/errors.hpp"
#include "muellerkit/random.hpp"

namespace muellerkit::eval {

/// Label value that marks an unannotated pixel; excluded from every metric.
inline constexpr std::uint8_t kUnlabeled = 255;

/// 2|A n B| / (|A| + |B|) for one class. Pixels unlabeled in either plane are
/// skipped. Both sets empty gives 1.
inline double dice(std::span<const std::uint8_t> pred, std::span<const std::uint8_t> gt, std::uint8_t class_id) {
  if (pred.size() != gt.size()) throw Error(ErrorCode::DimensionMismatch, "dice: plane sizes differ");
  std::uint64_t a = 0, b = 0, both = 0;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    if (pred[k] == kUnlabeled || gt[k] == kUnlabeled) continue;
    const bool in_a = pred[k] == class_id;
    const bool in_b = gt[k] == class_id;
    a += in_a;
    b += in_b;
    both += in_a && in_b;
  }
  if (a + b == 0) return 1.0;
  return 2.0 * static_cast<double>(both) / static_cast<double>(a + b);
}

/// Unweighted mean of per-class dice.
inline double macro_dice(std::span<const std::uint8_t> pred, std::span<const std::uint8_t> gt,
                         std::span<const std::uint8_t> class_ids) {
  if (class_ids.empty()) throw Error(ErrorCode::EmptyInput, "macro_dice: no classes");
  double sum = 0.0;
  for (auto c : class_ids) sum += dice(pred, gt, c);
  return sum / static_cast<double>(class_ids.size());
}

struct BinaryConfusion {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  [[nodiscard]] std::uint64_t total() const noexcept { return tp + fp + tn + fn; }
  friend bool operator==(const BinaryConfusion&, const BinaryConfusion&) = default;
};

/// Tallies predictions against ground truth with `positive` as the positive
/// class; unlabeled entries are skipped.
inline BinaryConfusion confusion(std::span<const std::uint8_t> pred, std::span<const std::uint8_t> gt,
                                 std::uint8_t positive = 1) {
  if (pred.size() != gt.size()) throw Error(ErrorCode::DimensionMismatch, "confusion: sizes differ");
  BinaryConfusion c;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    if (pred[k] == kUnlabeled || gt[k] == kUnlabeled) continue;
    const bool p = pred[k] == positive;
    const bool g = gt[k] == positive;
    if (p && g) ++c.tp;
    else if (p) ++c.fp;
    else if (g) ++c.fn;
    else ++c.tn;
  }
  return c;
}

/// Empty optionals mark undefined ratios (zero denominators).
struct ClassificationMetrics {
  std::optional<double> accuracy;
  std::optional<double> sensitivity;
  std::optional<double> specificity;
};

inline ClassificationMetrics classify_metrics(const BinaryConfusion& c) {
  auto ratio = [](std::uint64_t num, std::uint64_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  return {ratio(c.tp + c.tn, c.total()), ratio(c.tp, c.tp + c.fn), ratio(c.tn, c.tn + c.fp)};
}

struct SplitSpec {
  std::uint64_t n_items = 0;
  double fraction = 1.0;  ///< in (0, 1]
  std::uint64_t seed = 0;
};

/// Subset size max(1, round(fraction * n)).
inline std::uint64_t fewshot_count(const SplitSpec& spec) {
  if (spec.n_items == 0) throw Error(ErrorCode::EmptyInput, "fewshot: no items");
  if (!(spec.fraction > 0.0 && spec.fraction <= 1.0))
    throw Error(ErrorCode::InvalidFraction, "fewshot: fraction must lie in (0, 1]");
  const auto k = static_cast<std::uint64_t>(std::llround(spec.fraction * static_cast<double>(spec.n_items)));
  return std::max<std::uint64_t>(1, std::min(k, spec.n_items));
}

/// First fewshot_count() entries of the pinned seeded shuffle.
inline std::vector<std::uint64_t> fewshot_indices(const SplitSpec& spec) {
  const std::uint64_t k = fewshot_count(spec);
  auto idx = shuffled_indices(spec.n_items, spec.seed);
  idx.resize(k);
  return idx;
}

struct TrainValTest {
  std::vector<std::uint64_t> train, val, test;
};

/// Seeded 60/20/20 partition: one shuffle, consecutive slices, no overlap.
inline TrainValTest train_val_test_split(std::uint64_t n_items, std::uint64_t seed, double train_fraction = 0.6,
                                         double val_fraction = 0.2) {
  if (n_items == 0) throw Error(ErrorCode::EmptyInput, "split: no items");
  if (!(train_fraction > 0.0 && val_fraction >= 0.0 && train_fraction + val_fraction <= 1.0))
    throw Error(ErrorCode::InvalidFraction, "split: fractions must be nonnegative and sum to at most 1");
  const auto idx = shuffled_indices(n_items, seed);
  const auto n = static_cast<double>(n_items);
  const auto n_train = std::min<std::uint64_t>(n_items, static_cast<std::uint64_t>(std::llround(train_fraction * n)));
  const auto n_val =
      std::min<std::uint64_t>(n_items - n_train, static_cast<std::uint64_t>(std::llround(val_fraction * n)));
  TrainValTest out;
  out.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.val.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train),
                 idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  out.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), idx.end());
  return out;
}

struct CvSplit {
  std::uint32_t test = 0;
  std::uint32_t val = 0;
  std::vector<std::uint32_t> train;
};

/// Every ordered (test, val) pair of distinct specimens, test-major; the
/// remaining specimens train. n specimens give n(n-1) splits.
inline std::vector<CvSplit> nested_cv_splits(std::uint32_t n_specimens) {
  if (n_specimens < 3)
    throw Error(ErrorCode::TooFewSpecimens, "nested CV needs at least 3 specimens (test, val, and one to train)");
  std::vector<CvSplit> out;
  out.reserve(std::size_t{n_specimens} * (n_specimens - 1));
  for (std::uint32_t t = 0; t < n_specimens; ++t)
    for (std::uint32_t v = 0; v < n_specimens; ++v) {
      if (v == t) continue;
      CvSplit s{t, v, {}};
      for (std::uint32_t k = 0; k < n_specimens; ++k)
        if (k != t && k != v) s.train.push_back(k);
      out.push_back(std::move(s));
    }
  return out;
}

struct Aggregate {
  double mean = 0.0;
  std::optional<double> stddev;  ///< sample (n-1) standard deviation; empty for n = 1
  std::size_t n = 0;
};

inline Aggregate aggregate(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "aggregate: no values");
  Aggregate out;
  out.n = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

}  // namespace muellerkit::eval
