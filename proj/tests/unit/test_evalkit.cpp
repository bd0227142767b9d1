#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "muellerkit/evalkit.hpp"

using namespace muellerkit;
using namespace muellerkit::eval;

namespace {

using Labels = std::vector<std::uint8_t>;

}  // namespace

TEST(Dice, Examples) {
  const Labels a{1, 1, 0, 0, 1};
  EXPECT_EQ(dice(a, a, 1), 1.0);
  EXPECT_EQ(dice(Labels{1, 1, 0, 0}, Labels{0, 0, 1, 1}, 1), 0.0);
  EXPECT_EQ(dice(Labels{1, 1, 1, 1, 0, 0}, Labels{1, 1, 0, 0, 1, 1}, 1), 0.5);
  EXPECT_EQ(dice(Labels{0, 0}, Labels{0, 0}, 1), 1.0);
  EXPECT_EQ(dice(Labels{0, 0}, Labels{1, 0}, 1), 0.0);
  EXPECT_THROW(dice(Labels{0}, Labels{0, 1}, 1), Error);
}

TEST(Dice, UnlabeledExcluded) {
  EXPECT_EQ(dice(Labels{1, 255, 0}, Labels{1, 1, 255}, 1), 1.0);
}

TEST(Dice, SymmetricAndBounded) {
  Xoshiro256 rng(1);
  for (int n = 0; n < 500; ++n) {
    Labels p(1 + rng.bounded(50)), g(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
      p[k] = static_cast<std::uint8_t>(rng.bounded(3));
      g[k] = rng.bounded(10) == 0 ? kUnlabeled : static_cast<std::uint8_t>(rng.bounded(3));
    }
    for (std::uint8_t c = 0; c < 3; ++c) {
      const double d = dice(p, g, c);
      EXPECT_EQ(d, dice(g, p, c));
      EXPECT_GE(d, 0.0);
      EXPECT_LE(d, 1.0);
    }
    const Labels one{1};
    EXPECT_EQ(macro_dice(p, g, one), dice(p, g, 1));
  }
}

TEST(MacroDice, Examples) {
  const Labels ids{0, 1};
  EXPECT_EQ(macro_dice(Labels{0, 1}, Labels{0, 1}, ids), 1.0);
  // class 0: both present and equal; class 1 predicted but absent.
  EXPECT_EQ(macro_dice(Labels{0, 1}, Labels{0, 0}, ids), (2.0 / 3.0 + 0.0) / 2.0);
  EXPECT_EQ(macro_dice(Labels{0, 0}, Labels{0, 0}, Labels{0}), 1.0);
  EXPECT_THROW(macro_dice(Labels{0}, Labels{0}, Labels{}), Error);
}

TEST(MacroDice, GreyWhiteAverage) {
  // GM dice 1.0 (class 0) and WM dice 0.0 (class 1) average to 0.5.
  EXPECT_EQ(macro_dice(Labels{0, 1, 2}, Labels{0, 2, 1}, Labels{0, 1}), 0.5);
}

TEST(Classify, Examples) {
  auto m = classify_metrics({5, 0, 5, 0});
  EXPECT_EQ(*m.accuracy, 1.0);
  EXPECT_EQ(*m.sensitivity, 1.0);
  EXPECT_EQ(*m.specificity, 1.0);
  m = classify_metrics({0, 5, 0, 5});
  EXPECT_EQ(*m.accuracy, 0.0);
  EXPECT_EQ(*m.sensitivity, 0.0);
  EXPECT_EQ(*m.specificity, 0.0);
  m = classify_metrics({0, 3, 4, 0});
  EXPECT_FALSE(m.sensitivity.has_value());
  EXPECT_TRUE(m.specificity.has_value());
  m = classify_metrics({});
  EXPECT_FALSE(m.accuracy.has_value());
}

TEST(Classify, AccuracyIsPrevalenceWeightedMean) {
  Xoshiro256 rng(2);
  for (int n = 0; n < 1000; ++n) {
    BinaryConfusion c{rng.bounded(50), rng.bounded(50), rng.bounded(50), rng.bounded(50)};
    const double pos = static_cast<double>(c.tp + c.fn), neg = static_cast<double>(c.tn + c.fp);
    if (pos == 0 || neg == 0) continue;
    const auto m = classify_metrics(c);
    EXPECT_NEAR(*m.accuracy, (*m.sensitivity * pos + *m.specificity * neg) / (pos + neg), 1e-15);
  }
}

TEST(Confusion, Tallies) {
  const auto c = confusion(Labels{1, 1, 0, 0, 255, 1}, Labels{1, 0, 1, 0, 1, 255});
  EXPECT_EQ(c, (BinaryConfusion{1, 1, 1, 1}));
}

TEST(FewShot, Counts) {
  for (auto [f, k] : std::vector<std::pair<double, std::uint64_t>>{{0.01, 1}, {0.05, 5}, {0.25, 25}, {0.5, 50}, {1.0, 100}})
    EXPECT_EQ(fewshot_indices({100, f, 7}).size(), k);
  EXPECT_EQ(fewshot_count({10, 0.01, 0}), 1u);
  EXPECT_EQ(fewshot_count({3, 0.5, 0}), 2u);
}

TEST(FewShot, FullFractionIsPermutation) {
  auto idx = fewshot_indices({50, 1.0, 3});
  std::set<std::uint64_t> s(idx.begin(), idx.end());
  EXPECT_EQ(s.size(), 50u);
  EXPECT_EQ(idx, shuffled_indices(50, 3));
}

TEST(FewShot, Deterministic) {
  EXPECT_EQ(fewshot_indices({100, 0.25, 11}), fewshot_indices({100, 0.25, 11}));
  EXPECT_NE(fewshot_indices({100, 0.25, 11}), fewshot_indices({100, 0.25, 12}));
  // Smaller fractions are prefixes of larger ones under the same seed.
  const auto small = fewshot_indices({100, 0.05, 11});
  const auto big = fewshot_indices({100, 0.5, 11});
  EXPECT_TRUE(std::equal(small.begin(), small.end(), big.begin()));
}

TEST(FewShot, Errors) {
  try {
    fewshot_indices({100, 0.0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidFraction);
  }
  EXPECT_THROW(fewshot_indices({100, 1.5, 1}), Error);
  EXPECT_THROW(fewshot_indices({100, std::nan(""), 1}), Error);
  EXPECT_THROW(fewshot_indices({0, 0.5, 1}), Error);
}

TEST(TrainValTest, SixtyTwentyTwenty) {
  const auto s = train_val_test_split(100, 9);
  EXPECT_EQ(s.train.size(), 60u);
  EXPECT_EQ(s.val.size(), 20u);
  EXPECT_EQ(s.test.size(), 20u);
  std::set<std::uint64_t> all(s.train.begin(), s.train.end());
  all.insert(s.val.begin(), s.val.end());
  all.insert(s.test.begin(), s.test.end());
  EXPECT_EQ(all.size(), 100u);
  const auto t = train_val_test_split(7, 9);
  EXPECT_EQ(t.train.size() + t.val.size() + t.test.size(), 7u);
  EXPECT_THROW(train_val_test_split(10, 1, 0.9, 0.2), Error);
}

TEST(NestedCv, SixSpecimens) {
  const auto splits = nested_cv_splits(6);
  ASSERT_EQ(splits.size(), 30u);
  std::map<std::uint32_t, int> as_test;
  std::set<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (const auto& s : splits) {
    EXPECT_NE(s.test, s.val);
    EXPECT_EQ(s.train.size(), 4u);
    for (auto t : s.train) {
      EXPECT_NE(t, s.test);
      EXPECT_NE(t, s.val);
    }
    ++as_test[s.test];
    pairs.insert({s.test, s.val});
  }
  EXPECT_EQ(pairs.size(), 30u);
  for (const auto& [id, count] : as_test) EXPECT_EQ(count, 5);
}

TEST(NestedCv, ThreeAndTooFew) {
  const auto splits = nested_cv_splits(3);
  EXPECT_EQ(splits.size(), 6u);
  for (const auto& s : splits) EXPECT_EQ(s.train.size(), 1u);
  try {
    nested_cv_splits(1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooFewSpecimens);
  }
  EXPECT_THROW(nested_cv_splits(2), Error);
}

TEST(Aggregate, Examples) {
  auto a = aggregate(std::vector<double>{1, 1, 1});
  EXPECT_EQ(a.mean, 1.0);
  EXPECT_EQ(*a.stddev, 0.0);
  a = aggregate(std::vector<double>{0, 1});
  EXPECT_EQ(a.mean, 0.5);
  EXPECT_NEAR(*a.stddev, std::sqrt(0.5), 1e-15);
  a = aggregate(std::vector<double>{0.3});
  EXPECT_EQ(a.mean, 0.3);
  EXPECT_FALSE(a.stddev.has_value());
  EXPECT_THROW(aggregate(std::vector<double>{}), Error);
}
