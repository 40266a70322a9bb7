#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <stdexcept>

#include "pathwise/partitions.hpp"

namespace pw = pathwise;

namespace {

std::vector<double> as_vector(std::span<const double> s) { return {s.begin(), s.end()}; }

}  // namespace

TEST(Partitions, DyadicLevelsOnUnitHorizon) {
  const auto seq = pw::PartitionSequence::dyadic(1.0, 2);
  ASSERT_EQ(seq.level_count(), 3);
  EXPECT_EQ(as_vector(seq.level(0)), (std::vector<double>{0, 1}));
  EXPECT_EQ(as_vector(seq.level(1)), (std::vector<double>{0, .5, 1}));
  EXPECT_EQ(as_vector(seq.level(2)), (std::vector<double>{0, .25, .5, .75, 1}));
  EXPECT_TRUE(seq.nested());
  EXPECT_TRUE(seq.dense());
}

TEST(Partitions, DyadicOnLongerHorizon) {
  const auto seq = pw::PartitionSequence::dyadic(2.0, 1);
  EXPECT_EQ(as_vector(seq.level(1)), (std::vector<double>{0, 1, 2}));
}

TEST(Partitions, DyadicMeshHalvesPerLevel) {
  const auto seq = pw::PartitionSequence::dyadic(3.0, 10);
  for (int n = 0; n <= 10; ++n) EXPECT_EQ(seq.mesh(n), std::ldexp(3.0, -n));
}

TEST(Partitions, DyadicRejectsBadArguments) {
  EXPECT_THROW(pw::PartitionSequence::dyadic(0.0, 3), std::invalid_argument);
  EXPECT_THROW(pw::PartitionSequence::dyadic(-1.0, 3), std::invalid_argument);
  EXPECT_THROW(pw::PartitionSequence::dyadic(1.0, 0), std::invalid_argument);
}

TEST(Partitions, DyadicNestingIsExact) {
  const auto seq = pw::PartitionSequence::dyadic(0.7, 12);
  for (int n = 0; n < 12; ++n) {
    const auto a = seq.level(n);
    const auto b = seq.level(n + 1);
    EXPECT_TRUE(std::includes(b.begin(), b.end(), a.begin(), a.end())) << "level " << n;
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[2 * i]);
  }
}

TEST(Partitions, RefineWithOneThird) {
  const auto seq = pw::PartitionSequence::dyadic(1.0, 1).refine_with(std::vector<double>{1.0 / 3});
  EXPECT_EQ(as_vector(seq.level(0)), (std::vector<double>{0, 1.0 / 3, 1}));
  EXPECT_EQ(as_vector(seq.level(1)), (std::vector<double>{0, 1.0 / 3, .5, 1}));
  EXPECT_TRUE(seq.nested());
}

TEST(Partitions, RefineWithNothingIsIdentity) {
  const auto base = pw::PartitionSequence::dyadic(1.0, 4);
  const auto seq = base.refine_with({});
  EXPECT_EQ(seq.levels(), base.levels());
}

TEST(Partitions, RefinedLevelsContainExtraTimes) {
  const std::vector<double> extra{0.1, 0.9};
  const auto seq = pw::PartitionSequence::dyadic(1.0, 3).refine_with(extra);
  for (int n = 0; n <= 3; ++n) {
    EXPECT_TRUE(seq.contains(n, 0.1));
    EXPECT_TRUE(seq.contains(n, 0.9));
  }
  EXPECT_TRUE(seq.covers(extra));
  EXPECT_TRUE(seq.nested());
}

TEST(Partitions, RefineRejectsTimesOutsideHorizon) {
  const auto seq = pw::PartitionSequence::dyadic(1.0, 2);
  EXPECT_THROW(seq.refine_with(std::vector<double>{1.5}), std::invalid_argument);
  EXPECT_THROW(seq.refine_with(std::vector<double>{-0.1}), std::invalid_argument);
}

TEST(Partitions, LastIndexBeforeUsesStrictLeftInequality) {
  const auto seq = pw::PartitionSequence::dyadic(1.0, 2);
  EXPECT_EQ(seq.last_index_before(2, 0.5), 1u);
  EXPECT_EQ(seq.last_index_before(2, 1.0), 3u);
  EXPECT_EQ(seq.last_index_before(2, 0.26), 1u);
  EXPECT_EQ(seq.last_index_before(2, 0.25), 0u);
}

TEST(Partitions, LastIndexBeforeRejectsOutOfRange) {
  const auto seq = pw::PartitionSequence::dyadic(1.0, 2);
  EXPECT_THROW(seq.last_index_before(2, 0.0), std::out_of_range);
  EXPECT_THROW(seq.last_index_before(2, 1.0001), std::out_of_range);
  EXPECT_THROW(seq.last_index_before(3, 0.5), std::out_of_range);
}

TEST(Partitions, LastIndexBeforeBracketsEveryTime) {
  const auto seq = pw::PartitionSequence::dyadic(1.0, 6).refine_with(std::vector<double>{0.3, 0.71});
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    double t = u(rng);
    if (trial % 7 == 0) t = seq.finest()[1 + trial % (seq.finest().size() - 1)];
    if (t == 0.0) continue;
    for (int n = 0; n <= seq.top_level(); ++n) {
      const auto lv = seq.level(n);
      const auto k = seq.last_index_before(n, t);
      EXPECT_LT(lv[k], t);
      EXPECT_LE(t, lv[k + 1]);
    }
  }
}

TEST(Partitions, LastIndexAtOrBefore) {
  const auto seq = pw::PartitionSequence::dyadic(1.0, 2);
  EXPECT_EQ(seq.last_index_at_or_before(2, 0.0), 0u);
  EXPECT_EQ(seq.last_index_at_or_before(2, 0.5), 2u);
  EXPECT_EQ(seq.last_index_at_or_before(2, 0.6), 2u);
  EXPECT_EQ(seq.last_index_at_or_before(2, 1.0), 4u);
}

TEST(Partitions, ExplicitLevelsDetectNesting) {
  const auto nested = pw::PartitionSequence::from_levels(1.0, {{0, 1}, {0, 0.4, 1}, {0, 0.2, 0.4, 1}}, true);
  EXPECT_TRUE(nested.nested());
  EXPECT_EQ(nested.kind(), pw::PartitionSequence::Kind::explicit_levels);
  const auto loose = pw::PartitionSequence::from_levels(1.0, {{0, 0.5, 1}, {0, 0.3, 0.6, 1}}, false);
  EXPECT_FALSE(loose.nested());
}

TEST(Partitions, ExplicitLevelsAreValidated) {
  EXPECT_THROW(pw::PartitionSequence::from_levels(1.0, {{0.1, 1}}, false), std::invalid_argument);
  EXPECT_THROW(pw::PartitionSequence::from_levels(1.0, {{0, 0.9}}, false), std::invalid_argument);
  EXPECT_THROW(pw::PartitionSequence::from_levels(1.0, {{0, 0.5, 0.5, 1}}, false), std::invalid_argument);
  EXPECT_THROW(pw::PartitionSequence::from_levels(1.0, {}, false), std::invalid_argument);
  // declared dense but the mesh grows
  EXPECT_THROW(pw::PartitionSequence::from_levels(1.0, {{0, 0.5, 1}, {0, 1}}, true), std::invalid_argument);
}
