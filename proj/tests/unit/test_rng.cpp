#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "graphbandit/rng.hpp"

using graphbandit::Rng;

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(Rng, DifferentSeedsDiffer) {
  Rng a(1), b(2);
  int same = 0;
  for (int i = 0; i < 100; ++i) same += a() == b();
  EXPECT_LT(same, 2);
}

TEST(Rng, SplitDoesNotConsumeParent) {
  Rng a(7), b(7);
  Rng child = a.split(3);
  (void)child();
  EXPECT_EQ(a(), b());
  EXPECT_EQ(a.split(3).seed(), b.split(3).seed());
  EXPECT_NE(a.split(3).seed(), a.split(4).seed());
}

TEST(Rng, UniformInUnitInterval) {
  Rng r(9);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, BelowCoversRangeUniformly) {
  Rng r(11);
  std::vector<int> hist(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto v = r.below(7);
    ASSERT_LT(v, 7u);
    ++hist[v];
  }
  // 5 sigma band around n/7
  const double sd = std::sqrt(n * (1.0 / 7) * (6.0 / 7));
  for (int h : hist) EXPECT_NEAR(h, n / 7.0, 5 * sd);
}

TEST(Rng, RestoreResumesStream) {
  Rng a(5);
  for (int i = 0; i < 17; ++i) (void)a();
  Rng b(0);
  b.restore(a.seed(), a.state());
  for (int i = 0; i < 100; ++i) ASSERT_EQ(a(), b());
  EXPECT_EQ(a.split(1).seed(), b.split(1).seed());
}
