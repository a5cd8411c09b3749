#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "misery/rng.hpp"

using misery::Rng;

// Reference outputs of the published splitmix64.c for seed 1234567.
TEST(Rng, MatchesReferenceSplitMix64) {
  Rng rng(1234567);
  EXPECT_EQ(rng.next(), 6457827717110365317ULL);
  EXPECT_EQ(rng.next(), 3203168211198807973ULL);
  EXPECT_EQ(rng.next(), 9817491932198370423ULL);
  EXPECT_EQ(rng.next(), 4593380528125082431ULL);
  EXPECT_EQ(rng.next(), 16408922859458223821ULL);
}

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next(), b.next());
}

TEST(Rng, DeriveSeparatesSalts) {
  auto a = Rng::derive(12, 1);
  auto b = Rng::derive(12, 2);
  auto c = Rng::derive(12, 1);
  EXPECT_NE(a.next(), b.next());
  auto a2 = Rng::derive(12, 1);
  EXPECT_EQ(a2.next(), c.next());
}

TEST(Rng, UniformBelowStaysInRangeAndCoversIt) {
  Rng rng(7);
  std::map<std::uint64_t, int> seen;
  for (int i = 0; i < 7000; ++i) {
    const auto v = rng.uniform_below(7);
    ASSERT_LT(v, 7u);
    ++seen[v];
  }
  EXPECT_EQ(seen.size(), 7u);
  for (auto [v, n] : seen) EXPECT_NEAR(n, 1000, 150) << v;
  EXPECT_EQ(rng.uniform_below(1), 0u);
}

TEST(Rng, Uniform01IsHalfOpen) {
  Rng rng(99);
  double sum = 0;
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 20000, 0.5, 0.01);
}

TEST(Rng, NormalHasUnitMoments) {
  Rng rng(2024);
  const int n = 100000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    ASSERT_TRUE(std::isfinite(z));
    s += z;
    s2 += z * z;
  }
  const double mean = s / n;
  EXPECT_NEAR(mean, 0.0, 0.02);
  EXPECT_NEAR(s2 / n - mean * mean, 1.0, 0.02);
}
