#include <gtest/gtest.h>

#include <cmath>

#include "ripbench/augment.hpp"

using namespace ripbench;

TEST(LevelSchedule, AnchorsAndRange) {
  EXPECT_DOUBLE_EQ(level_to_sigma(4), 0.20);
  EXPECT_DOUBLE_EQ(level_to_sigma(1), 0.05);
  EXPECT_DOUBLE_EQ(level_to_sigma(5), 0.30);
  for (int l = 2; l <= 5; ++l) EXPECT_GT(level_to_sigma(l), level_to_sigma(l - 1));
  EXPECT_THROW(level_to_sigma(0), InvalidInput);
  EXPECT_THROW(level_to_sigma(6), InvalidInput);
}

TEST(Awgn, ZeroSigmaAndDisabledAreIdentity) {
  RngStream r(1, 0);
  FeatureVector x{1.5, -2.0, 3.25};
  EXPECT_EQ(awgn(x, AugConfig{0.0, true}, r), x);
  EXPECT_EQ(awgn(x, AugConfig{0.3, false}, r), x);
  EXPECT_EQ(r.counter(), 0u);
}

TEST(Awgn, MonteCarloMoments) {
  RngStream r(2, 0);
  const int n = 100000;
  const AugConfig cfg{0.2, true};
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = awgn(FeatureVector{0.7}, cfg, r)[0] - 0.7;
    s += d;
    s2 += d * d;
  }
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  EXPECT_NEAR(mean, 0.0, 3.0 * 0.2 / std::sqrt(n));
  EXPECT_NEAR(var, 0.04, 0.04 * 0.05);
}

TEST(Awgn, ShapeFinitenessAndReproducibility) {
  FeatureVector x(33, 1.0);
  RngStream a(3, 9), b(3, 9);
  auto ya = awgn(x, aug_level(5), a), yb = awgn(x, aug_level(5), b);
  ASSERT_EQ(ya.size(), x.size());
  for (double v : ya) EXPECT_TRUE(std::isfinite(v));
  EXPECT_EQ(ya, yb);
  EXPECT_NE(ya, x);
}

TEST(Awgn, NegativeSigmaRejected) {
  RngStream r(4, 0);
  EXPECT_THROW(awgn(FeatureVector{1.0}, AugConfig{-0.1, true}, r), InvalidInput);
}
