#include <gtest/gtest.h>

#include "stochlog/sdesim.hpp"
#include "stochlog/stability.hpp"

using namespace stochlog;

TEST(Classify, Examples) {
  EXPECT_EQ(classify(-300, 0.1, 0), Stability::asymptotically_stable);
  EXPECT_EQ(classify(0, 0.01, 0), Stability::stable);
  EXPECT_EQ(classify(70, 0.5, 1), Stability::unstable);
  EXPECT_EQ(classify(0.5, 0.0, 1.0), Stability::stable);
  EXPECT_EQ(classify(-0.5, 0.0, 1.0), Stability::stable);
  EXPECT_EQ(classify(-1.5, 0.0, 1.0), Stability::asymptotically_stable);
  EXPECT_THROW(classify(0, 0, -1), ArgumentError);
  NuEstimate e;
  e.value = -1;
  e.std_error = 1;
  EXPECT_EQ(classify(e), Stability::stable);
}

TEST(ScalarStability, Examples) {
  EXPECT_TRUE(scalar_stability(-100, 10, 2));
  EXPECT_FALSE(scalar_stability(0, 1, 2));
  EXPECT_TRUE(scalar_stability(-0.5, 1, 1));
  EXPECT_FALSE(scalar_stability(-0.4, 1, 1));
  EXPECT_TRUE(scalar_stability({-1, 5}, {0, 1}, 2));
  EXPECT_THROW(scalar_stability(-1, 1, 3), ArgumentError);
}

TEST(TwoByTwoInf, Examples) {
  EXPECT_TRUE(twobytwo_inf_ms_stable(-100, -100, 0, 0, 0, 0));
  EXPECT_FALSE(twobytwo_inf_ms_stable(-1, -1, 1, 0, 0, 0));
  EXPECT_TRUE(twobytwo_inf_ms_stable(-3, -3, 0, 0, 0, 0));
  EXPECT_FALSE(twobytwo_inf_ms_stable(-0.9, -3, 0, 0, 0, 0));
}

TEST(MilsteinR, Examples) {
  EXPECT_DOUBLE_EQ(milstein_R(1, -1, 0), 0.0);
  EXPECT_TRUE(milstein_ms_stable(1, -1, 0));
  EXPECT_DOUBLE_EQ(milstein_R(0.3, 0, 0), 1.0);
  EXPECT_FALSE(milstein_ms_stable(0.3, 0, 0));
  EXPECT_NEAR(milstein_R(0.001, -100, 10), 0.915, 1e-12);
  EXPECT_TRUE(milstein_ms_stable(0.001, -100, 10));
  EXPECT_THROW(milstein_R(0, -1, 0), ArgumentError);
}

TEST(Em2x2, Examples) {
  EXPECT_TRUE(em_2x2_ms_stable(1, -1, -1, 0, 0, 0, 0));
  EXPECT_FALSE(em_2x2_ms_stable(2, -1, -1, 0, 0, 0, 0));
  EXPECT_FALSE(em_2x2_ms_stable(0.005, -100, -200, 5, 0, 6, 0));
  EXPECT_THROW(em_2x2_ms_stable(-1, -1, -1, 0, 0, 0, 0), ArgumentError);
}
