#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "stochlog/montecarlo.hpp"
#include "stochlog/sampler.hpp"

using namespace stochlog;

TEST(IteratedIntegrals, SingleChannelExact) {
  Substream rng(1, 0);
  const auto ii = iterated_integral_sampler(1, 0.01, rng);
  ASSERT_EQ(ii.dW.size(), 1u);
  EXPECT_DOUBLE_EQ(ii(0, 0), 0.5 * (ii.dW[0] * ii.dW[0] - 0.01));
}

TEST(IteratedIntegrals, SymmetryIdentityToMachinePrecision) {
  for (std::size_t m : {1u, 2u, 3u, 5u}) {
    for (std::uint64_t i = 0; i < 500; ++i) {
      Substream rng(5, i);
      const auto ii = iterated_integral_sampler(m, 0.3, rng);
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) {
          const double target = ii.dW[a] * ii.dW[b] - (a == b ? 0.3 : 0.0);
          EXPECT_NEAR(ii(a, b) + ii(b, a), target, 1e-15 * (1 + std::abs(target)));
        }
      EXPECT_LE(ii.symmetry_defect(), 1e-15);
    }
  }
}

TEST(IteratedIntegrals, ZeroMeanAndVariances) {
  const std::size_t m = 3;
  const double h = 0.5;
  std::vector<Accumulator> mean(m * m);
  Accumulator dw_var;
  Accumulator area_var;
  for (std::uint64_t i = 0; i < 100'000; ++i) {
    Substream rng(11, i);
    const auto ii = iterated_integral_sampler(m, h, rng);
    for (std::size_t k = 0; k < m * m; ++k) mean[k].add(ii.integrals[k]);
    dw_var.add(ii.dW[1] * ii.dW[1]);
    area_var.add(ii(0, 1) * ii(0, 1));
  }
  for (std::size_t k = 0; k < m * m; ++k) {
    EXPECT_NEAR(mean[k].mean, 0.0, 3.5 * mean[k].std_error()) << k;
  }
  EXPECT_NEAR(dw_var.mean, h, 4 * dw_var.std_error());
  // E[I_01^2] = h^2 / 2; the left-point sum gives h^2 (1 - 1/K) / 2
  const double k = kLevyAreaSubdivisions;
  EXPECT_NEAR(area_var.mean, 0.5 * h * h * (1 - 1 / k), 4 * area_var.std_error());
}

TEST(IteratedIntegrals, RescaleMovesToLongerStep) {
  Substream rng(3, 0);
  auto ii = iterated_integral_sampler(2, 1.0, rng);
  ii.rescale(0.25);
  EXPECT_DOUBLE_EQ(ii.h, 0.25);
  EXPECT_LE(ii.symmetry_defect(), 1e-15);
}

TEST(IteratedIntegrals, Preconditions) {
  Substream rng(3, 0);
  EXPECT_THROW(iterated_integral_sampler(0, 1.0, rng), ArgumentError);
  EXPECT_THROW(iterated_integral_sampler(2, 0.0, rng), ArgumentError);
}
