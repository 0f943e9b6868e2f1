#include <cmath>
#include <cstring>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "stochlog/montecarlo.hpp"

using namespace stochlog;

TEST(Substream, DistinctAndReproducible) {
  std::set<std::uint64_t> firsts;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    Substream a(42, i);
    Substream b(42, i);
    const auto x = a();
    EXPECT_EQ(x, b());
    firsts.insert(x);
  }
  EXPECT_EQ(firsts.size(), 1000u);
  EXPECT_NE(Substream(42, 0)(), Substream(43, 0)());
}

TEST(Substream, NormalMoments) {
  Accumulator acc;
  Accumulator sq;
  for (std::uint64_t i = 0; i < 200000; ++i) {
    Substream rng(7, i);
    std::normal_distribution<double> normal;
    const double z = normal(rng);
    acc.add(z);
    sq.add(z * z);
  }
  EXPECT_NEAR(acc.mean, 0.0, 4.0 * acc.std_error());
  EXPECT_NEAR(sq.mean, 1.0, 4.0 * sq.std_error());
}

TEST(Accumulator, MatchesTwoPass) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(5.0, 2.0);
  std::vector<double> xs(5000);
  for (auto& x : xs) x = normal(rng);
  Accumulator a, b, all;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    (k < 1234 ? a : b).add(xs[k]);
    all.add(xs[k]);
  }
  double mean = 0;
  for (double x : xs) mean += x;
  mean /= xs.size();
  double ss = 0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const auto merged = Accumulator::merge(a, b);
  EXPECT_NEAR(merged.mean, mean, 1e-12);
  EXPECT_NEAR(merged.variance(), ss / (xs.size() - 1), 1e-10);
  EXPECT_NEAR(all.variance(), ss / (xs.size() - 1), 1e-10);
  EXPECT_NEAR(merged.std_error(), std::sqrt(ss / (xs.size() - 1) / xs.size()), 1e-12);
}

TEST(Accumulator, NonFiniteCountedSeparately) {
  Accumulator a;
  a.add(1.0);
  a.add(INFINITY);
  a.add(3.0);
  EXPECT_EQ(a.count, 2u);
  EXPECT_EQ(a.nonfinite, 1u);
  EXPECT_DOUBLE_EQ(a.mean, 2.0);
}

TEST(AccumulateSamples, BitIdenticalAcrossWorkerCounts) {
  auto run = [](unsigned workers) {
    return accumulate_samples(100'003, 2, workers, [] {
      return [](std::uint64_t i, std::span<double> out) {
        Substream rng(99, i);
        std::normal_distribution<double> normal;
        const double z = normal(rng);
        out[0] = std::exp(z);
        out[1] = z * z * z;
      };
    });
  };
  const auto ref = run(1);
  for (unsigned w : {2u, 3u, 8u, 17u}) {
    const auto got = run(w);
    for (std::size_t d = 0; d < 2; ++d) {
      EXPECT_EQ(std::memcmp(&got[d].mean, &ref[d].mean, sizeof(double)), 0) << w;
      EXPECT_EQ(std::memcmp(&got[d].m2, &ref[d].m2, sizeof(double)), 0) << w;
      EXPECT_EQ(got[d].count, ref[d].count);
    }
  }
  EXPECT_EQ(ref[0].count, 100'003u);
  EXPECT_NEAR(ref[0].mean, std::exp(0.5), 4 * ref[0].std_error());
}

TEST(AccumulateSamples, ConvergenceErrorCarriesLowestSampleIndex) {
  for (unsigned w : {1u, 4u}) {
    try {
      accumulate_samples(50'000, 1, w, [] {
        return [](std::uint64_t i, std::span<double> out) {
          if (i == 3000 || i == 40000) throw ConvergenceError("no convergence", {});
          out[0] = 1.0;
        };
      });
      FAIL() << "expected ConvergenceError";
    } catch (const ConvergenceError& e) {
      ASSERT_TRUE(e.sample_index().has_value());
      EXPECT_EQ(*e.sample_index(), 3000u) << w;
    }
  }
}

TEST(McConfig, Validation) {
  McConfig cfg;
  cfg.samples = 1;
  EXPECT_THROW(cfg.validate(), ArgumentError);
  cfg.samples = 2;
  EXPECT_NO_THROW(cfg.validate());
  cfg.workers = 0;
  EXPECT_THROW(cfg.validate(), ArgumentError);
}

TEST(DefaultSamples, ByDimension) {
  EXPECT_EQ(default_samples(2), 1'000'000u);
  EXPECT_EQ(default_samples(4), 1'000'000u);
  EXPECT_EQ(default_samples(5), 100'000u);
  EXPECT_EQ(default_samples(16), 100'000u);
  EXPECT_EQ(default_samples(17), 10'000u);
}
