#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "random_systems.hpp"
#include "stochlog/cli/examples_data.hpp"
#include "stochlog/estimators.hpp"

using namespace stochlog;

namespace {

McConfig config(std::uint64_t samples, std::uint64_t seed = 42, unsigned workers = 4) {
  McConfig cfg;
  cfg.samples = samples;
  cfg.seed = seed;
  cfg.workers = workers;
  return cfg;
}

SdeSystem scalar(cplx a, cplx b) {
  return SdeSystem(ComplexMatrix::from_rows({{a}}), {ComplexMatrix::from_rows({{b}})});
}

}  // namespace

TEST(NuDirect, DeterministicReduction) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 10; ++t) {
    const SdeSystem sys(testsupport::random_matrix(rng, 3, 2.0));
    for (Norm p : {Norm::one, Norm::two, Norm::inf})
      for (int l : {1, 2, 3}) {
        const auto e = nu_direct(sys, p, l, config(1000));
        EXPECT_EQ(e.value, l * mu(sys.drift(), p));
        EXPECT_EQ(e.std_error, 0.0);
        EXPECT_EQ(e.estimator, Estimator::direct);
      }
  }
}

TEST(NuDirect, NonnormalClosedFormZeroVariance) {
  for (double b : {0.0, 1.0, -1.0, 2.0, -2.0, 3.0, -3.0})
    for (double s : {0.0, 0.5, 1.0}) {
      const auto e = nu_direct(examples::nonnormal(b, s * s), Norm::two, 2, config(2000));
      const double exact = s * s - 2 + std::abs(b);
      EXPECT_NEAR(e.value, exact, 1e-13 * (1 + std::abs(exact))) << b << " " << s;
      EXPECT_LE(e.std_error, 1e-13);
    }
}

TEST(NuDirect, CaseF) {
  const auto e = nu_direct(scalar(-100, 10), Norm::two, 2, config(10000));
  EXPECT_NEAR(e.value, -300.0, 1e-10);
  EXPECT_LE(e.std_error, 1e-10);
}

TEST(NuDirect, CaseIAgreesWithPrintedValue) {
  const SdeSystem sys(ComplexMatrix::from_rows({{-100, 0}, {0, -1}}),
                      {ComplexMatrix::from_rows({{0, 2}, {2, 0}})});
  const auto e = nu_direct(sys, Norm::two, 2, config(200000));
  EXPECT_NEAR(e.value, -5.91409, std::max(0.01 * 5.91409, 3 * e.std_error));
}

TEST(NuDirect, PendulumFoldedNormal) {
  for (double b : {0.0, 20.0, 50.0, 150.0}) {
    const auto e = nu_direct(examples::pendulum(10.0, 0.1, b), Norm::two, 2, config(200000));
    const double exact = examples::pendulum_nu(10.0, 0.1, b);
    EXPECT_NEAR(e.value, exact, 4 * e.std_error + 1e-9) << b;
    if (b < examples::pendulum_threshold(10.0, 0.1)) {
      EXPECT_GT(e.value, 0.0);
    }
  }
}

TEST(NuDirect, ScalarMultiChannel) {
  const SdeSystem sys(ComplexMatrix::from_rows({{-3}}),
                      {ComplexMatrix::from_rows({{1}}), ComplexMatrix::from_rows({{2}})});
  const auto e = nu_direct(sys, Norm::two, 2, config(5000));
  EXPECT_NEAR(e.value, 2 * (-3 - 0.5 * (1 + 4)), 1e-10);
}

TEST(NuDirect, OneAndInfNormsOnRandomSystems) {
  std::mt19937_64 rng(3);
  const auto sys = testsupport::random_system(rng, 3, 2, 2.0);
  for (Norm p : {Norm::one, Norm::inf}) {
    const auto e = nu_direct(sys, p, 1, config(50000));
    EXPECT_TRUE(std::isfinite(e.value));
    EXPECT_GT(e.std_error, 0.0);
  }
}

TEST(NuDirect, BitIdenticalAcrossWorkers) {
  std::mt19937_64 rng(5);
  const auto sys = testsupport::random_system(rng, 4, 2, 3.0);
  const auto a = nu_direct(sys, Norm::two, 2, config(30000, 9, 1));
  for (unsigned w : {2u, 8u}) {
    const auto b = nu_direct(sys, Norm::two, 2, config(30000, 9, w));
    EXPECT_EQ(std::memcmp(&a.value, &b.value, sizeof(double)), 0);
    EXPECT_EQ(std::memcmp(&a.std_error, &b.std_error, sizeof(double)), 0);
  }
  const auto c = nu_direct(sys, Norm::two, 2, config(30000, 10, 1));
  EXPECT_NE(a.value, c.value);
}

TEST(NuDirect, AntitheticOffStillConsistent) {
  const SdeSystem sys(ComplexMatrix::from_rows({{-100, 0}, {0, -1}}),
                      {ComplexMatrix::from_rows({{0, 2}, {2, 0}})});
  auto cfg = config(200000);
  const auto with = nu_direct(sys, Norm::two, 2, cfg);
  cfg.antithetic = false;
  const auto without = nu_direct(sys, Norm::two, 2, cfg);
  EXPECT_NEAR(with.value, without.value, 4 * std::hypot(with.std_error, without.std_error));
}

TEST(NuDirect, RejectsBadMomentOrder) {
  EXPECT_THROW(nu_direct(scalar(-1, 1), Norm::two, 0, config(10)), ArgumentError);
}

TEST(DefaultHSequence, Halving) {
  const auto hs = default_h_sequence(scalar(-100, 10), Norm::two);
  ASSERT_EQ(hs.size(), 7u);
  EXPECT_DOUBLE_EQ(hs[0], 0.05 / 100);
  for (std::size_t k = 1; k < hs.size(); ++k) EXPECT_DOUBLE_EQ(hs[k], hs[k - 1] / 2);
  EXPECT_DOUBLE_EQ(default_h_sequence(scalar(-0.5, 1), Norm::two)[0], 0.05);
}

TEST(NuDefinitional, ScalarLaw) {
  for (auto [a, b] : std::vector<std::pair<double, double>>{{-100, 10}, {-1, 1}, {0, 1}, {2, 0.5}}) {
    const auto sys = scalar(a, b);
    const auto hs = default_h_sequence(sys, Norm::two);
    const auto e = nu_definitional(sys, Norm::two, 2, hs, config(100000));
    const double exact = 2 * a + b * b;
    EXPECT_NEAR(e.value, exact, std::max(0.02 * std::abs(exact), 3 * e.std_error)) << a << " " << b;
    EXPECT_EQ(e.h_used, hs);
    EXPECT_EQ(e.quotients.size(), hs.size());
    EXPECT_FALSE(e.bias_warning);
  }
}

TEST(NuDefinitional, QuotientIsLinearInHForScalars) {
  // q(h) = 2a + b^2 + h (x^2 + 3/4 b^4 + x b^2), x = a - b^2/2, for real a, b
  const double a = -1, b = 1;
  const double x = a - 0.5 * b * b;
  const auto sys = scalar(a, b);
  const auto hs = default_h_sequence(sys, Norm::two);
  const auto e = nu_definitional(sys, Norm::two, 2, hs, config(200000));
  for (std::size_t k = 0; k < hs.size(); ++k) {
    const double exact = 2 * a + b * b + hs[k] * (x * x + 0.75 * b * b * b * b + x * b * b);
    EXPECT_NEAR(e.quotients[k], exact, 6 * e.mc_error + 1e-3) << k;
  }
}

TEST(NuDefinitional, IdentityDiffusionDichotomy) {
  const SdeSystem sys(ComplexMatrix::diagonal({-2, -5}), {ComplexMatrix::identity(2)});
  const auto hs = default_h_sequence(sys, Norm::two);
  const auto def = nu_definitional(sys, Norm::two, 2, hs, config(100000));
  const auto dir = nu_direct(sys, Norm::two, 2, config(100000));
  EXPECT_NEAR(def.value, 2 * -2.0 + 1, 3 * def.std_error + 0.02);
  EXPECT_NEAR(dir.value, 2 * -2.0 - 1, 3 * dir.std_error + 1e-9);
  EXPECT_TRUE(estimators_disagree(def, dir));
}

TEST(NuDefinitional, DeterministicReduction) {
  std::mt19937_64 rng(8);
  const SdeSystem sys(testsupport::random_bounded(rng, 3, 2.0));
  for (Norm p : {Norm::one, Norm::two, Norm::inf}) {
    const auto e = nu_definitional(sys, p, 2, default_h_sequence(sys, p), config(100));
    // the quotient is only linear in h to first order
    EXPECT_NEAR(e.value, 2 * mu(sys.drift(), p), 2e-2);
    EXPECT_EQ(e.mc_error, 0.0);
  }
}

TEST(NuDefinitional, Preconditions) {
  const auto sys = scalar(-100, 10);
  EXPECT_THROW(nu_definitional(sys, Norm::two, 2, std::vector<double>{1e-3, 5e-4}, config(10)),
               ArgumentError);
  EXPECT_THROW(nu_definitional(sys, Norm::two, 2, std::vector<double>{1e-4}, config(10)),
               ArgumentError);
  EXPECT_THROW(nu_definitional(sys, Norm::two, 2, std::vector<double>{1e-4, 2e-4}, config(10)),
               ArgumentError);
}

TEST(NuDefinitional, MultiChannelScalar) {
  const SdeSystem sys(ComplexMatrix::from_rows({{-3}}),
                      {ComplexMatrix::from_rows({{1}}), ComplexMatrix::from_rows({{2}})});
  const auto e = nu_definitional(sys, Norm::two, 2, default_h_sequence(sys, Norm::two),
                                 config(100000));
  EXPECT_NEAR(e.value, 2 * -3.0 + 1 + 4, std::max(0.02, 3 * e.std_error));
}

TEST(NuDefinitional, BitIdenticalAcrossWorkers) {
  std::mt19937_64 rng(12);
  const auto sys = testsupport::random_system(rng, 3, 2, 1.0);
  const auto hs = default_h_sequence(sys, Norm::two);
  const auto a = nu_definitional(sys, Norm::two, 2, hs, config(20000, 1, 1));
  const auto b = nu_definitional(sys, Norm::two, 2, hs, config(20000, 1, 8));
  EXPECT_EQ(std::memcmp(&a.value, &b.value, sizeof(double)), 0);
  EXPECT_EQ(std::memcmp(&a.std_error, &b.std_error, sizeof(double)), 0);
}

TEST(EstimatorsDisagree, Threshold) {
  NuEstimate a, b;
  a.value = 0;
  a.std_error = 1;
  b.value = 4;
  b.std_error = 0;
  EXPECT_TRUE(estimators_disagree(a, b));
  b.value = 2.9;
  EXPECT_FALSE(estimators_disagree(a, b));
}

TEST(PerturbedSpectrum, DeterministicCase) {
  const auto a = ComplexMatrix::from_rows({{-1, 5}, {0, -2}});
  const auto r = expected_max_re_perturbed(SdeSystem(a), config(100));
  EXPECT_NEAR(r.estimate, -1.0, 1e-12);
  EXPECT_NEAR(r.half_nu, mu(a, Norm::two), 1e-12);
  EXPECT_TRUE(r.inequality_holds);
}

TEST(PerturbedSpectrum, IdentityDiffusion) {
  const auto a = ComplexMatrix::from_rows({{-1, 3}, {0, -4}});
  const auto r =
      expected_max_re_perturbed(SdeSystem(a, {ComplexMatrix::identity(2)}), config(20000));
  // zeta I shifts every eigenvalue and mu_2 equally, the antithetic pair cancels it
  EXPECT_NEAR(r.estimate, -1.0 - 0.5, 1e-10);
  EXPECT_NEAR(r.half_nu, mu(a, Norm::two) - 0.5, 1e-10);
  EXPECT_TRUE(r.inequality_holds);
}

TEST(PerturbedSpectrum, CaseI) {
  const SdeSystem sys(ComplexMatrix::from_rows({{-100, 0}, {0, -1}}),
                      {ComplexMatrix::from_rows({{0, 2}, {2, 0}})});
  const auto r = expected_max_re_perturbed(sys, config(100000));
  EXPECT_TRUE(r.inequality_holds);
  // symmetric sample matrices: max Re lambda equals mu_2 sample by sample
  EXPECT_NEAR(r.estimate, r.half_nu, 1e-9);
}

TEST(ScalingCheck, ScalarClosedForm) {
  const auto sys = scalar(-1, 1);
  const auto hs = default_h_sequence(sys, Norm::two);
  const auto r = scaling_check(sys, 4.0, Norm::two, 2, hs, config(50000));
  EXPECT_TRUE(r.law_holds);
  EXPECT_NEAR(r.scaled.value, -4.0, std::max(0.08, 3 * r.scaled.std_error));
}

TEST(ScalingCheck, AlphaOneIsIdentical) {
  std::mt19937_64 rng(4);
  const auto sys = testsupport::random_system(rng, 3, 1, 1.0);
  const auto hs = default_h_sequence(sys, Norm::two);
  const auto r = scaling_check(sys, 1.0, Norm::two, 2, hs, config(5000));
  EXPECT_EQ(r.scaled.value, r.unscaled.value);
  EXPECT_TRUE(r.law_holds);
}

TEST(ScalingCheck, DeterministicSystem) {
  std::mt19937_64 rng(6);
  const SdeSystem sys(testsupport::random_bounded(rng, 3, 1.0));
  const auto hs = default_h_sequence(sys, Norm::inf);
  const auto r = scaling_check(sys, 2.0, Norm::inf, 1, hs, config(10));
  EXPECT_TRUE(r.law_holds);
  EXPECT_THROW(scaling_check(sys, 0.0, Norm::inf, 1, hs, config(10)), ArgumentError);
}
