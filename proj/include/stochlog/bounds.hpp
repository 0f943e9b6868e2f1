#pragma once

// Closed-form upper/lower bounds on nu_p^l in terms of classical logarithmic
// norms and matrix norms of the coefficients. Every entry is evaluated from
// its formula only where that formula applies; elsewhere it is absent.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "stochlog/lognorm.hpp"
#include "stochlog/matcore.hpp"
#include "stochlog/system.hpp"

namespace stochlog {

struct BoundEntry {
  std::string name;
  std::string applies_when;
  std::optional<double> value;
};

struct BoundsReport {
  Norm p = Norm::two;
  int l = 2;
  std::size_t channels = 0;

  /// 2-norm, single channel; lambda_max form (with the l(l-2)/8 term when l > 2)
  std::optional<double> main12_upper;
  /// 2-norm, B = I exactly
  std::optional<double> main12_exact_B_eq_I;
  /// 2-norm, single channel; mu_2 / ||B||_2 form
  std::optional<double> msest_upper;
  /// 2-norm, B = I, l in {1, 2}: mu_2(A) and 2 mu_2(A) + 1
  std::optional<double> beq1_identities;
  /// any p, single channel
  std::optional<double> lpest1_upper;
  /// any p, single channel: l mu_p(A) + l||B||(1 + (l+3)/4 ||B||)
  std::optional<double> lpest_upper;
  /// any p, single channel: l mu_p(A) + l(1 + (l+3)/4 ||B||)^2
  std::optional<double> lpest_upper_loose;
  /// any p, any m: l mu_p(A) + l/2 sum(mu_p(-B^2) + mu_p(B) + mu_p(-B))
  std::optional<double> mu_upper;
  /// any p, any m: l mu_p(A) - l/2 sum(mu_p(B^2) + mu_p(B) + mu_p(-B))
  std::optional<double> mu_lower;
  /// bound on |nu|: l||A - 1/2 sum B^2||_p + l sum ||B||_p
  std::optional<double> abs_bound;
  /// 2-norm, l >= 2, m > 1
  std::optional<double> multi_channel_upper_2norm;
  /// any p, m > 1
  std::optional<double> multi_channel_upper;

  std::vector<BoundEntry> entries() const {
    return {
        {"main12_upper", "p=2, m<=1", main12_upper},
        {"main12_exact_B_eq_I", "p=2, m=1, B=I", main12_exact_B_eq_I},
        {"msest_upper", "p=2, m<=1", msest_upper},
        {"beq1_identities", "p=2, m=1, B=I, l in {1,2}", beq1_identities},
        {"lpest1_upper", "m<=1", lpest1_upper},
        {"lpest_upper", "m<=1", lpest_upper},
        {"lpest_upper_loose", "m<=1", lpest_upper_loose},
        {"mu_upper", "any", mu_upper},
        {"mu_lower", "any", mu_lower},
        {"abs_bound", "any (bounds |nu|)", abs_bound},
        {"multi_channel_upper_2norm", "p=2, l>=2, m>1", multi_channel_upper_2norm},
        {"multi_channel_upper", "m>1", multi_channel_upper},
    };
  }
};

inline BoundsReport bounds_report(const SdeSystem& sys, Norm p, int l) {
  if (l < 1) throw ArgumentError("bounds_report: l must be a positive integer");
  BoundsReport r;
  r.p = p;
  r.l = l;
  r.channels = sys.channels();
  const double L = l;
  const std::size_t n = sys.dim();
  const ComplexMatrix& a = sys.drift();
  const auto bs = sys.diffusions();
  const double mu_a = mu(a, p);

  double up = 0.0;
  double down = 0.0;
  double norm_sum = 0.0;
  for (const auto& b : bs) {
    const ComplexMatrix b2 = b * b;
    const double spread = mu(b, p) + mu(-b, p);
    up += mu(-b2, p) + spread;
    down += mu(b2, p) + spread;
    norm_sum += matrix_norm(b, p);
  }
  r.mu_upper = L * mu_a + 0.5 * L * up;
  r.mu_lower = L * mu_a - 0.5 * L * down;
  r.abs_bound = L * matrix_norm(sys.ito_drift(), p) + L * norm_sum;

  if (bs.size() <= 1) {
    const ComplexMatrix b = bs.empty() ? ComplexMatrix::zeros(n) : bs[0];
    const double bn = matrix_norm(b, p);
    r.lpest1_upper = L * mu_a + 0.5 * L * mu(-(b * b), p) + L * (L + 1.0) / 4.0 * bn * bn + L * bn;
    r.lpest_upper = L * mu_a + L * bn * (1.0 + (L + 3.0) / 4.0 * bn);
    const double t = 1.0 + (L + 3.0) / 4.0 * bn;
    r.lpest_upper_loose = L * mu_a + L * t * t;

    if (p == Norm::two) {
      const ComplexMatrix bpbh = b + b.adjoint();
      const double lam_a = lambda_max_hermitian(hermitian_part(a + a.adjoint()));
      const double lam_b = lambda_max_hermitian(hermitian_part(bpbh));
      const double lam_mb = lambda_max_hermitian(hermitian_part(-bpbh));
      const double lam_bhb = lambda_max_hermitian(hermitian_part(b.adjoint() * b));
      double main = 0.5 * L * lam_a + 0.25 * L * (lam_b + lam_mb) + 0.5 * L * lam_bhb;
      if (l > 2) main += L * (L - 2.0) / 8.0 * lam_b * lam_b;
      r.main12_upper = main;

      const double mu_b = mu(b, Norm::two);
      double ms = mu_a + 0.5 * bn * bn + 0.5 * (mu_b + mu(-b, Norm::two));
      if (l > 2) ms += (L - 2.0) / 2.0 * mu_b * mu_b;
      r.msest_upper = L * ms;

      if (bs.size() == 1 && b == ComplexMatrix::identity(n)) {
        r.main12_exact_B_eq_I = 0.5 * L * lam_a + 0.5 * L + L * (L - 2.0) / 2.0;
        if (l == 1) r.beq1_identities = mu_a;
        if (l == 2) r.beq1_identities = 2.0 * mu_a + 1.0;
      }
    }
  } else {
    double sq_sum = 0.0;
    double spread = 0.0;
    double cross = 0.0;
    ComplexMatrix b_total = ComplexMatrix::zeros(n);
    for (std::size_t i = 0; i < bs.size(); ++i) {
      const double bn = matrix_norm(bs[i], p);
      sq_sum += bn * bn;
      b_total += bs[i];
      for (std::size_t j = 0; j < bs.size(); ++j) {
        if (i != j) cross += matrix_norm(bs[i] * bs[j], p);
      }
    }
    r.multi_channel_upper = L * mu_a - 0.5 * L * mu(b_total, p) + L * norm_sum +
                            0.5 * L * sq_sum + L / std::sqrt(2.0) * cross;
    if (p == Norm::two && l >= 2) {
      double mu_sq = 0.0;
      for (const auto& b : bs) {
        const double mb = mu(b, Norm::two);
        spread += mb + mu(-b, Norm::two);
        mu_sq += mb * mb;
      }
      r.multi_channel_upper_2norm =
          L * mu_a + 0.5 * L * sq_sum + 0.5 * L * spread + L * (L - 2.0) / 2.0 * mu_sq;
    }
  }
  return r;
}

}  // namespace stochlog
