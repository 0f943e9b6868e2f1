#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "stochlog/estimators.hpp"

namespace stochlog {

enum class Stability { asymptotically_stable, stable, unstable };

inline std::string to_string(Stability s) {
  switch (s) {
    case Stability::asymptotically_stable: return "asymptotically_stable";
    case Stability::stable: return "stable";
    case Stability::unstable: return "unstable";
  }
  return "?";
}

/// Sign test on nu with a two-sigma band; `tol` widens the "stable" band
/// around zero (a small positive cut-off instead of exactly 0).
inline Stability classify(double value, double std_error, double tol = 0.0) {
  if (tol < 0.0) throw ArgumentError("classify: tol must be nonnegative");
  const double band = 2.0 * std_error;
  if (value + band < -tol) return Stability::asymptotically_stable;
  if (std::abs(value) <= band + tol) return Stability::stable;
  return Stability::unstable;
}

inline Stability classify(const NuEstimate& nu, double tol = 0.0) {
  return classify(nu.value, nu.std_error, tol);
}

/// Scalar dX = alpha X dt + beta X dW: stable in the mean (l = 1) iff
/// Re(alpha) + |beta|^2/2 <= 0, in mean square (l = 2) iff 2Re(alpha) + |beta|^2 <= 0.
inline bool scalar_stability(std::complex<double> alpha, std::complex<double> beta, int l) {
  const double b2 = std::norm(beta);
  if (l == 1) return alpha.real() + 0.5 * b2 <= 0.0;
  if (l == 2) return 2.0 * alpha.real() + b2 <= 0.0;
  throw ArgumentError("scalar_stability: l must be 1 or 2");
}

/// Mean-square stability in the inf-norm for D = diag(l1, l2) and
/// B = [[a1, b1], [b2, a2]], from the lpest bound.
inline bool twobytwo_inf_ms_stable(double lambda1, double lambda2, std::complex<double> alpha1,
                                   std::complex<double> beta1, std::complex<double> alpha2,
                                   std::complex<double> beta2) {
  const double bn = std::max(std::abs(alpha1) + std::abs(beta1),
                             std::abs(alpha2) + std::abs(beta2));
  const double t = 1.25 * bn + 1.0;
  return 2.0 * std::max(lambda1, lambda2) + 2.0 * t * t <= 0.0;
}

}  // namespace stochlog
