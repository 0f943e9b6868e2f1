#pragma once

// Classical logarithmic norms mu_1, mu_2, mu_inf.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "stochlog/fit.hpp"
#include "stochlog/matcore.hpp"

namespace stochlog {

namespace detail {

/// mu_1 / mu_inf straight from a row-major n x n buffer.
inline double mu_sum_form(std::span<const cplx> a, std::size_t n, Norm p) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    double acc = a[k * n + k].real();
    for (std::size_t t = 0; t < n; ++t) {
      if (t == k) continue;
      acc += std::abs(p == Norm::one ? a[t * n + k] : a[k * n + t]);
    }
    best = std::max(best, acc);
  }
  return best;
}

/// |1 + e| - 1 without cancellation.
inline double abs_one_plus_minus_one(cplx e) {
  const double num = 2.0 * e.real() + std::norm(e);
  return num / (std::abs(1.0 + e) + 1.0);
}

/// ||I + E||_p^power - 1, accurate when E is tiny. `e` is n x n row-major;
/// `scratch`/`work` are caller-owned buffers.
inline double norm_power_excess(std::span<const cplx> e, std::size_t n, Norm p,
                                double power, std::vector<cplx>& scratch,
                                std::vector<cplx>& work) {
  if (p == Norm::two) {
    // ||I+E||_2^2 - 1 = lambda_max(E + E^H + E^H E)
    scratch.assign(n * n, cplx{});
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        cplx g = e[i * n + j] + std::conj(e[j * n + i]);
        for (std::size_t k = 0; k < n; ++k) g += std::conj(e[k * n + i]) * e[k * n + j];
        scratch[i * n + j] = g;
      }
    }
    const double lam = hermitian_lambda_max_inplace(scratch, n, work);
    return std::expm1(0.5 * power * std::log1p(std::max(lam, -1.0)));
  }
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    double acc = abs_one_plus_minus_one(e[k * n + k]);
    for (std::size_t t = 0; t < n; ++t) {
      if (t == k) continue;
      acc += std::abs(p == Norm::one ? e[t * n + k] : e[k * n + t]);
    }
    best = std::max(best, acc);
  }
  return std::expm1(power * std::log1p(best));
}

}  // namespace detail

inline double mu(const ComplexMatrix& a, Norm p) {
  require_square(a, "mu");
  if (p == Norm::two) return lambda_max_hermitian(hermitian_part(a));
  return detail::mu_sum_form(a.data(), a.rows(), p);
}

/// Numerical cross-check of `mu` from its limit definition: the difference
/// quotients (||I + hA||_p - 1)/h for each h are fitted by a straight line in
/// h and the intercept at h = 0 is returned. Test oracle only.
inline double mu_limit_check(const ComplexMatrix& a, Norm p,
                             std::span<const double> h_seq) {
  require_square(a, "mu_limit_check");
  if (h_seq.size() < 2) throw ArgumentError("mu_limit_check: need at least two step sizes");
  for (std::size_t k = 0; k < h_seq.size(); ++k) {
    if (!(h_seq[k] > 1e-10)) throw ArgumentError("mu_limit_check: step sizes must exceed 1e-10");
    if (k > 0 && !(h_seq[k] < h_seq[k - 1])) {
      throw ArgumentError("mu_limit_check: step sizes must be strictly decreasing");
    }
  }
  const std::size_t n = a.rows();
  std::vector<cplx> e(n * n), scratch, work;
  std::vector<double> quotients;
  quotients.reserve(h_seq.size());
  for (double h : h_seq) {
    for (std::size_t k = 0; k < n * n; ++k) e[k] = h * a.data()[k];
    quotients.push_back(detail::norm_power_excess(e, n, p, 1.0, scratch, work) / h);
  }
  return fit_line(h_seq, quotients).intercept;
}

}  // namespace stochlog
