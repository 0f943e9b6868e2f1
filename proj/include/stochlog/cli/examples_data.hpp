#pragma once

// Reference systems: the nine numerical cases with their reference columns,
// the inverted pendulum and the nonnormal drift.

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "stochlog/matcore.hpp"
#include "stochlog/montecarlo.hpp"
#include "stochlog/system.hpp"

namespace stochlog::examples {

struct Table1Case {
  std::string label;
  SdeSystem system;
  double printed_lbound;
  double printed_nu;
  double printed_ubound;
  /// Reproducible from the printed data (all but h).
  bool value_checked = true;
  std::string note;
};

namespace detail {

inline ComplexMatrix block_upper(const ComplexMatrix& a1, const ComplexMatrix& a12,
                                 const ComplexMatrix& a2) {
  const std::size_t k = a1.rows();
  ComplexMatrix out(2 * k, 2 * k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      out(i, j) = a1(i, j);
      out(i, j + k) = a12(i, j);
      out(i + k, j + k) = a2(i, j);
    }
  return out;
}

}  // namespace detail

inline SdeSystem case_g() {
  const auto a1 = ComplexMatrix::from_rows({{0.1, 4, 20}, {0, 0.1, 5}, {0, 0, 0.1}});
  const auto a2 = ComplexMatrix::from_rows({{-0.2, 3, 100}, {0, -0.2, 50}, {0, 0, -0.2}});
  const auto b1 = ComplexMatrix::from_rows({{2, 30, 10}, {0, 2, 50}, {0, 0, 2}});
  const auto b2 = ComplexMatrix::from_rows({{4, 6, 20}, {0, 4, 40}, {0, 0, 4}});
  const auto a12 = ComplexMatrix::from_rows({{2.2857e-2, -2.3547e-2, -6.8279e-2},
                                             {9.3914e-2, -9.6719e-2, -2.8049e-1},
                                             {2.8585e-1, -2.9443e-1, -8.5382e-1}});
  const auto b12 = ComplexMatrix::from_rows({{1.2606e-1, -4.6007e-1, 7.0963e-3},
                                             {1.8156e-1, -6.6259e-1, 1.0235e-2},
                                             {1.4481e-1, -5.2845e-1, 8.1625e-3}});
  return SdeSystem(detail::block_upper(a1, a12, a2), {detail::block_upper(b1, b12, b2)});
}

/// 100 x 100 with A = 100 C, B = 100 D, C and D uniform on (0, 1). The
/// published draw is not recoverable, so this is regenerated from `seed`.
inline SdeSystem case_h(std::uint64_t seed, std::size_t n = 100) {
  Substream rng(seed, 0x68);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<cplx> a(n * n);
  std::vector<cplx> b(n * n);
  for (auto& z : a) z = 100.0 * u(rng);
  for (auto& z : b) z = 100.0 * u(rng);
  return SdeSystem(ComplexMatrix(n, n, std::move(a)), {ComplexMatrix(n, n, std::move(b))});
}

inline std::vector<Table1Case> table1_cases(std::uint64_t seed) {
  using M = ComplexMatrix;
  const cplx i{0.0, 1.0};
  std::vector<Table1Case> cases;
  cases.push_back({"a",
                   SdeSystem(M::from_rows({{-100, 0}, {0, -200}}), {M::from_rows({{5, 0}, {0, 6}})}),
                   -1.1239e2, -1.0470e2, -4.0393e1, true,
                   "known discrepancy: the direct formula gives -225 (the second branch "
                   "max(-112.5+5z, -218+6z) is never active) while the table prints -104.70"});
  cases.push_back({"b",
                   SdeSystem(M::from_rows({{-100, 0}, {200, -200}}), {M::from_rows({{5, 2}, {0, 6}})}),
                   -1.1919e2, -1.1468e2, -3.1393e1, true, ""});
  cases.push_back({"c",
                   SdeSystem(M::from_rows({{-100, 20}, {0, -200}}), {M::from_rows({{5, 2}, {0, 6}})}),
                   -2.4082e2, -2.2415e2, -1.5302e2, true, ""});
  cases.push_back({"d",
                   SdeSystem(M::from_rows({{-100.0 + 20.0 * i, 0}, {2, -200.0 + i}}),
                             {M::from_rows({{5.0 + i, 0}, {2.0 * i, -6.0 - 10.0 * i}})}),
                   -2.2490e2, -2.2354e2, -5.9075e1, true, ""});
  cases.push_back({"e",
                   SdeSystem(M::from_rows({{-100, 20}, {7, -200}}), {M::from_rows({{5, 2}, {4, 6}})}),
                   -2.6837e2, -2.3232e2, -1.21915e2, true, ""});
  cases.push_back({"f", SdeSystem(M::from_rows({{-100}}), {M::from_rows({{10}})}), -3.0000e2,
                   -3.0026e2, -1.0000e2, true,
                   "exact direct value is -300; the printed -300.26 carries its own Monte Carlo "
                   "error. Printed Ubound -100 matches the mean-square estimate, not mu_upper"});
  cases.push_back({"g", case_g(), -9.1852e2, 9.2453e2, 4.8398e3, true,
                   "the direct formula on the transcribed blocks gives about 747.6; the reference "
                   "value 924.53 is not reproduced"});
  cases.push_back({"h", case_h(seed), -2.5191e7, 1.2369e5, 2.5330e7, false,
                   "random 100x100 draw regenerated from the seed; smoke case, not compared"});
  cases.push_back({"i",
                   SdeSystem(M::from_rows({{-100, 0}, {0, -1}}), {M::from_rows({{0, 2}, {2, 0}})}),
                   -6.0, -5.91409, -2.0, true,
                   "printed Lbound -6 matches neither mu_lower (-10) nor the mean-square estimate"});
  return cases;
}

/// d theta = v dt + eps v dW, dv = (g/l) theta dt + b theta dW
inline SdeSystem pendulum(double g_over_l, double eps, double b) {
  return SdeSystem(ComplexMatrix::from_rows({{0, 1}, {g_over_l, 0}}),
                   {ComplexMatrix::from_rows({{0, eps}, {b, 0}})});
}

/// E|N(c, s^2)|
inline double folded_normal_mean(double c, double s) {
  if (s == 0.0) return std::abs(c);
  s = std::abs(s);
  const double z = c / s;
  const double phi_minus = 0.5 * std::erfc(z / std::numbers::sqrt2);
  return s * std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * z * z) + c * (1.0 - 2.0 * phi_minus);
}

/// Mean-square rate (2-norm) of the pendulum: E|c + s z| - eps b.
inline double pendulum_nu(double g_over_l, double eps, double b) {
  return folded_normal_mean(1.0 + g_over_l, b + eps) - eps * b;
}

inline double pendulum_threshold(double g_over_l, double eps) { return (1.0 + g_over_l) / eps; }

/// A = [[-1, b], [0, -1]], B = [[0, s], [-s, 0]] with s^2 = sigma2; a negative
/// sigma2 gives an imaginary s.
inline SdeSystem nonnormal(double b, double sigma2) {
  const cplx s = sigma2 >= 0.0 ? cplx(std::sqrt(sigma2), 0.0) : cplx(0.0, std::sqrt(-sigma2));
  return SdeSystem(ComplexMatrix::from_rows({{-1, b}, {0, -1}}),
                   {ComplexMatrix::from_rows({{0, s}, {-s, 0}})});
}

inline double nonnormal_nu(double b, double sigma2) { return sigma2 - 2.0 + std::abs(b); }

}  // namespace stochlog::examples
