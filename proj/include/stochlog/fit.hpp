#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "stochlog/errors.hpp"

namespace stochlog {

/// Ordinary least-squares line y = intercept + slope * x.
struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  std::vector<double> residuals;
  /// weights w with intercept = sum_k w_k y_k
  std::vector<double> intercept_weights;
  /// weights w with slope = sum_k w_k y_k
  std::vector<double> slope_weights;

  /// Regression standard error of the intercept; zero for two points.
  double intercept_stderr() const {
    const std::size_t k = residuals.size();
    if (k < 3) return 0.0;
    double ssr = 0.0;
    for (double r : residuals) ssr += r * r;
    double wsq = 0.0;
    for (double w : intercept_weights) wsq += w * w;
    return std::sqrt(ssr / static_cast<double>(k - 2) * wsq);
  }

  double max_abs_residual() const {
    double m = 0.0;
    for (double r : residuals) m = std::max(m, std::abs(r));
    return m;
  }
};

inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("fit_line: length mismatch");
  const std::size_t k = x.size();
  if (k < 2) throw ArgumentError("fit_line: need at least two points");
  double xbar = 0.0;
  for (double v : x) xbar += v;
  xbar /= static_cast<double>(k);
  double sxx = 0.0;
  for (double v : x) sxx += (v - xbar) * (v - xbar);
  if (sxx == 0.0) throw ArgumentError("fit_line: abscissae are all equal");

  LineFit fit;
  fit.intercept_weights.resize(k);
  fit.slope_weights.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    fit.slope_weights[i] = (x[i] - xbar) / sxx;
    fit.intercept_weights[i] = 1.0 / static_cast<double>(k) - xbar * fit.slope_weights[i];
  }
  for (std::size_t i = 0; i < k; ++i) {
    fit.intercept += fit.intercept_weights[i] * y[i];
    fit.slope += fit.slope_weights[i] * y[i];
  }
  fit.residuals.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    fit.residuals[i] = y[i] - (fit.intercept + fit.slope * x[i]);
  }
  return fit;
}

}  // namespace stochlog
