#pragma once

#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stochlog/matcore.hpp"

namespace stochlog {

/// Coefficients of dX = A X dt + sum_j B_j X dW_j. No diffusion matrices means
/// a deterministic ODE.
class SdeSystem {
 public:
  explicit SdeSystem(ComplexMatrix drift, std::vector<ComplexMatrix> diffusions = {})
      : drift_(std::move(drift)), diffusions_(std::move(diffusions)) {
    require_square(drift_, "SdeSystem drift");
    for (std::size_t j = 0; j < diffusions_.size(); ++j) {
      const auto& b = diffusions_[j];
      if (!b.is_square() || b.rows() != drift_.rows()) {
        throw DimensionError("SdeSystem: diffusion " + std::to_string(j) + " is " +
                             std::to_string(b.rows()) + "x" + std::to_string(b.cols()) +
                             ", drift is " + std::to_string(drift_.rows()) + "x" +
                             std::to_string(drift_.cols()));
      }
    }
  }

  const ComplexMatrix& drift() const noexcept { return drift_; }
  std::span<const ComplexMatrix> diffusions() const noexcept { return diffusions_; }
  std::size_t dim() const noexcept { return drift_.rows(); }
  std::size_t channels() const noexcept { return diffusions_.size(); }
  bool deterministic() const noexcept { return diffusions_.empty(); }

  /// A - 1/2 sum_j B_j^2
  ComplexMatrix ito_drift() const {
    ComplexMatrix c = drift_;
    for (const auto& b : diffusions_) c -= 0.5 * (b * b);
    return c;
  }

  /// (alpha A, sqrt(alpha) B_j)
  SdeSystem scaled(double alpha) const {
    if (!(alpha > 0.0)) throw ArgumentError("SdeSystem::scaled: alpha must be positive");
    std::vector<ComplexMatrix> bs;
    bs.reserve(diffusions_.size());
    for (const auto& b : diffusions_) bs.push_back(std::sqrt(alpha) * b);
    return SdeSystem(alpha * drift_, std::move(bs));
  }

 private:
  ComplexMatrix drift_;
  std::vector<ComplexMatrix> diffusions_;
};

}  // namespace stochlog
