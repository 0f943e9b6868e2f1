#pragma once

// Wiener increments and double Ito integrals I_(i,j) = int_0^h int_0^s dW_i dW_j
// over one step.

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "stochlog/errors.hpp"

namespace stochlog {

inline constexpr std::size_t kLevyAreaSubdivisions = 32;

struct IteratedIntegrals {
  std::size_t channels = 0;
  double h = 0.0;
  std::vector<double> dW;        // channels
  std::vector<double> integrals; // channels x channels, row-major

  double operator()(std::size_t i, std::size_t j) const {
    return integrals[i * channels + j];
  }

  /// Multiply dW by sqrt(factor) and the integrals by factor, i.e. move the
  /// same Brownian path to a step factor times longer.
  void rescale(double factor) {
    const double r = std::sqrt(factor);
    for (auto& w : dW) w *= r;
    for (auto& v : integrals) v *= factor;
    h *= factor;
  }

  /// Largest violation of I_ij + I_ji = dW_i dW_j - delta_ij h.
  double symmetry_defect() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < channels; ++i)
      for (std::size_t j = 0; j < channels; ++j) {
        const double target = dW[i] * dW[j] - (i == j ? h : 0.0);
        worst = std::max(worst, std::abs((*this)(i, j) + (*this)(j, i) - target));
      }
    return worst;
  }
};

/// Samples one step of length h. Diagonal integrals are exact; each
/// off-diagonal pair (i<j) is approximated on `subdivisions` sub-steps with a
/// left-point sum and its partner is set from I_ij + I_ji = dW_i dW_j.
template <class Engine>
void iterated_integral_sampler(std::size_t m, double h, Engine& rng, IteratedIntegrals& out,
                               std::size_t subdivisions = kLevyAreaSubdivisions) {
  if (m == 0) throw ArgumentError("iterated_integral_sampler: need at least one channel");
  if (!(h > 0.0)) throw ArgumentError("iterated_integral_sampler: h must be positive");
  std::normal_distribution<double> normal;
  out.channels = m;
  out.h = h;
  out.dW.assign(m, 0.0);
  out.integrals.assign(m * m, 0.0);
  if (m == 1) {
    out.dW[0] = std::sqrt(h) * normal(rng);
    out.integrals[0] = 0.5 * (out.dW[0] * out.dW[0] - h);
    return;
  }
  const std::size_t k_sub = subdivisions;
  const double sub_scale = std::sqrt(h / static_cast<double>(k_sub));
  std::vector<double> fine(m * k_sub);
  for (auto& v : fine) v = sub_scale * normal(rng);
  for (std::size_t j = 0; j < m; ++j) {
    double w = 0.0;
    for (std::size_t k = 0; k < k_sub; ++k) w += fine[j * k_sub + k];
    out.dW[j] = w;
  }
  for (std::size_t i = 0; i < m; ++i) {
    out.integrals[i * m + i] = 0.5 * (out.dW[i] * out.dW[i] - h);
    for (std::size_t j = i + 1; j < m; ++j) {
      double running = 0.0;  // W_i at the left end of the sub-step
      double acc = 0.0;
      for (std::size_t k = 0; k < k_sub; ++k) {
        acc += running * fine[j * k_sub + k];
        running += fine[i * k_sub + k];
      }
      out.integrals[i * m + j] = acc;
      out.integrals[j * m + i] = out.dW[i] * out.dW[j] - acc;
    }
  }
}

template <class Engine>
IteratedIntegrals iterated_integral_sampler(std::size_t m, double h, Engine& rng) {
  IteratedIntegrals out;
  iterated_integral_sampler(m, h, rng, out);
  return out;
}

}  // namespace stochlog
