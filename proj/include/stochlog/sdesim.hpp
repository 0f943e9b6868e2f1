#pragma once

// Ensemble simulation of dX = A X dt + sum_j B_j X dW_j with Euler-Maruyama
// or Milstein steps, moment trajectories E||X_t||_p^l, and the classical
// discrete mean-square stability functions of both schemes.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "stochlog/fit.hpp"
#include "stochlog/matcore.hpp"
#include "stochlog/montecarlo.hpp"
#include "stochlog/sampler.hpp"
#include "stochlog/system.hpp"

namespace stochlog {

enum class Scheme { euler_maruyama, milstein };

inline std::string to_string(Scheme s) {
  return s == Scheme::milstein ? "milstein" : "euler_maruyama";
}

inline Scheme parse_scheme(const std::string& text) {
  if (text == "milstein") return Scheme::milstein;
  if (text == "euler_maruyama" || text == "em" || text == "euler") return Scheme::euler_maruyama;
  throw ArgumentError("unknown scheme '" + text + "' (expected euler_maruyama or milstein)");
}

/// Paths whose state exceeds this (inf-norm) are treated as diverged.
inline constexpr double kDivergenceThreshold = 1e150;

struct SimConfig {
  double h = 1e-3;
  double t_end = 1.0;
  std::uint64_t paths = 10'000;
  std::size_t checkpoints = 10;
  Scheme scheme = Scheme::milstein;
  std::uint64_t seed = 42;
  Norm p = Norm::two;
  int l = 2;
  unsigned workers = 1;

  std::size_t steps() const {
    return static_cast<std::size_t>(std::llround(t_end / h));
  }

  void validate() const {
    if (!(h > 0.0)) throw ArgumentError("SimConfig: h must be positive");
    if (!(t_end > 0.0)) throw ArgumentError("SimConfig: t_end must be positive");
    const double ratio = t_end / h;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
      throw ArgumentError("SimConfig: t_end / h must be a positive integer");
    }
    if (paths == 0) throw ArgumentError("SimConfig: paths must be positive");
    if (checkpoints == 0 || steps() % checkpoints != 0) {
      throw ArgumentError("SimConfig: checkpoints must divide the step count " +
                          std::to_string(steps()));
    }
    if (l < 1) throw ArgumentError("SimConfig: l must be a positive integer");
    if (workers == 0) throw ArgumentError("SimConfig: workers must be positive");
  }
};

struct MomentTrajectory {
  std::vector<double> times;
  std::vector<double> moments;
  std::vector<double> std_errors;
  std::uint64_t paths = 0;
  SimConfig config;
  /// First checkpoint at which some path had diverged; moments from there on
  /// are +inf.
  std::optional<std::size_t> diverged_at;
};

namespace detail {

/// Flattened coefficients plus the step kernels.
class Stepper {
 public:
  explicit Stepper(const SdeSystem& sys) : n_(sys.dim()), m_(sys.channels()) {
    a_.assign(sys.drift().data().begin(), sys.drift().data().end());
    for (const auto& b : sys.diffusions()) b_.emplace_back(b.data().begin(), b.data().end());
    for (const auto& bi : sys.diffusions())
      for (const auto& bj : sys.diffusions()) {
        const ComplexMatrix p = bi * bj;
        prod_.emplace_back(p.data().begin(), p.data().end());
      }
    tmp_.resize(n_);
  }

  std::size_t dim() const noexcept { return n_; }
  std::size_t channels() const noexcept { return m_; }

  void euler(std::span<cplx> x, std::span<const double> dw, double h) {
    for (std::size_t i = 0; i < n_; ++i) {
      cplx acc = x[i];
      for (std::size_t j = 0; j < n_; ++j) {
        cplx coeff = h * a_[i * n_ + j];
        for (std::size_t c = 0; c < m_; ++c) coeff += dw[c] * b_[c][i * n_ + j];
        acc += coeff * x[j];
      }
      tmp_[i] = acc;
    }
    std::copy(tmp_.begin(), tmp_.end(), x.begin());
  }

  void milstein(std::span<cplx> x, const IteratedIntegrals& ii, double h) {
    for (std::size_t i = 0; i < n_; ++i) {
      cplx acc = x[i];
      for (std::size_t j = 0; j < n_; ++j) {
        cplx coeff = h * a_[i * n_ + j];
        for (std::size_t c = 0; c < m_; ++c) coeff += ii.dW[c] * b_[c][i * n_ + j];
        for (std::size_t c = 0; c < m_; ++c)
          for (std::size_t d = 0; d < m_; ++d)
            coeff += ii(c, d) * prod_[c * m_ + d][i * n_ + j];
        acc += coeff * x[j];
      }
      tmp_[i] = acc;
    }
    std::copy(tmp_.begin(), tmp_.end(), x.begin());
  }

 private:
  std::size_t n_;
  std::size_t m_;
  std::vector<cplx> a_;
  std::vector<std::vector<cplx>> b_;
  std::vector<std::vector<cplx>> prod_;
  std::vector<cplx> tmp_;
};

inline void require_state(const SdeSystem& sys, std::size_t len) {
  if (len != sys.dim()) {
    throw DimensionError("state has length " + std::to_string(len) + ", system dimension is " +
                         std::to_string(sys.dim()));
  }
}

}  // namespace detail

/// x + hAx + sum_j B_j x dW_j
inline std::vector<cplx> em_step(const SdeSystem& sys, std::span<const cplx> x,
                                 std::span<const double> dW, double h) {
  detail::require_state(sys, x.size());
  if (dW.size() != sys.channels()) throw DimensionError("em_step: one increment per channel");
  std::vector<cplx> out(x.begin(), x.end());
  detail::Stepper(sys).euler(out, dW, h);
  return out;
}

/// x + hAx + sum_j B_j x dW_j + sum_ij B_i B_j x I_ij
inline std::vector<cplx> milstein_step(const SdeSystem& sys, std::span<const cplx> x,
                                       const IteratedIntegrals& ii, double h) {
  detail::require_state(sys, x.size());
  if (ii.channels != sys.channels()) throw DimensionError("milstein_step: channel mismatch");
  if (sys.channels() > 0) {
    double mag = h;
    for (double w : ii.dW) mag = std::max(mag, w * w);
    if (ii.symmetry_defect() > 1e-12 * (1.0 + mag)) {
      throw ContractError("milstein_step: iterated integrals violate I_ij + I_ji = dW_i dW_j - delta_ij h");
    }
  }
  std::vector<cplx> out(x.begin(), x.end());
  detail::Stepper(sys).milstein(out, ii, h);
  return out;
}

inline MomentTrajectory simulate_moments(const SdeSystem& sys, std::span<const cplx> x0,
                                         const SimConfig& cfg) {
  cfg.validate();
  detail::require_state(sys, x0.size());
  if (!(vector_norm(x0, Norm::inf) > 0.0)) {
    throw ArgumentError("simulate_moments: initial state must be nonzero");
  }
  const std::size_t steps = cfg.steps();
  const std::size_t stride = steps / cfg.checkpoints;
  const std::size_t dims = cfg.checkpoints + 1;
  const std::size_t m = sys.channels();
  const double l = cfg.l;
  const std::vector<cplx> start(x0.begin(), x0.end());

  auto make_worker = [&] {
    return [&, stepper = detail::Stepper(sys), x = std::vector<cplx>(),
            dw = std::vector<double>(m), ii = IteratedIntegrals()](
               std::uint64_t path, std::span<double> out) mutable {
      Substream rng(cfg.seed, path);
      std::normal_distribution<double> normal;
      x = start;
      const double sq = std::sqrt(cfg.h);
      out[0] = std::pow(vector_norm(x, cfg.p), l);
      bool diverged = false;
      for (std::size_t c = 1; c < dims; ++c) {
        if (!diverged) {
          for (std::size_t s = 0; s < stride; ++s) {
            if (m > 0 && cfg.scheme == Scheme::milstein) {
              iterated_integral_sampler(m, cfg.h, rng, ii);
              stepper.milstein(x, ii, cfg.h);
            } else {
              for (auto& w : dw) w = sq * normal(rng);
              stepper.euler(x, dw, cfg.h);
            }
            const double size = vector_norm(x, Norm::inf);
            if (!(size <= kDivergenceThreshold)) {
              diverged = true;
              break;
            }
          }
        }
        out[c] = diverged ? std::numeric_limits<double>::infinity()
                          : std::pow(vector_norm(x, cfg.p), l);
      }
    };
  };

  auto acc = accumulate_samples(cfg.paths, dims, cfg.workers, make_worker);
  MomentTrajectory traj;
  traj.paths = cfg.paths;
  traj.config = cfg;
  for (std::size_t c = 0; c < dims; ++c) {
    traj.times.push_back(static_cast<double>(c * stride) * cfg.h);
    if (acc[c].nonfinite > 0) {
      if (!traj.diverged_at) traj.diverged_at = c;
      traj.moments.push_back(std::numeric_limits<double>::infinity());
      traj.std_errors.push_back(std::numeric_limits<double>::infinity());
    } else {
      traj.moments.push_back(acc[c].mean);
      traj.std_errors.push_back(acc[c].std_error());
    }
  }
  return traj;
}

struct GrowthRate {
  double rate = 0.0;
  double rate_stderr = 0.0;
  std::size_t points_used = 0;
};

/// Least-squares slope of log(moment) against time over the finite, positive
/// prefix of the trajectory. The standard error propagates the moment
/// standard errors through the log (delta method), treating checkpoints as
/// independent.
inline GrowthRate growth_rate(const MomentTrajectory& traj) {
  std::size_t usable = 0;
  while (usable < traj.moments.size() && std::isfinite(traj.moments[usable]) &&
         traj.moments[usable] > 0.0) {
    ++usable;
  }
  if (usable < 3) {
    throw InsufficientDataError("growth_rate: need at least 3 finite positive moments, have " +
                                std::to_string(usable));
  }
  std::vector<double> t(traj.times.begin(), traj.times.begin() + static_cast<std::ptrdiff_t>(usable));
  std::vector<double> y(usable);
  for (std::size_t k = 0; k < usable; ++k) y[k] = std::log(traj.moments[k]);
  const LineFit fit = fit_line(t, y);
  double var = 0.0;
  for (std::size_t k = 0; k < usable; ++k) {
    const double rel = traj.std_errors[k] / traj.moments[k];
    var += fit.slope_weights[k] * fit.slope_weights[k] * rel * rel;
  }
  return {fit.slope, std::sqrt(var), usable};
}

/// Mean-square stability function of Milstein on dX = lambda X dt + mu X dW.
inline double milstein_R(double h, std::complex<double> lambda, std::complex<double> mu) {
  if (!(h > 0.0)) throw ArgumentError("milstein_R: h must be positive");
  const std::complex<double> mu2 = mu * mu;
  return std::norm(1.0 + h * lambda) + std::abs(h * mu2) + 0.5 * std::abs(h * h * mu2 * mu2);
}

inline bool milstein_ms_stable(double h, std::complex<double> lambda, std::complex<double> mu) {
  return milstein_R(h, lambda, mu) < 1.0;
}

/// Euler-Maruyama on D = diag(l1, l2), B = [[a1, b1], [b2, a2]].
inline bool em_2x2_ms_stable(double h, double lambda1, double lambda2,
                             std::complex<double> alpha1, std::complex<double> beta1,
                             std::complex<double> alpha2, std::complex<double> beta2) {
  if (!(h > 0.0)) throw ArgumentError("em_2x2_ms_stable: h must be positive");
  const double r1 = std::abs(alpha1) + std::abs(beta1);
  const double r2 = std::abs(alpha2) + std::abs(beta2);
  const double g1 = (1.0 + lambda1 * h) * (1.0 + lambda1 * h) + r1 * r1;
  const double g2 = (1.0 + lambda2 * h) * (1.0 + lambda2 * h) + r2 * r2;
  return std::max(g1, g2) < 1.0;
}

inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// CSV columns: time,moment,stderr,paths,scheme
inline void write_trajectory_csv(std::ostream& os, const MomentTrajectory& traj) {
  os << "time,moment,stderr,paths,scheme\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    os << format_double(traj.times[k]) << ',' << format_double(traj.moments[k]) << ','
       << format_double(traj.std_errors[k]) << ',' << traj.paths << ','
       << to_string(traj.config.scheme) << '\n';
  }
}

}  // namespace stochlog
