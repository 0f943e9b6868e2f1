#pragma once

// Monte Carlo estimators of the stochastic logarithmic norm nu_p^l.
//
// direct:        nu = l E[ mu_p(A - 1/2 sum B_j^2 + sum B_j zeta_j) ],  zeta ~ N(0, I)
// definitional:  nu = lim_{h->0+} (E||I + hA + sum B_j dW_j + sum B_i B_j I_ij||_p^l - 1) / h
//
// The two routes are kept separate on purpose; they do not agree in general
// (B = I being the textbook example) and callers compare them explicitly.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "stochlog/fit.hpp"
#include "stochlog/lognorm.hpp"
#include "stochlog/matcore.hpp"
#include "stochlog/montecarlo.hpp"
#include "stochlog/sampler.hpp"
#include "stochlog/system.hpp"

namespace stochlog {

enum class Estimator { direct, definitional };

inline std::string to_string(Estimator e) {
  return e == Estimator::direct ? "direct" : "definitional";
}

struct NuEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
  Estimator estimator = Estimator::direct;
  Norm p = Norm::two;
  int l = 2;
  /// Step sizes used by the definitional estimator, largest first.
  std::vector<double> h_used;
  /// Monte Carlo part of std_error (definitional); equals std_error for direct.
  double mc_error = 0.0;
  /// Regression part of std_error from the h -> 0 extrapolation.
  double extrapolation_error = 0.0;
  /// Mean difference quotient at each h (definitional).
  std::vector<double> quotients;
  /// Fit residuals are large compared with the Monte Carlo error: the
  /// quotient is not linear in h over h_used and the intercept is biased.
  bool bias_warning = false;
};

namespace detail {

inline void require_moment_order(int l) {
  if (l < 1) throw ArgumentError("moment order l must be a positive integer");
}

inline std::vector<cplx> flat(const ComplexMatrix& m) {
  return {m.data().begin(), m.data().end()};
}

/// Lower-triangle Hermitian part as a flat buffer.
inline std::vector<cplx> flat_hermitian(const ComplexMatrix& m) {
  return flat(hermitian_part(m));
}

}  // namespace detail

inline NuEstimate nu_direct(const SdeSystem& sys, Norm p, int l, const McConfig& cfg) {
  detail::require_moment_order(l);
  cfg.validate();
  NuEstimate est;
  est.estimator = Estimator::direct;
  est.p = p;
  est.l = l;
  est.samples = cfg.samples;
  if (sys.deterministic()) {
    est.value = l * mu(sys.drift(), p);
    return est;
  }

  const std::size_t n = sys.dim();
  const std::size_t m = sys.channels();
  const bool two = p == Norm::two;
  const ComplexMatrix c0 = sys.ito_drift();
  const std::vector<cplx> base = two ? detail::flat_hermitian(c0) : detail::flat(c0);
  std::vector<std::vector<cplx>> dirs;
  for (const auto& b : sys.diffusions()) {
    dirs.push_back(two ? detail::flat_hermitian(b) : detail::flat(b));
  }

  struct Worker {
    const std::vector<cplx>& base;
    const std::vector<std::vector<cplx>>& dirs;
    std::size_t n;
    std::size_t m;
    Norm p;
    double l;
    const McConfig& cfg;
    std::vector<double> zeta;
    std::vector<cplx> buf;
    std::vector<cplx> work;

    double eval(double sign) {
      buf = base;
      for (std::size_t j = 0; j < m; ++j) {
        const double z = sign * zeta[j];
        const auto& d = dirs[j];
        for (std::size_t k = 0; k < buf.size(); ++k) buf[k] += z * d[k];
      }
      if (p == Norm::two) return detail::hermitian_lambda_max_inplace(buf, n, work);
      return detail::mu_sum_form(buf, n, p);
    }

    void operator()(std::uint64_t index, std::span<double> out) {
      Substream rng(cfg.seed, index);
      std::normal_distribution<double> normal;
      for (auto& z : zeta) z = normal(rng);
      double stat = eval(1.0);
      if (cfg.antithetic) stat = 0.5 * (stat + eval(-1.0));
      out[0] = l * stat;
    }
  };

  auto acc = accumulate_samples(cfg.samples, 1, cfg.workers, [&] {
    return Worker{base, dirs, n, m, p, static_cast<double>(l), cfg,
                  std::vector<double>(m), {}, {}};
  });
  est.value = acc[0].mean;
  est.std_error = acc[0].std_error();
  est.mc_error = est.std_error;
  return est;
}

/// h_k = h0 * 2^-k, k = 0..steps-1, with h0 = 0.05 / max(1, ||A||_p) unless
/// a positive h0 is supplied.
inline std::vector<double> default_h_sequence(const SdeSystem& sys, Norm p, int steps = 7,
                                              double h0 = 0.0) {
  if (steps < 2) throw ArgumentError("h sequence needs at least two steps");
  if (h0 <= 0.0) h0 = 0.05 / std::max(1.0, matrix_norm(sys.drift(), p));
  std::vector<double> hs(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k) hs[static_cast<std::size_t>(k)] = std::ldexp(h0, -k);
  return hs;
}

inline NuEstimate nu_definitional(const SdeSystem& sys, Norm p, int l,
                                  std::span<const double> h_seq, const McConfig& cfg) {
  detail::require_moment_order(l);
  cfg.validate();
  if (h_seq.size() < 2) throw ArgumentError("nu_definitional: need at least two step sizes");
  const double a_norm = matrix_norm(sys.drift(), p);
  for (std::size_t k = 0; k < h_seq.size(); ++k) {
    if (!(h_seq[k] > 0.0)) throw ArgumentError("nu_definitional: step sizes must be positive");
    if (k > 0 && !(h_seq[k] < h_seq[k - 1])) {
      throw ArgumentError("nu_definitional: step sizes must be strictly decreasing");
    }
    if (!(h_seq[k] * a_norm < 0.1)) {
      throw ArgumentError("nu_definitional: h = " + std::to_string(h_seq[k]) +
                          " violates h*||A||_p < 0.1");
    }
  }

  const std::size_t n = sys.dim();
  const std::size_t m = sys.channels();
  const std::size_t nk = h_seq.size();
  const std::vector<cplx> a = detail::flat(sys.drift());
  std::vector<std::vector<cplx>> bs;
  std::vector<std::vector<cplx>> products;  // B_i B_j, row-major over (i, j)
  for (const auto& b : sys.diffusions()) bs.push_back(detail::flat(b));
  for (const auto& bi : sys.diffusions())
    for (const auto& bj : sys.diffusions()) products.push_back(detail::flat(bi * bj));

  const std::vector<double> hs(h_seq.begin(), h_seq.end());
  const LineFit design = fit_line(hs, std::vector<double>(nk, 0.0));
  const std::vector<double>& iw = design.intercept_weights;

  NuEstimate est;
  est.estimator = Estimator::definitional;
  est.p = p;
  est.l = l;
  est.samples = cfg.samples;
  est.h_used = hs;

  struct Worker {
    const std::vector<cplx>& a;
    const std::vector<std::vector<cplx>>& bs;
    const std::vector<std::vector<cplx>>& products;
    const std::vector<double>& hs;
    const std::vector<double>& iw;
    std::size_t n;
    std::size_t m;
    Norm p;
    double l;
    const McConfig& cfg;
    IteratedIntegrals unit;
    std::vector<cplx> drift_part;
    std::vector<cplx> noise_part;
    std::vector<cplx> e;
    std::vector<cplx> scratch;
    std::vector<cplx> work;

    double quotient(double h, double sign) {
      for (std::size_t k = 0; k < e.size(); ++k) e[k] = drift_part[k] + sign * noise_part[k];
      return detail::norm_power_excess(e, n, p, l, scratch, work) / h;
    }

    void operator()(std::uint64_t index, std::span<double> out) {
      if (m > 0) {
        Substream rng(cfg.seed, index);
        iterated_integral_sampler(m, 1.0, rng, unit);
      }
      const std::size_t nn = n * n;
      double intercept = 0.0;
      for (std::size_t k = 0; k < hs.size(); ++k) {
        const double h = hs[k];
        const double sq = std::sqrt(h);
        for (std::size_t t = 0; t < nn; ++t) drift_part[t] = h * a[t];
        std::fill(noise_part.begin(), noise_part.end(), cplx{});
        for (std::size_t i = 0; i < m; ++i) {
          const double w = sq * unit.dW[i];
          const auto& b = bs[i];
          for (std::size_t t = 0; t < nn; ++t) noise_part[t] += w * b[t];
          for (std::size_t j = 0; j < m; ++j) {
            const double c = h * unit(i, j);
            const auto& pr = products[i * m + j];
            for (std::size_t t = 0; t < nn; ++t) drift_part[t] += c * pr[t];
          }
        }
        double q = quotient(h, 1.0);
        if (cfg.antithetic && m > 0) q = 0.5 * (q + quotient(h, -1.0));
        out[k] = q;
        intercept += iw[k] * q;
      }
      out[hs.size()] = intercept;
    }
  };

  auto make_worker = [&] {
    return Worker{a, bs, products, hs, iw, n, m, p, static_cast<double>(l), cfg, {},
                  std::vector<cplx>(n * n), std::vector<cplx>(n * n),
                  std::vector<cplx>(n * n), {}, {}};
  };

  std::vector<Accumulator> acc;
  if (m == 0) {
    // deterministic: one evaluation stands for every sample
    auto worker = make_worker();
    std::vector<double> out(nk + 1);
    worker(0, out);
    acc.resize(nk + 1);
    for (std::size_t k = 0; k <= nk; ++k) acc[k] = {cfg.samples, 0, out[k], 0.0};
  } else {
    acc = accumulate_samples(cfg.samples, nk + 1, cfg.workers, make_worker);
  }

  est.quotients.resize(nk);
  for (std::size_t k = 0; k < nk; ++k) est.quotients[k] = acc[k].mean;
  const LineFit fit = fit_line(hs, est.quotients);
  est.value = acc[nk].mean;
  est.mc_error = acc[nk].std_error();
  est.extrapolation_error = fit.intercept_stderr();
  est.std_error = std::hypot(est.mc_error, est.extrapolation_error);
  const double floor = 1e-9 * (1.0 + std::abs(est.value));
  est.bias_warning = fit.max_abs_residual() > 10.0 * std::max(est.mc_error, floor);
  return est;
}

/// True when two estimates differ by more than `nsigma` combined standard
/// errors (plus a roundoff floor for zero-variance cases).
inline bool estimators_disagree(const NuEstimate& a, const NuEstimate& b,
                                double nsigma = 3.0) {
  const double combined = std::hypot(a.std_error, b.std_error);
  const double floor = 1e-9 * (1.0 + std::abs(a.value) + std::abs(b.value));
  return std::abs(a.value - b.value) > nsigma * combined + floor;
}

struct PerturbedSpectrumCheck {
  /// E[max Re lambda(A - 1/2 sum B^2 + sum B zeta)]
  double estimate = 0.0;
  double estimate_se = 0.0;
  /// 1/2 nu_2^2 on the same draws, i.e. E[mu_2(same matrix)]
  double half_nu = 0.0;
  double half_nu_se = 0.0;
  /// standard error of the paired difference half_nu - estimate
  double gap_se = 0.0;
  std::uint64_t samples = 0;
  bool inequality_holds = false;
};

inline PerturbedSpectrumCheck expected_max_re_perturbed(const SdeSystem& sys,
                                                        const McConfig& cfg) {
  cfg.validate();
  const std::size_t n = sys.dim();
  const std::size_t m = sys.channels();
  const ComplexMatrix c0 = sys.ito_drift();
  std::vector<ComplexMatrix> bs(sys.diffusions().begin(), sys.diffusions().end());

  struct Worker {
    const ComplexMatrix& c0;
    const std::vector<ComplexMatrix>& bs;
    std::size_t n;
    const McConfig& cfg;
    std::vector<double> zeta;
    std::vector<cplx> herm;
    std::vector<cplx> work;

    std::pair<double, double> eval(double sign) {
      ComplexMatrix mtx = c0;
      for (std::size_t j = 0; j < bs.size(); ++j) mtx += (sign * zeta[j]) * bs[j];
      const double re = spectrum(mtx).max_real_part();
      herm = detail::flat_hermitian(mtx);
      return {re, detail::hermitian_lambda_max_inplace(herm, n, work)};
    }

    void operator()(std::uint64_t index, std::span<double> out) {
      Substream rng(cfg.seed, index);
      std::normal_distribution<double> normal;
      for (auto& z : zeta) z = normal(rng);
      auto [re, mu2] = eval(1.0);
      if (cfg.antithetic && !bs.empty()) {
        auto [re2, mu22] = eval(-1.0);
        re = 0.5 * (re + re2);
        mu2 = 0.5 * (mu2 + mu22);
      }
      out[0] = re;
      out[1] = mu2;
      out[2] = mu2 - re;
    }
  };

  auto acc = accumulate_samples(cfg.samples, 3, cfg.workers, [&] {
    return Worker{c0, bs, n, cfg, std::vector<double>(m), {}, {}};
  });
  PerturbedSpectrumCheck out;
  out.estimate = acc[0].mean;
  out.estimate_se = acc[0].std_error();
  out.half_nu = acc[1].mean;
  out.half_nu_se = acc[1].std_error();
  out.gap_se = acc[2].std_error();
  out.samples = cfg.samples;
  const double floor = 1e-9 * (1.0 + std::abs(out.half_nu));
  out.inequality_holds = out.estimate <= out.half_nu + 3.0 * out.gap_se + floor;
  return out;
}

struct ScalingReport {
  double alpha = 1.0;
  NuEstimate unscaled;
  NuEstimate scaled;
  /// scaled.value - alpha * unscaled.value
  double gap = 0.0;
  double combined_se = 0.0;
  bool law_holds = false;
};

/// Compares nu(alpha A, sqrt(alpha) B) with alpha nu(A, B) using the
/// definitional estimator. The scaled system is sampled on the step grid
/// h_seq / alpha with the same seed, which is the same Brownian path seen on
/// the rescaled clock.
inline ScalingReport scaling_check(const SdeSystem& sys, double alpha, Norm p, int l,
                                   std::span<const double> h_seq, const McConfig& cfg) {
  if (!(alpha > 0.0)) throw ArgumentError("scaling_check: alpha must be positive");
  ScalingReport r;
  r.alpha = alpha;
  r.unscaled = nu_definitional(sys, p, l, h_seq, cfg);
  std::vector<double> scaled_h(h_seq.begin(), h_seq.end());
  for (auto& h : scaled_h) h /= alpha;
  r.scaled = nu_definitional(sys.scaled(alpha), p, l, scaled_h, cfg);
  r.gap = r.scaled.value - alpha * r.unscaled.value;
  r.combined_se = std::hypot(r.scaled.std_error, alpha * r.unscaled.std_error);
  const double floor = 1e-9 * (1.0 + std::abs(r.scaled.value));
  r.law_holds = std::abs(r.gap) <= 3.0 * r.combined_se + floor;
  return r;
}

}  // namespace stochlog
