#pragma once

// Subcommand bodies, kept out of main() so they can be driven in-process by
// tests. Each returns the JSON report (stdout), a human summary (stderr) and
// the exit code; input problems surface as InputError, numerical failures as
// NumericalError, and run_guarded() maps them to 2 and 3.

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "stochlog/bounds.hpp"
#include "stochlog/cli/examples_data.hpp"
#include "stochlog/errors.hpp"
#include "stochlog/estimators.hpp"
#include "stochlog/io.hpp"
#include "stochlog/lognorm.hpp"
#include "stochlog/sdesim.hpp"
#include "stochlog/stability.hpp"

namespace stochlog::cli {

using ojson = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";
inline constexpr std::uint64_t kDefaultSeed = 42;
inline constexpr const char* kSeedEnv = "SLOGNORM_SEED";

struct CommandResult {
  ojson report;
  std::string summary;
  int exit_code = 0;
};

inline unsigned default_workers() {
  return std::max(1u, std::thread::hardware_concurrency());
}

inline std::uint64_t parse_seed(const std::string& text, const std::string& origin) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
    throw ArgumentError(origin + ": seed must be a nonnegative integer, got '" + text + "'");
  }
  errno = 0;
  const unsigned long long v = std::strtoull(text.c_str(), nullptr, 10);
  if (errno == ERANGE) throw ArgumentError(origin + ": seed out of range");
  return v;
}

/// Flag, then SLOGNORM_SEED, then 42.
inline std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv(kSeedEnv)) return parse_seed(env, kSeedEnv);
  return kDefaultSeed;
}

inline ojson invocation(const std::string& command, ojson flags, std::uint64_t seed) {
  return {{"command", command}, {"flags", std::move(flags)}, {"seed", seed}, {"version", kVersion}};
}

inline ojson estimate_json(const NuEstimate& e) {
  ojson j{{"estimator", to_string(e.estimator)},
          {"p", to_string(e.p)},
          {"l", e.l},
          {"value", e.value},
          {"std_error", e.std_error},
          {"samples", e.samples}};
  if (e.estimator == Estimator::definitional) {
    j["mc_error"] = e.mc_error;
    j["extrapolation_error"] = e.extrapolation_error;
    j["h_used"] = e.h_used;
    j["quotients"] = e.quotients;
    j["bias_warning"] = e.bias_warning;
  }
  return j;
}

inline ojson bounds_json(const BoundsReport& r) {
  ojson present = ojson::array();
  ojson absent = ojson::array();
  for (const auto& e : r.entries()) {
    if (e.value) {
      present.push_back({{"name", e.name}, {"applies_when", e.applies_when}, {"value", *e.value}});
    } else {
      absent.push_back(e.name);
    }
  }
  return {{"p", to_string(r.p)}, {"l", r.l}, {"entries", present}, {"not_applicable", absent}};
}

inline std::string fmt(double v, int digits = 6) {
  std::ostringstream ss;
  ss.precision(digits);
  ss << v;
  return ss.str();
}

inline std::vector<cplx> parse_state(const std::string& text, std::size_t n) {
  std::vector<cplx> x;
  if (text.empty()) {
    x.assign(n, 0.0);
    x[0] = 1.0;
    return x;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || end != item.c_str() + item.size() || !std::isfinite(v)) {
      throw ArgumentError("--x0: cannot parse '" + item + "' as a real number");
    }
    x.emplace_back(v, 0.0);
  }
  if (x.size() != n) {
    throw DimensionError("--x0 has " + std::to_string(x.size()) + " entries, system dimension is " +
                         std::to_string(n));
  }
  return x;
}

// ---------------------------------------------------------------- lognorm

struct LognormOptions {
  std::string matrix_file;
  std::string p = "2";
};

inline CommandResult cmd_lognorm(const LognormOptions& o) {
  const Norm p = parse_norm(o.p);
  const ComplexMatrix a = load_matrix(o.matrix_file);
  require_square(a, "lognorm");
  const double value = mu(a, p);
  const char* formula = p == Norm::two  ? "lambda_max((A + A^H) / 2)"
                        : p == Norm::one ? "max_j (Re a_jj + sum_{i != j} |a_ij|)"
                                         : "max_i (Re a_ii + sum_{j != i} |a_ij|)";
  CommandResult r;
  r.report["invocation"] =
      invocation("lognorm", {{"matrix", o.matrix_file}, {"p", to_string(p)}}, 0);
  r.report["invocation"].erase("seed");
  r.report["results"] = {{"quantity", "mu_" + to_string(p)},
                         {"formula", formula},
                         {"n", a.rows()},
                         {"value", value}};
  r.report["warnings"] = ojson::array();
  r.summary = "mu_" + to_string(p) + "(A) = " + fmt(value, 10) + "\n";
  return r;
}

// ---------------------------------------------------------------- slognorm

struct SlognormOptions {
  std::string system_file;
  std::string p = "2";
  int l = 2;
  std::string method = "both";
  std::optional<std::uint64_t> samples;
  std::optional<std::uint64_t> seed;
  double h0 = 0.0;
  int hsteps = 7;
  double tol = 0.0;
  bool antithetic = true;
  unsigned workers = 1;
};

inline CommandResult cmd_slognorm(const SlognormOptions& o) {
  const Norm p = parse_norm(o.p);
  if (o.method != "direct" && o.method != "definitional" && o.method != "both") {
    throw ArgumentError("--method must be direct, definitional or both");
  }
  if (o.l < 1) throw ArgumentError("--l must be a positive integer");
  if (o.tol < 0.0 || !std::isfinite(o.tol)) throw ArgumentError("--tol must be nonnegative");
  if (o.h0 < 0.0 || !std::isfinite(o.h0)) throw ArgumentError("--h0 must be nonnegative");
  const SystemFile file = load_system(o.system_file);
  const SdeSystem& sys = file.system;
  const std::uint64_t seed = resolve_seed(o.seed);

  McConfig cfg;
  cfg.samples = o.samples.value_or(default_samples(sys.dim()));
  cfg.seed = seed;
  cfg.antithetic = o.antithetic;
  cfg.workers = o.workers;

  CommandResult r;
  r.report["invocation"] = invocation("slognorm",
                                      {{"system", o.system_file},
                                       {"p", to_string(p)},
                                       {"l", o.l},
                                       {"method", o.method},
                                       {"samples", cfg.samples},
                                       {"h0", o.h0},
                                       {"hsteps", o.hsteps},
                                       {"tol", o.tol},
                                       {"antithetic", o.antithetic}},
                                      seed);
  ojson warnings = ojson::array();
  ojson estimates = ojson::array();
  ojson verdicts = ojson::array();
  std::ostringstream sum;
  sum << "system " << (file.name.empty() ? o.system_file : file.name) << ": n=" << sys.dim()
      << ", m=" << sys.channels() << "\n";

  std::optional<NuEstimate> direct;
  std::optional<NuEstimate> definitional;
  if (o.method != "definitional") direct = nu_direct(sys, p, o.l, cfg);
  if (o.method != "direct") {
    const auto hs = default_h_sequence(sys, p, o.hsteps, o.h0);
    definitional = nu_definitional(sys, p, o.l, hs, cfg);
    if (definitional->bias_warning) {
      warnings.push_back("definitional: difference quotients are not linear in h over h_used; "
                         "the extrapolated intercept may be biased");
    }
  }
  for (const auto* e : {direct ? &*direct : nullptr, definitional ? &*definitional : nullptr}) {
    if (!e) continue;
    estimates.push_back(estimate_json(*e));
    const Stability s = classify(*e, o.tol);
    verdicts.push_back({{"estimator", to_string(e->estimator)},
                        {"verdict", to_string(s)},
                        {"tol", o.tol}});
    sum << "  nu_" << to_string(p) << "^" << o.l << " [" << to_string(e->estimator)
        << "] = " << fmt(e->value, 8) << " +- " << fmt(e->std_error, 3) << "  -> "
        << to_string(s) << "\n";
  }
  if (direct && definitional && estimators_disagree(*direct, *definitional)) {
    warnings.push_back("direct and definitional estimates differ by more than 3 combined "
                       "standard errors (" + fmt(direct->value, 8) + " vs " +
                       fmt(definitional->value, 8) + ")");
    sum << "  warning: estimators disagree\n";
  }
  const BoundsReport b = bounds_report(sys, p, o.l);
  for (const auto& e : b.entries()) {
    if (e.value) sum << "  " << e.name << " = " << fmt(*e.value, 8) << "\n";
  }

  r.report["results"] = {{"system",
                          {{"name", file.name}, {"n", sys.dim()}, {"m", sys.channels()}}},
                         {"estimates", estimates},
                         {"bounds", bounds_json(b)},
                         {"classification", verdicts}};
  r.report["warnings"] = warnings;
  r.summary = sum.str();
  return r;
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
  std::string system_file;
  std::string x0;
  double h = 1e-3;
  double t_end = 1.0;
  std::uint64_t paths = 10'000;
  std::size_t checkpoints = 10;
  std::string scheme = "milstein";
  std::string p = "2";
  int l = 2;
  std::optional<std::uint64_t> seed;
  std::string out;
  unsigned workers = 1;
};

inline CommandResult cmd_simulate(const SimulateOptions& o) {
  const SystemFile file = load_system(o.system_file);
  const SdeSystem& sys = file.system;
  SimConfig cfg;
  cfg.h = o.h;
  cfg.t_end = o.t_end;
  cfg.paths = o.paths;
  cfg.checkpoints = o.checkpoints;
  cfg.scheme = parse_scheme(o.scheme);
  cfg.seed = resolve_seed(o.seed);
  cfg.p = parse_norm(o.p);
  cfg.l = o.l;
  cfg.workers = o.workers;
  cfg.validate();
  const auto x0 = parse_state(o.x0, sys.dim());

  const MomentTrajectory traj = simulate_moments(sys, x0, cfg);
  if (!o.out.empty()) {
    std::ofstream csv(o.out, std::ios::binary);
    if (!csv) throw ArgumentError("--out: cannot open '" + o.out + "' for writing");
    write_trajectory_csv(csv, traj);
  }

  CommandResult r;
  ojson x0_json = ojson::array();
  for (const auto& z : x0) x0_json.push_back(z.real());
  r.report["invocation"] = invocation("simulate",
                                      {{"system", o.system_file},
                                       {"x0", x0_json},
                                       {"h", cfg.h},
                                       {"t_end", cfg.t_end},
                                       {"paths", cfg.paths},
                                       {"checkpoints", cfg.checkpoints},
                                       {"scheme", to_string(cfg.scheme)},
                                       {"p", to_string(cfg.p)},
                                       {"l", cfg.l},
                                       {"out", o.out}},
                                      cfg.seed);
  ojson warnings = ojson::array();
  std::ostringstream sum;
  sum << "simulated " << cfg.paths << " paths, " << cfg.steps() << " " << to_string(cfg.scheme)
      << " steps of h=" << cfg.h << "\n";

  ojson moments = ojson::array();
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    ojson row{{"time", traj.times[k]}};
    if (std::isfinite(traj.moments[k])) {
      row["moment"] = traj.moments[k];
      row["std_error"] = traj.std_errors[k];
    } else {
      row["moment"] = "inf";
      row["std_error"] = "inf";
    }
    moments.push_back(row);
  }
  ojson results{{"estimator", "ensemble mean of ||X_t||_p^l"},
                {"trajectory", moments},
                {"diverged", traj.diverged_at.has_value()}};
  if (traj.diverged_at) {
    results["diverged_at_time"] = traj.times[*traj.diverged_at];
    warnings.push_back("some paths exceeded " + fmt(kDivergenceThreshold) +
                       "; moments from t=" + fmt(traj.times[*traj.diverged_at]) + " are infinite");
    sum << "  diverged at t=" << traj.times[*traj.diverged_at] << "\n";
  }
  try {
    const GrowthRate g = growth_rate(traj);
    results["growth_rate"] = {{"estimator", "least-squares slope of log moment vs time"},
                              {"rate", g.rate},
                              {"rate_stderr", g.rate_stderr},
                              {"points_used", g.points_used},
                              {"positive", g.rate > 0.0}};
    if (g.rate > 0.0) warnings.push_back("positive growth rate: moments grow");
    sum << "  growth rate = " << fmt(g.rate, 6) << " +- " << fmt(g.rate_stderr, 3) << "\n";
  } catch (const InsufficientDataError& e) {
    results["growth_rate"] = nullptr;
    warnings.push_back(std::string("growth rate not fitted: ") + e.what());
  }
  if (!o.out.empty()) sum << "  trajectory written to " << o.out << "\n";
  r.report["results"] = results;
  r.report["warnings"] = warnings;
  r.summary = sum.str();
  return r;
}

// ---------------------------------------------------------------- table1

struct Table1Options {
  std::optional<std::uint64_t> seed;
  std::uint64_t samples = 1'000'000;
  /// samples for the 100 x 100 smoke case
  std::uint64_t large_samples = 100;
  unsigned workers = 1;
};

inline CommandResult cmd_table1(const Table1Options& o) {
  const std::uint64_t seed = resolve_seed(o.seed);
  CommandResult r;
  r.report["invocation"] = invocation(
      "table1", {{"samples", o.samples}, {"large_samples", o.large_samples}}, seed);
  ojson rows = ojson::array();
  ojson warnings = ojson::array();
  std::ostringstream sum;
  sum << "case        nu (computed)   +- se        printed      verdict\n";

  for (const auto& c : examples::table1_cases(seed)) {
    McConfig cfg;
    cfg.seed = seed;
    cfg.samples = c.value_checked ? o.samples : std::min(o.samples, o.large_samples);
    cfg.workers = o.workers;
    const NuEstimate e = nu_direct(c.system, Norm::two, 2, cfg);
    const BoundsReport b = bounds_report(c.system, Norm::two, 2);

    ojson row{{"case", c.label},
              {"n", c.system.dim()},
              {"nu", estimate_json(e)},
              {"bounds",
               {{"mu_lower", b.mu_lower ? ojson(*b.mu_lower) : ojson()},
                {"mu_upper", b.mu_upper ? ojson(*b.mu_upper) : ojson()},
                {"msest_upper", b.msest_upper ? ojson(*b.msest_upper) : ojson()}}},
              {"printed",
               {{"lbound", c.printed_lbound}, {"nu", c.printed_nu}, {"ubound", c.printed_ubound}}}};

    std::string verdict;
    if (!c.value_checked) {
      verdict = "not_compared";
    } else {
      double reference = c.printed_nu;
      double tol = std::max(0.01 * std::abs(reference), 3.0 * e.std_error);
      if (c.label == "f") {
        reference = -300.0;
        tol = 3.0 * e.std_error + 1e-9 * 300.0;
      } else if (c.label == "a") {
        reference = -225.0;
        tol = 3.0 * e.std_error + 1e-9 * 225.0;
      }
      const bool ok = std::abs(e.value - reference) <= tol;
      row["reference"] = reference;
      row["tolerance"] = tol;
      verdict = ok ? "agree" : "disagree";
      if (!ok) {
        warnings.push_back("case " + c.label + ": computed " + fmt(e.value, 8) +
                           " is outside the tolerance of the reference " + fmt(reference, 8));
      }
    }
    row["verdict"] = verdict;
    if (!c.note.empty()) {
      row["annotation"] = c.note;
      warnings.push_back("case " + c.label + ": " + c.note);
    }
    rows.push_back(row);

    char line[160];
    std::snprintf(line, sizeof line, "(%s) %3zux%-3zu %14.6g  %10.3g  %12.6g    %s\n",
                  c.label.c_str(), c.system.dim(), c.system.dim(), e.value, e.std_error,
                  c.printed_nu, verdict.c_str());
    sum << line;
  }
  r.report["results"] = {{"estimator", "direct"}, {"p", "2"}, {"l", 2}, {"cases", rows}};
  r.report["warnings"] = warnings;
  r.summary = sum.str();
  return r;
}

// ---------------------------------------------------------------- examples

struct ExamplesOptions {
  std::string which;
  double g_over_l = 10.0;
  double eps = 0.1;
  double b = 50.0;
  double sigma2 = 1.0;
  std::optional<std::uint64_t> samples;
  std::optional<std::uint64_t> seed;
  double tol = 0.0;
  unsigned workers = 1;
};

inline CommandResult cmd_examples(const ExamplesOptions& o) {
  const std::uint64_t seed = resolve_seed(o.seed);
  McConfig cfg;
  cfg.seed = seed;
  cfg.samples = o.samples.value_or(default_samples(2));
  cfg.workers = o.workers;
  if (!std::isfinite(o.g_over_l) || !std::isfinite(o.eps) || !std::isfinite(o.b) ||
      !std::isfinite(o.sigma2)) {
    throw ArgumentError("example parameters must be finite");
  }

  CommandResult r;
  ojson warnings = ojson::array();
  std::ostringstream sum;
  if (o.which == "pendulum") {
    if (!(o.g_over_l > 0.0)) throw ArgumentError("--g-over-l must be positive");
    if (!(o.eps > 0.0 && o.eps < 1.0)) throw ArgumentError("--eps must lie in (0, 1)");
    if (!(o.b >= 0.0)) throw ArgumentError("--b must be nonnegative");
    r.report["invocation"] = invocation("examples",
                                        {{"which", o.which},
                                         {"g_over_l", o.g_over_l},
                                         {"eps", o.eps},
                                         {"b", o.b},
                                         {"samples", cfg.samples},
                                         {"tol", o.tol}},
                                        seed);
    const SdeSystem sys = examples::pendulum(o.g_over_l, o.eps, o.b);
    const double closed = examples::pendulum_nu(o.g_over_l, o.eps, o.b);
    const NuEstimate e = nu_direct(sys, Norm::two, 2, cfg);
    const double threshold = examples::pendulum_threshold(o.g_over_l, o.eps);
    const Stability s = classify(closed, 0.0, o.tol);
    r.report["results"] = {
        {"mu_2_A", mu(sys.drift(), Norm::two)},
        {"nu_closed_form", {{"estimator", "folded-normal mean E|N(c, s^2)| - eps b"},
                            {"c", 1.0 + o.g_over_l},
                            {"s", o.b + o.eps},
                            {"value", closed}}},
        {"nu_direct", estimate_json(e)},
        {"threshold_b", threshold},
        {"b_meets_threshold", o.b >= threshold},
        {"classification", to_string(s)}};
    if (o.b < threshold) {
      warnings.push_back("b is below the stabilising threshold " + fmt(threshold) +
                         "; nu_2^2 > 0 (unstable)");
    }
    sum << "pendulum g/l=" << o.g_over_l << " eps=" << o.eps << " b=" << o.b << "\n"
        << "  nu closed form = " << fmt(closed, 10) << "\n"
        << "  nu direct      = " << fmt(e.value, 10) << " +- " << fmt(e.std_error, 3) << "\n"
        << "  threshold b*   = " << fmt(threshold, 10) << "\n"
        << "  verdict: " << to_string(s) << "\n";
  } else if (o.which == "nonnormal") {
    r.report["invocation"] = invocation("examples",
                                        {{"which", o.which},
                                         {"b", o.b},
                                         {"sigma2", o.sigma2},
                                         {"samples", cfg.samples},
                                         {"tol", o.tol}},
                                        seed);
    const SdeSystem sys = examples::nonnormal(o.b, o.sigma2);
    const double closed = examples::nonnormal_nu(o.b, o.sigma2);
    const NuEstimate e = nu_direct(sys, Norm::two, 2, cfg);
    const double limit = 2.0 - std::abs(o.b);
    const Stability s = classify(closed, 0.0, o.tol);
    r.report["results"] = {
        {"mu_2_A", mu(sys.drift(), Norm::two)},
        {"nu_closed_form", {{"estimator", "sigma^2 - 2 + |b|"}, {"value", closed}}},
        {"nu_direct", estimate_json(e)},
        {"sigma2_limit", limit},
        {"condition_holds", o.sigma2 <= limit},
        {"real_sigma_can_stabilise", limit >= 0.0},
        {"classification", to_string(s)}};
    if (limit < 0.0) {
      warnings.push_back("|b| > 2: no real sigma gives nu_2^2 <= 0");
    }
    if (o.sigma2 < 0.0) {
      warnings.push_back("negative sigma2 means imaginary sigma; the direct estimate then "
                         "carries noise-driven variance and need not equal the closed form");
    }
    sum << "nonnormal b=" << o.b << " sigma^2=" << o.sigma2 << "\n"
        << "  nu closed form = " << fmt(closed, 10) << "\n"
        << "  nu direct      = " << fmt(e.value, 10) << " +- " << fmt(e.std_error, 3) << "\n"
        << "  need sigma^2 <= " << fmt(limit, 10) << "\n"
        << "  verdict: " << to_string(s) << "\n";
  } else {
    throw ArgumentError("--which must be pendulum or nonnormal");
  }
  r.report["warnings"] = warnings;
  r.summary = sum.str();
  return r;
}

// ---------------------------------------------------------------- errors

/// Runs a command body, turning library exceptions into exit codes.
inline CommandResult run_guarded(const std::function<CommandResult()>& body) {
  try {
    return body();
  } catch (const InputError& e) {
    CommandResult r;
    r.summary = std::string("error: ") + e.what() + "\n";
    r.exit_code = 2;
    return r;
  } catch (const NumericalError& e) {
    CommandResult r;
    r.summary = std::string("numerical failure: ") + e.what() + "\n";
    r.exit_code = 3;
    return r;
  }
}

}  // namespace stochlog::cli
