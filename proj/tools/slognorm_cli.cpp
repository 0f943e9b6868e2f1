#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "stochlog/cli/commands.hpp"

namespace {

using namespace stochlog::cli;

int emit(const CommandResult& r) {
  if (!r.report.is_null()) std::cout << r.report.dump(2) << "\n";
  std::cerr << r.summary;
  return r.exit_code;
}

// same validator as SLOGNORM_SEED
std::optional<std::uint64_t> seed_flag(const std::string& text) {
  if (text.empty()) return std::nullopt;
  return parse_seed(text, "--seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic logarithmic norms of linear Ito SDE coefficients"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  app.set_help_flag("--help", "print this help and exit");

  unsigned workers = default_workers();
  app.add_option("--workers", workers, "worker threads (does not change any output)")
      ->check(CLI::PositiveNumber);

  LognormOptions lo;
  auto* lognorm = app.add_subcommand("lognorm", "classical logarithmic norm mu_p of a matrix file");
  lognorm->add_option("matrix", lo.matrix_file, "matrix file")->required();
  lognorm->add_option("--p", lo.p, "norm: 1, 2 or inf");

  SlognormOptions so;
  std::string so_seed;
  std::uint64_t so_samples = 0;
  bool so_no_antithetic = false;
  auto* slog = app.add_subcommand("slognorm", "stochastic logarithmic norm, bounds and verdict");
  slog->add_option("system", so.system_file, "system file")->required();
  slog->add_option("--p", so.p, "norm: 1, 2 or inf");
  slog->add_option("--l", so.l, "moment order");
  slog->add_option("--method", so.method, "direct, definitional or both");
  auto* so_samples_opt =
      slog->add_option("--samples", so_samples, "Monte Carlo samples (default by dimension)");
  slog->add_option("--seed", so_seed, "master seed (default $SLOGNORM_SEED or 42)");
  slog->add_option("--h0", so.h0, "largest step of the definitional h sequence (0: automatic)");
  slog->add_option("--hsteps", so.hsteps, "number of halvings in the h sequence");
  slog->add_option("--tol", so.tol, "classification cut-off");
  slog->add_flag("--no-antithetic", so_no_antithetic, "disable antithetic pairs");

  SimulateOptions sim;
  std::string sim_seed;
  auto* simulate = app.add_subcommand("simulate", "ensemble moments E||X_t||_p^l");
  simulate->add_option("system", sim.system_file, "system file")->required();
  simulate->add_option("--x0", sim.x0, "initial state, comma separated (default e_1)");
  simulate->add_option("--h", sim.h, "step size");
  simulate->add_option("--t-end", sim.t_end, "final time");
  simulate->add_option("--paths", sim.paths, "number of paths");
  simulate->add_option("--checkpoints", sim.checkpoints, "checkpoints (must divide the step count)");
  simulate->add_option("--scheme", sim.scheme, "milstein or euler_maruyama");
  simulate->add_option("--p", sim.p, "norm: 1, 2 or inf");
  simulate->add_option("--l", sim.l, "moment order");
  simulate->add_option("--seed", sim_seed, "master seed");
  simulate->add_option("--out", sim.out, "CSV trajectory output path");

  Table1Options t1;
  std::string t1_seed;
  auto* table1 = app.add_subcommand("table1", "reference cases a-i with the direct estimator");
  table1->add_option("--samples", t1.samples, "samples per case");
  table1->add_option("--large-samples", t1.large_samples, "samples for the 100x100 case");
  table1->add_option("--seed", t1_seed, "master seed");

  ExamplesOptions ex;
  std::string ex_seed;
  std::uint64_t ex_samples = 0;
  auto* exam = app.add_subcommand("examples", "pendulum and nonnormal closed forms");
  exam->add_option("--which", ex.which, "pendulum or nonnormal")->required();
  exam->add_option("--g-over-l", ex.g_over_l, "pendulum g/l");
  exam->add_option("--eps", ex.eps, "pendulum noise on theta");
  exam->add_option("--b", ex.b, "pendulum noise on v, or nonnormal coupling");
  exam->add_option("--sigma2", ex.sigma2, "nonnormal sigma^2 (negative for imaginary sigma)");
  auto* ex_samples_opt = exam->add_option("--samples", ex_samples, "Monte Carlo samples");
  exam->add_option("--seed", ex_seed, "master seed");
  exam->add_option("--tol", ex.tol, "classification cut-off");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  return emit(run_guarded([&]() -> CommandResult {
    if (*lognorm) return cmd_lognorm(lo);
    if (*slog) {
      so.seed = seed_flag(so_seed);
      if (so_samples_opt->count() > 0) so.samples = so_samples;
      so.antithetic = !so_no_antithetic;
      so.workers = workers;
      return cmd_slognorm(so);
    }
    if (*simulate) {
      sim.seed = seed_flag(sim_seed);
      sim.workers = workers;
      return cmd_simulate(sim);
    }
    if (*table1) {
      t1.seed = seed_flag(t1_seed);
      t1.workers = workers;
      return cmd_table1(t1);
    }
    ex.seed = seed_flag(ex_seed);
    if (ex_samples_opt->count() > 0) ex.samples = ex_samples;
    ex.workers = workers;
    return cmd_examples(ex);
  }));
}
