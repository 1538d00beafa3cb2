#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "asyncpd/version.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Asynchronous block-based primal-dual solver and simulator"};
  app.set_version_flag("--version", asyncpd::kVersion);
  app.require_subcommand(1);

  std::string default_out = ".";
  if (const char* env = std::getenv("ASYNCPD_OUT_DIR")) default_out = env;

  asyncpd::cli::SolveOptions solve;
  solve.out_dir = default_out;
  auto* solve_cmd = app.add_subcommand(
      "solve", "Run one simulation; writes trace.csv, summary.json, bounds.json");
  solve_cmd->add_option("--problem", solve.problem_file, "Problem JSON file")
      ->required();
  solve_cmd->add_option("--config", solve.config_file, "Simulation config JSON file")
      ->required();
  solve_cmd->add_option("--out", solve.out_dir,
                        "Output directory (default: $ASYNCPD_OUT_DIR or .)");

  asyncpd::cli::SweepOptions sweep;
  sweep.out_dir = default_out;
  auto* sweep_cmd = app.add_subcommand(
      "sweep", "Run a benchmark experiment batch; one sub-directory per configuration");
  sweep_cmd->add_option("--kind", sweep.kind, "blocks | beta | commrate")->required();
  sweep_cmd->add_option("--seed", sweep.seed, "Benchmark seed (default 1)");
  sweep_cmd->add_option("--out", sweep.out_dir,
                        "Output directory (default: $ASYNCPD_OUT_DIR or .)");
  sweep_cmd->add_option("--scale", sweep.scale, "paper | small (default paper)");
  sweep_cmd->add_option("--seeds", sweep.seeds, "Number of consecutive seeds (default 1)");
  sweep_cmd->add_option("--ticks", sweep.max_ticks, "Tick budget per run");
  sweep_cmd->add_option("--stop-tol", sweep.stop_tol,
                        "Windowed successive-iterate threshold");
  sweep_cmd->add_option("--workers", sweep.workers, "Parallel runs (default 1)");

  asyncpd::cli::BoundsOptions bounds;
  auto* bounds_cmd = app.add_subcommand(
      "bounds", "Print rate constants, regularization bounds, and parameter recipes");
  bounds_cmd->add_option("--problem", bounds.problem_file, "Problem JSON file")
      ->required();
  bounds_cmd->add_option("--eps1", bounds.eps1, "Error budget for the decaying terms")
      ->required();
  bounds_cmd->add_option("--eps2", bounds.eps2, "Error budget for the asynchrony penalty")
      ->required();
  bounds_cmd->add_option("--delta", bounds.delta, "Regularization weight (default 0.1)");
  bounds_cmd->add_option("--gamma", bounds.gamma, "Primal stepsize (default gamma_max/2)");
  bounds_cmd->add_option("--rho", bounds.rho, "Dual stepsize (default delta/(1+delta^2))");
  bounds_cmd->add_option("--out", bounds.out_file, "Also write the report to this file");

  CLI11_PARSE(app, argc, argv);

  if (solve_cmd->parsed()) return asyncpd::cli::cmd_solve(solve);
  if (sweep_cmd->parsed()) return asyncpd::cli::cmd_sweep(sweep);
  if (bounds_cmd->parsed()) return asyncpd::cli::cmd_bounds(bounds);
  return asyncpd::cli::kExitValidation;
}
