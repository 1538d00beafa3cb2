#pragma once

#include <cstdint>
#include <string>

namespace asyncpd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitBudget = 2;
inline constexpr int kExitFrontier = 3;

struct SolveOptions {
  std::string problem_file;
  std::string config_file;
  std::string out_dir;
};

/// Runs the simulator and writes trace.csv, summary.json, bounds.json, and
/// manifest.json into out_dir. Exit 0 on convergence, 2 on tick budget
/// exhaustion, 1 on any validation failure.
int cmd_solve(const SolveOptions& opts);

struct SweepOptions {
  std::string kind;  // blocks | beta | commrate
  std::uint64_t seed = 1;
  std::string out_dir;
  std::string scale = "paper";  // paper | small
  int seeds = 1;
  std::int64_t max_ticks = 200000;
  double stop_tol = 1e-4;
  int workers = 1;  // parallel runs
};

/// One sub-directory per configuration and seed, plus an aggregate CSV of
/// ticks-to-threshold per configuration.
int cmd_sweep(const SweepOptions& opts);

struct BoundsOptions {
  std::string problem_file;
  double eps1 = 0.0;
  double eps2 = 0.0;
  double delta = 0.1;
  double gamma = 0.0;  // <= 0: gamma_max / 2
  double rho = 0.0;    // <= 0: delta / (1 + delta^2)
  std::string out_file;  // optional copy of the report
};

/// Prints the bound report (rate constants, regularization bounds, parameter
/// recipes with the round-trip check). Exit 3 when eps2 is unreachable.
int cmd_bounds(const BoundsOptions& opts);

}  // namespace asyncpd::cli
