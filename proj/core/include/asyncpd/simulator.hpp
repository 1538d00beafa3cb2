#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <vector>

#include "asyncpd/agents.hpp"
#include "asyncpd/problem.hpp"
#include "asyncpd/reference.hpp"

namespace asyncpd {

/// Deterministic seeded run description. A fixed seed yields a bit-identical
/// trace, independent of the worker count.
struct SimulationConfig {
  std::uint64_t seed = 0;
  std::int64_t max_ticks = 100000;
  /// Per-primal-agent, per-tick activation probability.
  double p_update = 1.0;
  /// Per-channel, per-tick transmission probability for primal-sourced
  /// messages (the "communication rate").
  double p_comm = 1.0;
  /// Geometric extra-delay parameter in [0, 1); 0 means no extra delay.
  /// Primal-sourced messages with no extra delay arrive within the sending
  /// tick; dual broadcasts arrive at the next tick at the earliest.
  double delay_q = 0.0;
  double gamma = 0.0;
  double rho = 0.0;
  double delta = 0.0;
  /// Windowed stop rule on the 2-norm between consecutive concatenated
  /// iterates; 0 disables and the run uses the whole tick budget.
  double stop_tol = 0.0;
  std::int64_t snapshot_every = 100;
  int workers = 1;

  /// Solve the saddle oracle up front so snapshots carry distances and the
  /// convergence-bound column.
  bool oracle = true;
  /// Tighten the bound's first term with the measured deviation at each
  /// stamp-epoch start instead of the worst-case diameter.
  bool bound_use_measured_x0 = false;

  // Test hooks (not part of the CLI surface).
  bool freeze_dual = false;        // never fire dual updates
  bool audit_contraction = false;  // per-ops-increment contraction ratios
  bool audit_dual_rate = false;    // per-dual-update rate inequality
  bool audit_messages = true;      // FIFO order assertion per channel

  /// Optional overrides; empty means box midpoint / zero vector.
  Eigen::VectorXd x0;
  Eigen::VectorXd mu0;
};

/// Scripted-schedule override used by tests; fields left empty fall back to
/// the seeded stochastic model.
struct Schedule {
  std::function<bool(std::int64_t tick, int agent)> primal_active;
  std::function<bool(std::int64_t tick, const Message& msg)> transmit;
  std::function<int(std::int64_t tick, const Message& msg)> extra_delay;
};

/// Per-dual-update record: who updated, the update count, the event index of
/// the oldest primal block consumed, and the ops value those blocks carried.
struct KappaRecord {
  int dual_agent = -1;
  std::int64_t iteration = 0;
  std::int64_t kappa_event = -1;
  std::int64_t ops_used = 0;
};

/// Global omniscient counters maintained over the event stream.
struct ObserverState {
  DualStamp live_stamp;       // componentwise max over primal agents
  std::int64_t ops = 0;       // completed compute-and-deliver rounds
  std::int64_t t_min = 0;     // min_c t_c
  std::int64_t k_min = 0;     // running min of ops_used over kappa records
  std::int64_t events = 0;
  /// (event index, new ops value); resets append a 0.
  std::vector<std::pair<std::int64_t, std::int64_t>> ops_history;
  std::vector<KappaRecord> kappa_records;
};

struct TraceRecord {
  std::int64_t tick = 0;
  std::vector<std::int64_t> stamp;
  std::int64_t ops = 0;
  std::int64_t t_min = 0;
  std::int64_t k_min = 0;
  /// Concatenated owned blocks (the convergence measurement vector).
  Eigen::VectorXd x_concat;
  Eigen::VectorXd mu_concat;
  /// Squared distance to x_hat_delta per primal agent over the coordinates
  /// the agent maintains (own block and essential neighbors).
  Eigen::VectorXd agent_dist_sq;
  double bound_value = 0.0;
  bool bound_violated = false;
  double consecutive_distance = 0.0;
  std::int64_t discarded_messages = 0;
};

enum class RunStatus { Converged, TickBudgetExhausted };

struct RunResult {
  RunStatus status = RunStatus::TickBudgetExhausted;
  std::int64_t ticks = 0;
  std::vector<TraceRecord> trace;

  Eigen::VectorXd final_x;   // concatenated owned primal blocks
  Eigen::VectorXd final_mu;  // concatenated dual blocks

  ObserverState observer;
  std::int64_t discarded_messages = 0;
  std::int64_t mixed_stamp_consumptions = 0;  // must stay 0
  std::int64_t messages_sent = 0;
  std::int64_t messages_delivered = 0;
  std::int64_t messages_queued_at_end = 0;

  bool oracle_available = false;
  SaddlePoint saddle;          // x_hat_delta, mu_hat_delta when oracle is on
  double mu0_dist_sq = 0.0;    // ||mu(0) - mu_hat_delta||^2
  double final_distance_to_saddle = 0.0;      // ||final_x - x_hat_delta||
  double final_max_agent_dist_sq = 0.0;
  double final_consecutive_distance = 0.0;
  bool any_bound_violation = false;

  // audit summaries
  std::int64_t contraction_checks = 0;
  double worst_contraction_ratio = 0.0;
  std::int64_t dual_rate_checks = 0;
  double worst_dual_rate_slack = 0.0;  // min of (rhs - lhs); >= -1e-9 expected
};

void validate_config(const ProblemSpec& p, const DualGeometry& geom,
                     const ProblemConstants& consts, const SimulationConfig& cfg);

/// Executes the asynchronous block update loop tick by tick: primal
/// activations, transmissions, FIFO deliveries, freshness-gated dual updates
/// and broadcasts, with the observer folding every event.
RunResult run(const ProblemSpec& p, const DualGeometry& geom,
              const ProblemConstants& consts, const SimulationConfig& cfg,
              const Schedule* schedule = nullptr);

struct PartitionPresets {
  Partition scalar_primal;
  Partition scalar_dual;
  Partition grouped_primal;
  Partition grouped_dual;
};

/// Scalar blocks (one coordinate per agent) and constraint-disjoint grouped
/// blocks. Throws ValidationError when the constraint sparsity admits no
/// nontrivial grouping.
PartitionPresets partition_presets(const ProblemSpec& p);

}  // namespace asyncpd
