#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "asyncpd/problem.hpp"

namespace asyncpd {

/// Per-dual-agent iteration counters tagging which dual variable a primal
/// computation used. Componentwise monotone over any agent's lifetime.
struct DualStamp {
  std::vector<std::int64_t> counts;

  DualStamp() = default;
  explicit DualStamp(int num_dual_agents)
      : counts(static_cast<std::size_t>(num_dual_agents), 0) {}

  std::int64_t operator[](int c) const { return counts[c]; }
  std::int64_t& operator[](int c) { return counts[c]; }
  int size() const { return static_cast<int>(counts.size()); }

  bool operator==(const DualStamp& other) const { return counts == other.counts; }

  /// Componentwise max in place.
  void fold_max(const DualStamp& other);
  /// Equality restricted to the listed components.
  bool agrees_on(const DualStamp& other, const std::vector<int>& components) const;
  /// other >= *this on every listed component.
  bool no_regression_on(const DualStamp& other, const std::vector<int>& components) const;
};

enum class MessageKind { PrimalToPrimal, PrimalToDual, DualToPrimal };

/// Immutable once created; transferable between workers. Channels are FIFO.
struct Message {
  MessageKind kind = MessageKind::PrimalToPrimal;
  int sender = -1;
  int recipient = -1;
  Eigen::VectorXd payload;  // one block
  /// Full iteration vector under which a primal payload was computed.
  DualStamp stamp;
  /// For dual payloads: the sender's iteration count after the update.
  std::int64_t dual_iteration = -1;
  /// Sender-local compute counter of the payload (primal payloads).
  std::int64_t compute_seq = -1;
  std::int64_t send_event = -1;
  std::int64_t deliver_event = -1;
};

enum class ReceiveOutcome {
  AdoptedNeighborBlock,
  DiscardedStale,
  AdoptedDualBlock,
  DroppedRegression,
};

/// Algorithm working memory of primal agent i: the full local primal copy
/// (own block authoritative), the local dual copy with its stamp, and
/// adoption metadata for the dual-consistency audit.
struct PrimalAgentState {
  int id = -1;
  Eigen::VectorXd local_x;
  Eigen::VectorXd local_mu;
  DualStamp stamp;

  std::vector<int> essential_neighbors;  // N_i
  std::vector<int> relevant_duals;       // dual blocks entering this gradient
  Partition primal_partition;
  Partition dual_partition;

  std::int64_t compute_count = 0;
  /// Stamp in effect at the latest compute; rides on outgoing payloads.
  DualStamp last_compute_stamp;
  std::int64_t discarded = 0;

  struct CopyTag {
    DualStamp stamp;                 // stamp the block was computed under
    std::int64_t compute_seq = -1;   // -1: shared initial value, never computed
    bool consistent = true;          // adopted under stamp agreement
  };
  std::vector<CopyTag> neighbor_tags;  // indexed by primal agent id

  Eigen::VectorXd own_block() const {
    return local_x.segment(primal_partition.offset(id), primal_partition.size(id));
  }
};

/// Working memory of dual agent c: its block, iteration count, the primal
/// copies tagged with the stamps they were computed under, and freshness
/// flags gating the update.
struct DualAgentState {
  int id = -1;
  std::int64_t iteration = 0;  // t_c
  Eigen::VectorXd own_block;
  Eigen::VectorXd local_x;
  /// Componentwise-max of stamps seen; own component pinned to iteration.
  DualStamp round_stamp;

  std::vector<int> constrained_agents;  // primal blocks appearing in g_[c]
  /// Per constrained primal agent: the dual blocks relevant to it (the
  /// components its stamp must be current on for its block to be fresh).
  std::vector<std::vector<int>> relevance_of_agent;  // indexed by primal id
  Partition primal_partition;
  Partition dual_partition;

  struct CopyTag {
    DualStamp stamp;
    std::int64_t compute_seq = -1;
    bool fresh = false;
  };
  std::vector<CopyTag> copy_tags;  // indexed by primal agent id

  bool all_fresh() const;
};

PrimalAgentState make_primal_agent(const ProblemSpec& p, int id,
                                   const Eigen::VectorXd& x0,
                                   const Eigen::VectorXd& mu0);
DualAgentState make_dual_agent(const ProblemSpec& p, int id,
                               const Eigen::VectorXd& x0,
                               const Eigen::VectorXd& mu0);

/// Block slice of grad_x L_delta evaluated on an agent's local copies. No
/// domain checks: feasibility is maintained by construction (projections).
Eigen::VectorXd partial_grad_x(const ProblemSpec& p, int block,
                               const Eigen::VectorXd& x, const Eigen::VectorXd& mu);

/// Projected gradient step on the owned block:
/// own_block <- Pi_{X_i}[own - gamma * grad block]; counts the event.
void primal_compute(PrimalAgentState& state, const ProblemSpec& p,
                    const DualGeometry& geom, double gamma);

/// Inbound message handling. Primal payloads are adopted only under stamp
/// agreement on the receiver's relevant dual components (no regression anywhere else);
/// newer counters for irrelevant components are folded into the receiver's
/// stamp. Dual payloads are always adopted unless they regress.
ReceiveOutcome primal_receive(PrimalAgentState& state, const Message& msg);

/// Stores the delivered block, folds the stamp view, recomputes freshness.
/// Returns true when every constrained agent's block is fresh.
bool dual_receive(DualAgentState& state, const Message& msg);

/// Projected ascent step on the owned dual block:
/// own_block <- Pi_{M_c}[own + rho (g_[c](x^c) - delta own)];
/// increments t_c and resets freshness. Requires completed freshness.
void dual_compute(DualAgentState& state, const ProblemSpec& p,
                  const DualGeometry& geom, double rho);

/// Broadcast targets of dual agent c: exactly the primal blocks
/// structurally present in g_[c].
std::vector<int> dual_broadcast_targets(const ProblemSpec& p, int c);

/// Upper bound of the admissible dual stepsize range: 2*delta/(delta^2 + 2).
double dual_step_limit(double delta);

}  // namespace asyncpd
