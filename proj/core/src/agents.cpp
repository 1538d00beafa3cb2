#include "asyncpd/agents.hpp"

#include <algorithm>

#include "asyncpd/errors.hpp"

namespace asyncpd {

void DualStamp::fold_max(const DualStamp& other) {
  for (std::size_t c = 0; c < counts.size(); ++c)
    counts[c] = std::max(counts[c], other.counts[c]);
}

bool DualStamp::agrees_on(const DualStamp& other,
                          const std::vector<int>& components) const {
  for (int c : components) {
    if (counts[c] != other.counts[c]) return false;
  }
  return true;
}

bool DualStamp::no_regression_on(const DualStamp& other,
                                 const std::vector<int>& components) const {
  for (int c : components) {
    if (other.counts[c] < counts[c]) return false;
  }
  return true;
}

bool DualAgentState::all_fresh() const {
  return std::all_of(constrained_agents.begin(), constrained_agents.end(),
                     [&](int i) { return copy_tags[i].fresh; });
}

PrimalAgentState make_primal_agent(const ProblemSpec& p, int id,
                                   const Eigen::VectorXd& x0,
                                   const Eigen::VectorXd& mu0) {
  PrimalAgentState s;
  s.id = id;
  s.local_x = x0;
  s.local_mu = mu0;
  s.stamp = DualStamp(p.dual_partition.count());
  s.last_compute_stamp = s.stamp;
  s.essential_neighbors = essential_neighbors(p)[id];
  s.relevant_duals = relevant_dual_blocks(p)[id];
  s.primal_partition = p.primal_partition;
  s.dual_partition = p.dual_partition;
  s.neighbor_tags.resize(p.primal_partition.count());
  for (auto& tag : s.neighbor_tags) tag.stamp = DualStamp(p.dual_partition.count());
  return s;
}

DualAgentState make_dual_agent(const ProblemSpec& p, int id,
                               const Eigen::VectorXd& x0,
                               const Eigen::VectorXd& mu0) {
  DualAgentState s;
  s.id = id;
  s.local_x = x0;
  s.own_block = mu0.segment(p.dual_partition.offset(id), p.dual_partition.size(id));
  s.round_stamp = DualStamp(p.dual_partition.count());
  s.constrained_agents = constrained_primal_blocks(p)[id];
  s.relevance_of_agent.resize(p.primal_partition.count());
  const auto relevant = relevant_dual_blocks(p);
  for (int i : s.constrained_agents) s.relevance_of_agent[i] = relevant[i];
  s.primal_partition = p.primal_partition;
  s.dual_partition = p.dual_partition;
  s.copy_tags.resize(p.primal_partition.count());
  for (auto& tag : s.copy_tags) tag.stamp = DualStamp(p.dual_partition.count());
  return s;
}

Eigen::VectorXd partial_grad_x(const ProblemSpec& p, int block,
                               const Eigen::VectorXd& x, const Eigen::VectorXd& mu) {
  Eigen::VectorXd g = p.objective->gradient(x);
  if (p.m > 0) g += p.constraints->jacobian(x).transpose() * mu;
  return g.segment(p.primal_partition.offset(block), p.primal_partition.size(block));
}

void primal_compute(PrimalAgentState& state, const ProblemSpec& p,
                    const DualGeometry& geom, double gamma) {
  if (gamma <= 0.0)
    throw ValidationError("primal stepsize gamma must be positive");
  (void)geom;
  const int off = p.primal_partition.offset(state.id);
  const int len = p.primal_partition.size(state.id);
  const Eigen::VectorXd step =
      state.local_x.segment(off, len) -
      gamma * partial_grad_x(p, state.id, state.local_x, state.local_mu);
  state.local_x.segment(off, len) = project_box(p.block_box(state.id), step);
  ++state.compute_count;
  state.last_compute_stamp = state.stamp;
}

ReceiveOutcome primal_receive(PrimalAgentState& state, const Message& msg) {
  if (msg.recipient != state.id)
    throw ProtocolViolation("message addressed to a different agent");

  if (msg.kind == MessageKind::DualToPrimal) {
    const int c = msg.sender;
    if (msg.dual_iteration <= state.stamp[c]) return ReceiveOutcome::DroppedRegression;
    state.local_mu.segment(state.dual_partition.offset(c),
                           state.dual_partition.size(c)) = msg.payload;
    state.stamp[c] = msg.dual_iteration;
    return ReceiveOutcome::AdoptedDualBlock;
  }

  if (msg.kind != MessageKind::PrimalToPrimal)
    throw ProtocolViolation("primal agent received a primal-to-dual message");

  const int j = msg.sender;
  const bool relevant_match = msg.stamp.agrees_on(state.stamp, state.relevant_duals);
  bool rest_ok = true;
  std::vector<char> relevant_mask(static_cast<std::size_t>(state.stamp.size()), 0);
  for (int c : state.relevant_duals) relevant_mask[c] = 1;
  for (int c = 0; c < state.stamp.size() && rest_ok; ++c) {
    if (!relevant_mask[c] && msg.stamp[c] < state.stamp[c]) rest_ok = false;
  }
  if (!relevant_match || !rest_ok) {
    ++state.discarded;
    return ReceiveOutcome::DiscardedStale;
  }

  state.local_x.segment(state.primal_partition.offset(j),
                        state.primal_partition.size(j)) = msg.payload;
  state.stamp.fold_max(msg.stamp);
  state.neighbor_tags[j] = {msg.stamp, msg.compute_seq, true};
  return ReceiveOutcome::AdoptedNeighborBlock;
}

namespace {

bool copy_is_fresh(const DualAgentState& s, int agent) {
  const auto& tag = s.copy_tags[agent];
  if (tag.compute_seq < 0) return false;  // initial value, never computed
  if (!tag.stamp.agrees_on(s.round_stamp, s.relevance_of_agent[agent])) return false;
  return tag.stamp[s.id] == s.round_stamp[s.id];
}

void refresh_flags(DualAgentState& s) {
  for (int i : s.constrained_agents) s.copy_tags[i].fresh = copy_is_fresh(s, i);
}

}  // namespace

bool dual_receive(DualAgentState& state, const Message& msg) {
  if (msg.kind != MessageKind::PrimalToDual || msg.recipient != state.id)
    throw ProtocolViolation("mis-routed message to dual agent");
  const int i = msg.sender;
  if (msg.stamp[state.id] > state.iteration)
    throw ProtocolViolation("primal block stamped ahead of the dual agent's count");

  state.local_x.segment(state.primal_partition.offset(i),
                        state.primal_partition.size(i)) = msg.payload;
  state.copy_tags[i].stamp = msg.stamp;
  state.copy_tags[i].compute_seq = msg.compute_seq;

  DualStamp before = state.round_stamp;
  state.round_stamp.fold_max(msg.stamp);
  state.round_stamp[state.id] = state.iteration;
  if (state.round_stamp == before) {
    state.copy_tags[i].fresh = copy_is_fresh(state, i);
  } else {
    refresh_flags(state);
  }
  return state.all_fresh();
}

void dual_compute(DualAgentState& state, const ProblemSpec& p,
                  const DualGeometry& geom, double rho) {
  if (rho <= 0.0 || rho >= dual_step_limit(geom.delta))
    throw ValidationError(
        "dual stepsize rho must satisfy 0 < rho < 2*delta/(delta^2 + 2)");
  if (!state.all_fresh())
    throw ProtocolViolation(
        "dual update fired without fresh blocks from every constrained agent");

  const int off = p.dual_partition.offset(state.id);
  const int len = p.dual_partition.size(state.id);
  const Eigen::VectorXd g_block =
      p.constraints->value(state.local_x).segment(off, len);
  const Eigen::VectorXd step =
      state.own_block + rho * (g_block - geom.delta * state.own_block);
  state.own_block = project_nonneg_l1(geom.block_sets[state.id], step);

  ++state.iteration;
  state.round_stamp[state.id] = state.iteration;
  refresh_flags(state);
}

std::vector<int> dual_broadcast_targets(const ProblemSpec& p, int c) {
  return constrained_primal_blocks(p)[c];
}

double dual_step_limit(double delta) { return 2.0 * delta / (delta * delta + 2.0); }

}  // namespace asyncpd
