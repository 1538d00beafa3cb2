#include "asyncpd/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <random>
#include <thread>

#include "asyncpd/errors.hpp"

namespace asyncpd {
namespace {

constexpr int kStopWindow = 50;
constexpr double kBoundSlack = 1e-12;

struct EngineChannel {
  MessageKind kind = MessageKind::PrimalToPrimal;
  int sender = -1;
  int recipient = -1;
  std::deque<Message> queue;
  std::int64_t last_sent_seq = 0;       // primal channels: one send per compute
  std::int64_t last_delivered_send = -1;  // FIFO audit
};

struct ComputeTag {
  std::int64_t event = -1;
  std::int64_t ops_tag = 0;
};

/// Omniscient counters over the event stream: the live stamp (componentwise
/// max over primal agents), the ops round counter with its reset rule, T(t),
/// and the kappa records folding into K(t).
class Observer {
 public:
  Observer(int np, int nd, std::vector<std::vector<int>> recipients,
           std::vector<std::vector<int>> relevant)
      : np_(np),
        recipients_(std::move(recipients)),
        relevant_(std::move(relevant)),
        first_compute_(np, -1),
        round_done_(np, 0),
        delivered_(np, std::vector<std::int64_t>(np, -1)) {
    state_.live_stamp = DualStamp(nd);
    state_.t_min = 0;
    state_.ops_history.push_back({0, 0});
  }

  const ObserverState& state() const { return state_; }
  std::int64_t ops() const { return state_.ops; }
  const DualStamp& live() const { return state_.live_stamp; }

  bool stamp_current_for(int agent, const DualStamp& stamp) const {
    return stamp.agrees_on(state_.live_stamp, relevant_[agent]);
  }

  /// Returns true when the live stamp advanced (epoch reset).
  bool on_primal_stamp(const DualStamp& stamp) {
    ++state_.events;
    bool advanced = false;
    for (int c = 0; c < stamp.size(); ++c) {
      if (stamp[c] > state_.live_stamp[c]) {
        state_.live_stamp[c] = stamp[c];
        advanced = true;
      }
    }
    if (advanced) reset_epoch();
    return advanced;
  }

  ComputeTag on_primal_compute(int agent, const DualStamp& stamp,
                               std::int64_t compute_seq) {
    const std::int64_t event = state_.events++;
    ComputeTag tag{event, 0};
    if (stamp_current_for(agent, stamp)) {
      tag.ops_tag = state_.ops;
      if (first_compute_[agent] < 0) {
        first_compute_[agent] = compute_seq;
        update_round(agent);
      }
    }
    return tag;
  }

  void on_adopted_delivery(int sender, int recipient, std::int64_t compute_seq,
                           const DualStamp& stamp) {
    ++state_.events;
    if (!stamp_current_for(sender, stamp)) return;
    auto& cell = delivered_[sender][recipient];
    if (compute_seq > cell) {
      cell = compute_seq;
      update_round(sender);
    }
  }

  void on_dual_update(int dual_agent, std::int64_t iteration, std::int64_t ops_used,
                      std::int64_t kappa_event) {
    const std::int64_t event = state_.events++;
    (void)event;
    t_counts_.resize(std::max<std::size_t>(t_counts_.size(), dual_agent + 1), 0);
    t_counts_[dual_agent] = iteration;
    state_.t_min = *std::min_element(t_counts_.begin(), t_counts_.end());
    if (state_.kappa_records.empty())
      state_.k_min = ops_used;
    else
      state_.k_min = std::min(state_.k_min, ops_used);
    state_.kappa_records.push_back({dual_agent, iteration, kappa_event, ops_used});
  }

  void init_dual_counts(int nd) { t_counts_.assign(nd, 0); }

  /// Fires per ops increment; used by the contraction audit.
  std::function<void()> on_ops_increment;
  /// Fires on epoch reset (after the live stamp advanced).
  std::function<void()> on_epoch_reset;

 private:
  void reset_epoch() {
    state_.ops = 0;
    state_.ops_history.push_back({state_.events, 0});
    std::fill(first_compute_.begin(), first_compute_.end(), -1);
    std::fill(round_done_.begin(), round_done_.end(), 0);
    done_count_ = 0;
    for (auto& row : delivered_) std::fill(row.begin(), row.end(), -1);
    if (on_epoch_reset) on_epoch_reset();
  }

  void update_round(int agent) {
    const bool was_done = round_done_[agent] != 0;
    bool done = first_compute_[agent] >= 0;
    if (done) {
      for (int j : recipients_[agent]) {
        if (delivered_[agent][j] < first_compute_[agent]) {
          done = false;
          break;
        }
      }
    }
    if (done != was_done) {
      round_done_[agent] = done ? 1 : 0;
      done_count_ += done ? 1 : -1;
    }
    if (done_count_ == np_) {
      ++state_.ops;
      state_.ops_history.push_back({state_.events, state_.ops});
      std::fill(first_compute_.begin(), first_compute_.end(), -1);
      std::fill(round_done_.begin(), round_done_.end(), 0);
      done_count_ = 0;
      if (on_ops_increment) on_ops_increment();
    }
  }

  int np_;
  std::vector<std::vector<int>> recipients_;
  std::vector<std::vector<int>> relevant_;
  ObserverState state_;
  std::vector<std::int64_t> first_compute_;
  std::vector<char> round_done_;
  int done_count_ = 0;
  std::vector<std::vector<std::int64_t>> delivered_;
  std::vector<std::int64_t> t_counts_;
};

void parallel_over(int workers, const std::vector<int>& items,
                   const std::function<void(int)>& body) {
  if (workers <= 1 || items.size() < 2) {
    for (int item : items) body(item);
    return;
  }
  const int used = std::min<int>(workers, static_cast<int>(items.size()));
  std::vector<std::thread> pool;
  pool.reserve(used);
  for (int w = 0; w < used; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t k = w; k < items.size(); k += used) body(items[k]);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

void validate_config(const ProblemSpec& p, const DualGeometry& geom,
                     const ProblemConstants& consts, const SimulationConfig& cfg) {
  if (cfg.max_ticks < 1) throw ValidationError("config: max_ticks must be >= 1");
  if (cfg.snapshot_every < 1)
    throw ValidationError("config: snapshot_every must be >= 1");
  if (cfg.workers < 1) throw ValidationError("config: workers must be >= 1");
  if (!(cfg.p_update > 0.0 && cfg.p_update <= 1.0))
    throw ValidationError("config: p_update must lie in (0, 1]");
  if (!(cfg.p_comm > 0.0 && cfg.p_comm <= 1.0))
    throw ValidationError("config: p_comm must lie in (0, 1]");
  if (!(cfg.delay_q >= 0.0 && cfg.delay_q < 1.0))
    throw ValidationError("config: delay_q must lie in [0, 1)");
  if (cfg.stop_tol < 0.0) throw ValidationError("config: stop_tol must be >= 0");
  if (std::abs(cfg.delta - geom.delta) > 1e-12)
    throw ValidationError("config: delta disagrees with the dual geometry");
  if (!(cfg.gamma > 0.0 && cfg.gamma < consts.gamma_max))
    throw ValidationError(
        "config: gamma must satisfy 0 < gamma < 1 / max row sum of the Hessian "
        "(gamma_max)");
  if (p.m > 0 && !(cfg.rho > 0.0 && cfg.rho < dual_step_limit(geom.delta)))
    throw ValidationError(
        "config: rho must satisfy 0 < rho < 2*delta/(delta^2 + 2)");
  if (cfg.x0.size() != 0) {
    if (cfg.x0.size() != p.n || !p.box().contains(cfg.x0, 1e-12))
      throw ValidationError("config: x0 override must lie in the box");
  }
  if (cfg.mu0.size() != 0) {
    if (cfg.mu0.size() != p.m)
      throw ValidationError("config: mu0 override has wrong dimension");
    for (int c = 0; c < p.dual_partition.count(); ++c) {
      const auto block = cfg.mu0.segment(p.dual_partition.offset(c),
                                         p.dual_partition.size(c));
      if (!geom.block_sets[c].contains(block, 1e-12))
        throw ValidationError("config: mu0 override must lie in the dual sets");
    }
  }
}

RunResult run(const ProblemSpec& p, const DualGeometry& geom,
              const ProblemConstants& consts, const SimulationConfig& cfg,
              const Schedule* schedule) {
  validate(p);
  validate_config(p, geom, consts, cfg);

  const int np = p.primal_partition.count();
  const int nd = p.dual_partition.count();

  const Eigen::VectorXd x0 =
      cfg.x0.size() ? cfg.x0 : Eigen::VectorXd(0.5 * (p.box_lower + p.box_upper));
  const Eigen::VectorXd mu0 =
      cfg.mu0.size() ? cfg.mu0 : Eigen::VectorXd(Eigen::VectorXd::Zero(p.m));

  std::vector<PrimalAgentState> primal;
  primal.reserve(np);
  for (int i = 0; i < np; ++i) primal.push_back(make_primal_agent(p, i, x0, mu0));
  std::vector<DualAgentState> dual;
  dual.reserve(nd);
  for (int c = 0; c < nd; ++c) dual.push_back(make_dual_agent(p, c, x0, mu0));

  const auto neighbors = essential_neighbors(p);
  std::vector<std::vector<int>> recipients(np);
  for (int j = 0; j < np; ++j) {
    for (int i : neighbors[j]) recipients[i].push_back(j);
  }
  const auto constrained = constrained_primal_blocks(p);
  const auto relevant = relevant_dual_blocks(p);

  // Maintained coordinates per agent: own block plus essential neighbors.
  std::vector<std::vector<int>> maintained(np);
  for (int i = 0; i < np; ++i) {
    auto add_block = [&](int b) {
      for (int a = p.primal_partition.offset(b);
           a < p.primal_partition.offset(b) + p.primal_partition.size(b); ++a)
        maintained[i].push_back(a);
    };
    add_block(i);
    for (int j : neighbors[i]) add_block(j);
    std::sort(maintained[i].begin(), maintained[i].end());
  }

  // Channels in a fixed enumeration order.
  std::vector<EngineChannel> channels;
  std::vector<std::size_t> p2p_channels, p2d_channels, d2p_channels;
  for (int i = 0; i < np; ++i) {
    for (int j : recipients[i]) {
      p2p_channels.push_back(channels.size());
      channels.push_back({MessageKind::PrimalToPrimal, i, j, {}, 0, -1});
    }
  }
  for (int i = 0; i < np; ++i) {
    for (int c = 0; c < nd; ++c) {
      const auto& list = constrained[c];
      if (std::find(list.begin(), list.end(), i) != list.end()) {
        p2d_channels.push_back(channels.size());
        channels.push_back({MessageKind::PrimalToDual, i, c, {}, 0, -1});
      }
    }
  }
  std::vector<std::vector<std::size_t>> d2p_of_dual(nd);
  for (int c = 0; c < nd; ++c) {
    for (int i : constrained[c]) {
      d2p_of_dual[c].push_back(channels.size());
      d2p_channels.push_back(channels.size());
      channels.push_back({MessageKind::DualToPrimal, c, i, {}, 0, -1});
    }
  }

  Observer observer(np, nd, recipients, relevant);
  observer.init_dual_counts(nd);

  // Per-agent compute tags (event index and ops value at compute), indexed by
  // compute_seq - 1. Used for the kappa records of dual updates.
  std::vector<std::vector<ComputeTag>> compute_tags(np);

  RunResult result;
  result.oracle_available = cfg.oracle;

  RateConstants rc;
  bool have_rc = false;
  if (cfg.oracle && p.m > 0) {
    rc = rate_constants(p, geom, consts, cfg.gamma, cfg.rho);
    have_rc = true;
  }
  if (cfg.oracle) {
    result.saddle = saddle_oracle(p, geom, consts);
    result.mu0_dist_sq = (mu0 - result.saddle.mu).squaredNorm();
  }

  // mu(t) reconstruction for the per-stamp fixed-mu cache.
  std::vector<std::vector<Eigen::VectorXd>> mu_history(nd);
  for (int c = 0; c < nd; ++c) mu_history[c].push_back(dual[c].own_block);
  std::map<std::vector<std::int64_t>, Eigen::VectorXd> fixed_mu_cache;
  auto fixed_point_at_live = [&]() -> const Eigen::VectorXd& {
    const auto key = observer.live().counts;
    auto it = fixed_mu_cache.find(key);
    if (it == fixed_mu_cache.end()) {
      Eigen::VectorXd mu_t(p.m);
      for (int c = 0; c < nd; ++c)
        mu_t.segment(p.dual_partition.offset(c), p.dual_partition.size(c)) =
            mu_history[c][static_cast<std::size_t>(observer.live()[c])];
      it = fixed_mu_cache.emplace(key, fixed_mu_minimizer(p, geom, mu_t, 1e-11)).first;
    }
    return it->second;
  };

  auto maintained_inf_dist = [&](const Eigen::VectorXd& target) {
    double worst = 0.0;
    for (int i = 0; i < np; ++i) {
      for (int a : maintained[i])
        worst = std::max(worst, std::abs(primal[i].local_x[a] - target[a]));
    }
    return worst;
  };

  // Contraction audit. After the r-th completed round of a stamp epoch every
  // maintained sup distance to the epoch's fixed point must lie within
  // q_p^r of the epoch-start radius; the per-increment ratio is measured
  // against that certified envelope. (Raw consecutive-measurement ratios are
  // ill-posed: the measurement instant interleaves with computes already
  // belonging to the next round.)
  double audit_envelope = -1.0;
  const double audit_q_p = 1.0 - cfg.gamma * consts.beta;
  result.worst_contraction_ratio = 0.0;
  if (cfg.audit_contraction) {
    observer.on_epoch_reset = [&]() {
      audit_envelope = maintained_inf_dist(fixed_point_at_live());
    };
    observer.on_ops_increment = [&]() {
      if (audit_envelope > 1e-300) {
        const double cur = maintained_inf_dist(fixed_point_at_live());
        result.worst_contraction_ratio =
            std::max(result.worst_contraction_ratio, cur / audit_envelope);
        ++result.contraction_checks;
        audit_envelope *= audit_q_p;
      }
    };
    audit_envelope = maintained_inf_dist(fixed_point_at_live());
  }
  result.worst_dual_rate_slack = std::numeric_limits<double>::infinity();

  // Epoch-start measured deviation for the optional bound tightening.
  double measured_x0_inf = -1.0;
  if (cfg.bound_use_measured_x0 && cfg.oracle) {
    auto update_measured = [&]() {
      measured_x0_inf = maintained_inf_dist(fixed_point_at_live());
    };
    auto prev = observer.on_epoch_reset;
    observer.on_epoch_reset = [&, prev]() {
      if (prev) prev();
      measured_x0_inf = maintained_inf_dist(fixed_point_at_live());
    };
    update_measured();
  }

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto extra_delay = [&](const Message& msg) -> std::int64_t {
    if (schedule && schedule->extra_delay) return schedule->extra_delay(result.ticks, msg);
    if (cfg.delay_q <= 0.0) return 0;
    std::geometric_distribution<std::int64_t> dist(1.0 - cfg.delay_q);
    return dist(rng);
  };

  auto concat_owned = [&]() {
    Eigen::VectorXd x(p.n);
    for (int i = 0; i < np; ++i) {
      const int off = p.primal_partition.offset(i);
      const int len = p.primal_partition.size(i);
      x.segment(off, len) = primal[i].local_x.segment(off, len);
    }
    return x;
  };
  auto concat_dual = [&]() {
    Eigen::VectorXd mu(p.m);
    for (int c = 0; c < nd; ++c)
      mu.segment(p.dual_partition.offset(c), p.dual_partition.size(c)) =
          dual[c].own_block;
    return mu;
  };

  auto snapshot = [&](std::int64_t tick) {
    TraceRecord rec;
    rec.tick = tick;
    rec.stamp = observer.live().counts;
    rec.ops = observer.state().ops;
    rec.t_min = observer.state().t_min;
    rec.k_min = observer.state().k_min;
    rec.x_concat = concat_owned();
    rec.mu_concat = concat_dual();
    rec.discarded_messages = result.discarded_messages;
    rec.consecutive_distance = result.final_consecutive_distance;
    rec.agent_dist_sq = Eigen::VectorXd::Constant(
        np, std::numeric_limits<double>::quiet_NaN());
    rec.bound_value = std::numeric_limits<double>::quiet_NaN();
    if (cfg.oracle) {
      for (int i = 0; i < np; ++i) {
        double d = 0.0;
        for (int a : maintained[i]) {
          const double diff = primal[i].local_x[a] - result.saddle.x[a];
          d += diff * diff;
        }
        rec.agent_dist_sq[i] = d;
      }
      if (have_rc) {
        rec.bound_value =
            convergence_bound(rc, rec.ops, rec.t_min, rec.k_min, result.mu0_dist_sq,
                          cfg.bound_use_measured_x0 ? measured_x0_inf : -1.0);
        rec.bound_violated =
            (rec.agent_dist_sq.maxCoeff() > rec.bound_value + kBoundSlack);
        result.any_bound_violation |= rec.bound_violated;
      }
    }
    result.trace.push_back(std::move(rec));
  };

  auto deliver_from = [&](EngineChannel& chan, std::int64_t tick) {
    while (!chan.queue.empty() && chan.queue.front().deliver_event <= tick) {
      Message msg = std::move(chan.queue.front());
      chan.queue.pop_front();
      if (cfg.audit_messages && msg.send_event < chan.last_delivered_send)
        throw ProtocolViolation("FIFO order violated on a channel");
      chan.last_delivered_send = msg.send_event;
      ++result.messages_delivered;

      if (msg.kind == MessageKind::DualToPrimal) {
        const auto outcome = primal_receive(primal[msg.recipient], msg);
        if (outcome == ReceiveOutcome::AdoptedDualBlock)
          observer.on_primal_stamp(primal[msg.recipient].stamp);
      } else if (msg.kind == MessageKind::PrimalToPrimal) {
        const auto outcome = primal_receive(primal[msg.recipient], msg);
        if (outcome == ReceiveOutcome::AdoptedNeighborBlock) {
          observer.on_primal_stamp(primal[msg.recipient].stamp);
          observer.on_adopted_delivery(msg.sender, msg.recipient, msg.compute_seq,
                                       msg.stamp);
        } else if (outcome == ReceiveOutcome::DiscardedStale) {
          result.discarded_messages = 0;
          for (const auto& a : primal) result.discarded_messages += a.discarded;
        }
      } else {
        dual_receive(dual[msg.recipient], msg);
      }
    }
  };

  Eigen::VectorXd prev_x = concat_owned();
  std::deque<double> window;
  std::vector<int> active;
  std::vector<int> fired;
  std::vector<double> before_dist_sq(nd, 0.0);

  std::int64_t tick = 0;
  bool converged = false;
  for (; tick < cfg.max_ticks; ++tick) {
    result.ticks = tick;

    // Dual broadcasts due at this tick arrive before anything else.
    for (std::size_t idx : d2p_channels) deliver_from(channels[idx], tick);

    // Primal activations and computes.
    active.clear();
    for (int i = 0; i < np; ++i) {
      const double u = unif(rng);
      const bool on = schedule && schedule->primal_active
                          ? schedule->primal_active(tick, i)
                          : u < cfg.p_update;
      if (on) active.push_back(i);
    }
    if (!active.empty()) {
      // Dual-consistency audit: every consumed neighbor copy must have been
      // adopted under stamp agreement.
      for (int i : active) {
        for (int j : primal[i].essential_neighbors) {
          if (!primal[i].neighbor_tags[j].consistent) ++result.mixed_stamp_consumptions;
        }
      }
      parallel_over(cfg.workers, active, [&](int i) {
        primal_compute(primal[i], p, geom, cfg.gamma);
      });
      for (int i : active) {
        const ComputeTag tag =
            observer.on_primal_compute(i, primal[i].stamp, primal[i].compute_count);
        compute_tags[i].push_back(tag);
      }
    }

    // Transmissions: one send per compute per channel, gated by
    // the communication rate.
    auto try_send = [&](EngineChannel& chan) {
      const auto& sender = primal[chan.sender];
      if (sender.compute_count <= chan.last_sent_seq) return;
      Message msg;
      msg.kind = chan.kind;
      msg.sender = chan.sender;
      msg.recipient = chan.recipient;
      msg.stamp = sender.last_compute_stamp;
      msg.compute_seq = sender.compute_count;
      msg.send_event = tick;
      const bool go = schedule && schedule->transmit ? schedule->transmit(tick, msg)
                                                     : unif(rng) < cfg.p_comm;
      if (!go) return;
      msg.payload = sender.own_block();
      msg.deliver_event = tick + extra_delay(msg);
      chan.last_sent_seq = sender.compute_count;
      ++result.messages_sent;
      chan.queue.push_back(std::move(msg));
    };
    for (std::size_t idx : p2p_channels) try_send(channels[idx]);
    for (std::size_t idx : p2d_channels) try_send(channels[idx]);

    // Primal-sourced deliveries due this tick.
    for (std::size_t idx : p2p_channels) deliver_from(channels[idx], tick);
    for (std::size_t idx : p2d_channels) deliver_from(channels[idx], tick);

    // Freshness-gated dual updates and their broadcasts.
    if (!cfg.freeze_dual && nd > 0) {
      fired.clear();
      for (int c = 0; c < nd; ++c) {
        if (dual[c].all_fresh()) fired.push_back(c);
      }
      if (!fired.empty()) {
        if (cfg.audit_dual_rate && cfg.oracle) {
          for (int c : fired) {
            const auto opt = result.saddle.mu.segment(p.dual_partition.offset(c),
                                                      p.dual_partition.size(c));
            before_dist_sq[c] = (dual[c].own_block - opt).squaredNorm();
          }
        }
        std::vector<std::int64_t> ops_used(nd, 0);
        std::vector<std::int64_t> kappa_event(nd, 0);
        for (int c : fired) {
          std::int64_t used = std::numeric_limits<std::int64_t>::max();
          std::int64_t kappa = std::numeric_limits<std::int64_t>::max();
          for (int i : dual[c].constrained_agents) {
            const auto& tag_list = compute_tags[i];
            const std::int64_t seq = dual[c].copy_tags[i].compute_seq;
            const ComputeTag& tag = tag_list[static_cast<std::size_t>(seq - 1)];
            used = std::min(used, tag.ops_tag);
            kappa = std::min(kappa, tag.event);
          }
          ops_used[c] = used;
          kappa_event[c] = kappa;
        }
        parallel_over(cfg.workers, fired, [&](int c) {
          dual_compute(dual[c], p, geom, cfg.rho);
        });
        for (int c : fired) {
          observer.on_dual_update(c, dual[c].iteration, ops_used[c], kappa_event[c]);
          mu_history[c].push_back(dual[c].own_block);
          if (cfg.audit_dual_rate && cfg.oracle && have_rc) {
            const auto opt = result.saddle.mu.segment(p.dual_partition.offset(c),
                                                      p.dual_partition.size(c));
            const double after = (dual[c].own_block - opt).squaredNorm();
            const double qe = static_cast<double>(ops_used[c]);
            const double rhs = rc.q_d * before_dist_sq[c] +
                               std::pow(rc.q_p, 2.0 * qe) * rc.e1[c] +
                               std::pow(rc.q_p, qe) * rc.e2[c] + rc.e3[c];
            result.worst_dual_rate_slack =
                std::min(result.worst_dual_rate_slack, rhs - after);
            ++result.dual_rate_checks;
          }
          for (std::size_t idx : d2p_of_dual[c]) {
            EngineChannel& chan = channels[idx];
            Message msg;
            msg.kind = MessageKind::DualToPrimal;
            msg.sender = c;
            msg.recipient = chan.recipient;
            msg.payload = dual[c].own_block;
            msg.dual_iteration = dual[c].iteration;
            msg.send_event = tick;
            msg.deliver_event = tick + 1 + extra_delay(msg);
            ++result.messages_sent;
            chan.queue.push_back(std::move(msg));
          }
        }
      }
    }

    // Convergence measurement and stop rule.
    const Eigen::VectorXd x_now = concat_owned();
    const double consec = (x_now - prev_x).norm();
    prev_x = x_now;
    result.final_consecutive_distance = consec;
    window.push_back(consec);
    if (static_cast<int>(window.size()) > kStopWindow) window.pop_front();

    if ((tick % cfg.snapshot_every) == 0) snapshot(tick);

    if (cfg.stop_tol > 0.0 && static_cast<int>(window.size()) == kStopWindow) {
      const double wmax = *std::max_element(window.begin(), window.end());
      if (wmax < cfg.stop_tol) {
        converged = true;
        break;
      }
    }
  }

  result.ticks = converged ? tick + 1 : cfg.max_ticks;
  if (result.trace.empty() || result.trace.back().tick != result.ticks - 1)
    snapshot(result.ticks - 1);
  result.status = converged ? RunStatus::Converged : RunStatus::TickBudgetExhausted;
  result.final_x = concat_owned();
  result.final_mu = concat_dual();
  result.observer = observer.state();
  result.discarded_messages = 0;
  for (const auto& a : primal) result.discarded_messages += a.discarded;
  for (const auto& chan : channels)
    result.messages_queued_at_end += static_cast<std::int64_t>(chan.queue.size());
  if (cfg.oracle) {
    result.final_distance_to_saddle = (result.final_x - result.saddle.x).norm();
    if (!result.trace.empty() && result.trace.back().agent_dist_sq.size() > 0)
      result.final_max_agent_dist_sq = result.trace.back().agent_dist_sq.maxCoeff();
  }
  if (result.dual_rate_checks == 0) result.worst_dual_rate_slack = 0.0;
  return result;
}

namespace {

/// Run-length block sizes of a component labelling, rejecting labellings in
/// which a component appears in more than one contiguous run.
std::vector<int> contiguous_runs(const std::vector<int>& labels) {
  std::vector<int> sizes;
  std::vector<int> seen;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (k == 0 || labels[k] != labels[k - 1]) {
      if (std::find(seen.begin(), seen.end(), labels[k]) != seen.end())
        throw ValidationError("grouped preset rejected: component not contiguous");
      seen.push_back(labels[k]);
      sizes.push_back(0);
    }
    ++sizes.back();
  }
  return sizes;
}

}  // namespace

PartitionPresets partition_presets(const ProblemSpec& p) {
  PartitionPresets out;
  out.scalar_primal = Partition::scalar(p.n);
  out.scalar_dual = p.m > 0 ? Partition::scalar(p.m) : Partition();
  if (p.m == 0) {
    out.grouped_primal = out.scalar_primal;
    out.grouped_dual = out.scalar_dual;
    return out;
  }

  for (int k = 0; k < p.m; ++k) {
    bool any = false;
    for (int a = 0; a < p.n && !any; ++a) any = p.constraints->depends(k, a);
    if (!any)
      throw ValidationError("grouped preset rejected: constraint row " +
                            std::to_string(k) + " depends on no variables");
  }

  // Connected components of the bipartite structural graph between primal
  // coordinates and constraint rows.
  const int total = p.n + p.m;
  std::vector<int> comp(total, -1);
  int num_comp = 0;
  std::vector<int> stack;
  for (int start = 0; start < total; ++start) {
    if (comp[start] >= 0) continue;
    comp[start] = num_comp;
    stack.push_back(start);
    while (!stack.empty()) {
      const int node = stack.back();
      stack.pop_back();
      if (node < p.n) {
        for (int k = 0; k < p.m; ++k) {
          if (comp[p.n + k] < 0 && p.constraints->depends(k, node)) {
            comp[p.n + k] = num_comp;
            stack.push_back(p.n + k);
          }
        }
      } else {
        const int k = node - p.n;
        for (int a = 0; a < p.n; ++a) {
          if (comp[a] < 0 && p.constraints->depends(k, a)) {
            comp[a] = num_comp;
            stack.push_back(a);
          }
        }
      }
    }
    ++num_comp;
  }

  if (num_comp == 1 && (p.n > 1 || p.m > 1))
    throw ValidationError(
        "grouped preset rejected: constraint sparsity is not block-separable");

  out.grouped_primal =
      Partition(contiguous_runs({comp.begin(), comp.begin() + p.n}));
  out.grouped_dual = Partition(contiguous_runs({comp.begin() + p.n, comp.end()}));
  return out;
}

}  // namespace asyncpd
