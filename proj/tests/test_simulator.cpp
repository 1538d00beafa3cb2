#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <limits>
#include <map>

#include "asyncpd/errors.hpp"
#include "asyncpd/io.hpp"
#include "asyncpd/netflow.hpp"
#include "asyncpd/simulator.hpp"
#include "support.hpp"

using namespace asyncpd;

namespace {

SimulationConfig base_config(double delta) {
  SimulationConfig cfg;
  cfg.delta = delta;
  cfg.gamma = 0.05;
  cfg.rho = 0.9 * dual_step_limit(delta);
  cfg.snapshot_every = 1;
  cfg.max_ticks = 200;
  return cfg;
}

}  // namespace

TEST_CASE("degenerate synchrony reproduces the centralized alternating iterates") {
  const ProblemSpec p = testing::one_dim_problem();
  const double delta = 0.1;
  const DualGeometry geom = make_dual_geometry(p, delta);
  const ProblemConstants consts = compute_constants(p, geom);

  SimulationConfig cfg = base_config(delta);
  cfg.max_ticks = 1000;
  cfg.p_update = 1.0;
  cfg.p_comm = 1.0;
  const RunResult result = run(p, geom, consts, cfg);
  REQUIRE(static_cast<std::int64_t>(result.trace.size()) == cfg.max_ticks);

  double x_ref = 0.5 * (p.box_lower[0] + p.box_upper[0]);
  double mu_ref = 0.0;
  const BoxSet box = p.box();
  const NonnegL1Ball dual_set = geom.full_set(1);
  for (std::int64_t k = 0; k < cfg.max_ticks; ++k) {
    x_ref = project_box(
        box, Eigen::VectorXd::Constant(
                 1, x_ref - cfg.gamma * ((x_ref - 2.0) + mu_ref)))[0];
    mu_ref = project_nonneg_l1(
        dual_set, Eigen::VectorXd::Constant(
                      1, mu_ref + cfg.rho * ((x_ref - 1.0) - delta * mu_ref)))[0];
    CHECK(std::abs(result.trace[k].x_concat[0] - x_ref) <= 1e-12);
    CHECK(std::abs(result.trace[k].mu_concat[0] - mu_ref) <= 1e-12);
  }
}

TEST_CASE("identical seeds give identical traces, independent of workers") {
  const auto [net, p] = generate_benchmark(23, {BenchmarkScale::Small});
  (void)net;
  const double delta = 0.1;
  const DualGeometry geom = make_dual_geometry(p, delta);
  const ProblemConstants consts = compute_constants(p, geom);

  SimulationConfig cfg;
  cfg.delta = delta;
  cfg.gamma = 0.01;
  cfg.rho = delta / (1.0 + delta * delta);
  cfg.seed = 99;
  cfg.max_ticks = 400;
  cfg.snapshot_every = 7;
  cfg.p_update = 0.6;
  cfg.p_comm = 0.5;
  cfg.delay_q = 0.3;

  const std::string first = trace_csv(run(p, geom, consts, cfg));
  const std::string second = trace_csv(run(p, geom, consts, cfg));
  CHECK(first == second);

  cfg.workers = 4;
  const std::string parallel = trace_csv(run(p, geom, consts, cfg));
  CHECK(first == parallel);

  SimulationConfig other = cfg;
  other.seed = 100;
  CHECK(first != trace_csv(run(p, geom, consts, other)));
}

TEST_CASE("message accounting: everything sent is delivered or still queued") {
  const auto [net, p] = generate_benchmark(29, {BenchmarkScale::Small});
  (void)net;
  const double delta = 0.1;
  const DualGeometry geom = make_dual_geometry(p, delta);
  const ProblemConstants consts = compute_constants(p, geom);
  SimulationConfig cfg;
  cfg.delta = delta;
  cfg.gamma = 0.01;
  cfg.rho = delta / (1.0 + delta * delta);
  cfg.max_ticks = 300;
  cfg.p_update = 0.7;
  cfg.p_comm = 0.4;
  cfg.delay_q = 0.5;
  const RunResult result = run(p, geom, consts, cfg);
  CHECK(result.messages_sent ==
        result.messages_delivered + result.messages_queued_at_end);
  CHECK(result.messages_delivered > 0);
}

TEST_CASE("ops counts full compute-and-deliver rounds and resets on stamp changes") {
  const ProblemSpec p = testing::coupled_quadratic();
  const double delta = 0.1;
  const DualGeometry geom = make_dual_geometry(p, delta);
  const ProblemConstants consts = compute_constants(p, geom);

  SUBCASE("frozen dual: one round per tick under full synchrony") {
    SimulationConfig cfg = base_config(delta);
    cfg.gamma = 0.1;
    cfg.freeze_dual = true;
    cfg.max_ticks = 50;
    const RunResult result = run(p, geom, consts, cfg);
    // Each tick: both agents compute and same-tick deliveries complete a round.
    CHECK(result.trace.front().ops == 1);
    CHECK(result.trace.back().ops == 50);
    CHECK(result.observer.t_min == 0);
    CHECK(result.observer.k_min == 0);
  }
  SUBCASE("dual updates reset the counter through the stamp epoch") {
    SimulationConfig cfg = base_config(delta);
    cfg.gamma = 0.1;
    cfg.max_ticks = 60;
    const RunResult result = run(p, geom, consts, cfg);
    int resets = 0;
    for (std::size_t k = 1; k < result.observer.ops_history.size(); ++k) {
      if (result.observer.ops_history[k].second == 0) ++resets;
    }
    CHECK(resets > 0);
    CHECK(result.observer.t_min > 0);
    // kappa records exist and their minimum matches K.
    REQUIRE_FALSE(result.observer.kappa_records.empty());
    std::int64_t k_min = result.observer.kappa_records.front().ops_used;
    std::map<int, std::int64_t> last_iteration;
    for (const auto& rec : result.observer.kappa_records) {
      k_min = std::min(k_min, rec.ops_used);
      last_iteration[rec.dual_agent] =
          std::max(last_iteration[rec.dual_agent], rec.iteration);
    }
    CHECK(result.observer.k_min == k_min);
    std::int64_t t_min = std::numeric_limits<std::int64_t>::max();
    for (int c = 0; c < p.dual_partition.count(); ++c) {
      const auto it = last_iteration.find(c);
      t_min = std::min(t_min, it == last_iteration.end() ? 0 : it->second);
    }
    CHECK(result.observer.t_min == t_min);
  }
}

TEST_CASE("asynchronous run exercises the consistency protocol") {
  const ProblemSpec p = testing::coupled_quadratic();
  const double delta = 0.1;
  const DualGeometry geom = make_dual_geometry(p, delta);
  const ProblemConstants consts = compute_constants(p, geom);
  SimulationConfig cfg;
  cfg.delta = delta;
  cfg.gamma = 0.1;
  cfg.rho = 0.09;
  cfg.seed = 7;
  cfg.max_ticks = 6000;
  cfg.snapshot_every = 200;
  cfg.p_update = 0.6;
  cfg.p_comm = 0.5;
  cfg.delay_q = 0.4;
  const RunResult result = run(p, geom, consts, cfg);

  CHECK(result.mixed_stamp_consumptions == 0);
  CHECK(result.discarded_messages > 0);
  CHECK_FALSE(result.any_bound_violation);
  bool any_round_completed = false;
  for (const auto& [event, value] : result.observer.ops_history)
    if (value > 0) any_round_completed = true;
  CHECK(any_round_completed);
  CHECK(result.observer.t_min > 0);
  // The asynchronous loop still converges toward the regularized saddle.
  CHECK(result.final_distance_to_saddle < 0.01);
}

TEST_CASE("scalar blocks with heterogeneous relevance converge via stamp gossip") {
  // Scalar partitions of the coupled problem: agents learn some dual counters
  // only through peer messages, and dual updates wait on three agents each.
  ProblemSpec p = testing::coupled_quadratic();
  p.primal_partition = Partition::scalar(4);
  p.dual_partition = Partition::scalar(2);
  const double delta = 0.1;
  const DualGeometry geom = make_dual_geometry(p, delta);
  const ProblemConstants consts = compute_constants(p, geom);
  SimulationConfig cfg;
  cfg.delta = delta;
  cfg.gamma = 0.1;
  cfg.rho = 0.09;
  cfg.seed = 23;
  cfg.max_ticks = 12000;
  cfg.snapshot_every = 500;
  cfg.p_update = 0.5;
  cfg.p_comm = 0.5;
  cfg.delay_q = 0.3;
  const RunResult result = run(p, geom, consts, cfg);
  CHECK(result.mixed_stamp_consumptions == 0);
  CHECK(result.observer.t_min > 0);
  CHECK_FALSE(result.any_bound_violation);
  CHECK(result.final_distance_to_saddle < 0.02);
}

TEST_CASE("heavy delays and sparse gates still deliver and converge") {
  // A large delta keeps the dual contraction fast so the slow part is purely
  // the message layer: Bernoulli gates at 0.3/0.4 plus mean extra delay 4.
  const auto [net, p] = generate_benchmark(47, {BenchmarkScale::Small});
  (void)net;
  const double delta = 0.5;
  const DualGeometry geom = make_dual_geometry(p, delta);
  const ProblemConstants consts = compute_constants(p, geom);
  SimulationConfig cfg;
  cfg.delta = delta;
  cfg.gamma = 0.01;
  cfg.rho = 0.9 * dual_step_limit(delta);
  cfg.seed = 31;
  cfg.max_ticks = 60000;
  cfg.snapshot_every = 2000;
  cfg.p_update = 0.4;
  cfg.p_comm = 0.3;
  cfg.delay_q = 0.8;  // unbounded tail
  const RunResult result = run(p, geom, consts, cfg);
  CHECK(result.messages_sent ==
        result.messages_delivered + result.messages_queued_at_end);
  CHECK(result.observer.t_min > 0);
  CHECK_FALSE(result.any_bound_violation);
  CHECK(result.final_distance_to_saddle < 0.01);
}

TEST_CASE("dual cadence outrunning the primal exchange starves adoption") {
  // Each dual block constrains only one primal block, so dual updates fire on
  // that block alone and every cross-agent message stays stamped behind. The
  // exchange starves: ops never completes a round, neighbor copies freeze,
  // and the bound simply never tightens (it is not violated).
  const ProblemSpec p = testing::starved_coupled_quadratic();
  const double delta = 0.1;
  const DualGeometry geom = make_dual_geometry(p, delta);
  const ProblemConstants consts = compute_constants(p, geom);
  SimulationConfig cfg;
  cfg.delta = delta;
  cfg.gamma = 0.1;
  cfg.rho = 0.09;
  cfg.seed = 7;
  cfg.max_ticks = 4000;
  cfg.snapshot_every = 200;
  cfg.p_update = 0.6;
  cfg.p_comm = 0.5;
  cfg.delay_q = 0.4;
  const RunResult result = run(p, geom, consts, cfg);
  CHECK(result.observer.ops == 0);
  CHECK(result.observer.k_min == 0);
  CHECK(result.discarded_messages > 100);
  CHECK(result.mixed_stamp_consumptions == 0);
  CHECK_FALSE(result.any_bound_violation);
}

TEST_CASE("primal contraction audit under a frozen dual") {
  const auto [net, p] = generate_benchmark(31, {});
  (void)net;
  const double delta = 0.1;
  const DualGeometry geom = make_dual_geometry(p, delta);
  const ProblemConstants consts = compute_constants(p, geom);
  SimulationConfig cfg;
  cfg.delta = delta;
  cfg.gamma = 0.01;
  cfg.rho = delta / (1.0 + delta * delta);
  cfg.seed = 5;
  cfg.max_ticks = 400;
  cfg.snapshot_every = 50;
  cfg.p_update = 0.6;
  cfg.p_comm = 0.7;
  cfg.freeze_dual = true;
  cfg.audit_contraction = true;
  const RunResult result = run(p, geom, consts, cfg);
  const double q_p = 1.0 - cfg.gamma * consts.beta;
  CHECK(result.contraction_checks >= 50);
  CHECK(result.worst_contraction_ratio <= q_p + 1e-9);
}

TEST_CASE("dual block rate inequality holds along a synchronous run") {
  const auto [net, p] = generate_benchmark(37, {});
  (void)net;
  const double delta = 0.1;
  const DualGeometry geom = make_dual_geometry(p, delta);
  const ProblemConstants consts = compute_constants(p, geom);
  SimulationConfig cfg;
  cfg.delta = delta;
  cfg.gamma = 0.01;
  cfg.rho = delta / (1.0 + delta * delta);
  cfg.max_ticks = 600;
  cfg.snapshot_every = 100;
  cfg.audit_dual_rate = true;
  const RunResult result = run(p, geom, consts, cfg);
  CHECK(result.dual_rate_checks > 0);
  CHECK(result.worst_dual_rate_slack >= -1e-9);
}

TEST_CASE("stop rule terminates converged runs early with Converged status") {
  const auto [net, p] = generate_benchmark(41, {BenchmarkScale::Small});
  (void)net;
  const double delta = 0.1;
  const DualGeometry geom = make_dual_geometry(p, delta);
  const ProblemConstants consts = compute_constants(p, geom);
  SimulationConfig cfg;
  cfg.delta = delta;
  cfg.gamma = 0.01;
  cfg.rho = delta / (1.0 + delta * delta);
  cfg.max_ticks = 300000;
  cfg.snapshot_every = 500;
  cfg.stop_tol = 1e-6;
  const RunResult result = run(p, geom, consts, cfg);
  CHECK(result.status == RunStatus::Converged);
  CHECK(result.ticks < cfg.max_ticks);
  CHECK(result.final_consecutive_distance < 1e-5);
}

TEST_CASE("a zero dual bound pins the dual and degenerates to projected gradient") {
  // Slater point already optimal over the box (f_star_lower = f(slater)), so
  // B = 0 and the constraint never acts: the loop minimizes f alone.
  ProblemSpec p = testing::one_dim_problem();
  p.f_star_lower = p.objective->value(p.slater_point);
  const double delta = 0.1;
  const DualGeometry geom = make_dual_geometry(p, delta);
  REQUIRE(geom.dual_bound == 0.0);
  const ProblemConstants consts = compute_constants(p, geom);
  SimulationConfig cfg = base_config(delta);
  cfg.gamma = 0.2;
  cfg.rho = 0.09;
  cfg.max_ticks = 400;
  cfg.oracle = false;
  const RunResult result = run(p, geom, consts, cfg);
  CHECK(result.final_mu[0] == 0.0);
  CHECK(result.final_x[0] == doctest::Approx(2.0).epsilon(1e-9));  // argmin f
}

TEST_CASE("x0 and mu0 overrides seed the run") {
  const ProblemSpec p = testing::one_dim_problem();
  const double delta = 0.1;
  const DualGeometry geom = make_dual_geometry(p, delta);
  const ProblemConstants consts = compute_constants(p, geom);
  SimulationConfig cfg = base_config(delta);
  cfg.max_ticks = 1;
  cfg.oracle = false;
  cfg.x0 = Eigen::VectorXd::Constant(1, 7.5);
  cfg.mu0 = Eigen::VectorXd::Constant(1, 0.25);
  const RunResult result = run(p, geom, consts, cfg);
  // One synchronous tick: x steps from the override with the override dual.
  const double expected = 7.5 - cfg.gamma * ((7.5 - 2.0) + 0.25);
  CHECK(result.final_x[0] == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("scripted schedule overrides the stochastic model") {
  const ProblemSpec p = testing::one_dim_problem();
  const double delta = 0.1;
  const DualGeometry geom = make_dual_geometry(p, delta);
  const ProblemConstants consts = compute_constants(p, geom);
  SimulationConfig cfg = base_config(delta);
  cfg.max_ticks = 20;

  SUBCASE("an idle primal agent never moves") {
    Schedule schedule;
    schedule.primal_active = [](std::int64_t, int) { return false; };
    const RunResult result = run(p, geom, consts, cfg, &schedule);
    CHECK(result.final_x[0] == 5.0);  // box midpoint
    CHECK(result.observer.t_min == 0);
  }
  SUBCASE("blocked transmissions starve the dual agent") {
    Schedule schedule;
    schedule.transmit = [](std::int64_t, const Message&) { return false; };
    const RunResult result = run(p, geom, consts, cfg, &schedule);
    CHECK(result.observer.t_min == 0);
    CHECK(result.messages_sent == 0);
  }
  SUBCASE("forced extra delay shifts deliveries") {
    Schedule schedule;
    schedule.extra_delay = [](std::int64_t, const Message&) { return 5; };
    const RunResult result = run(p, geom, consts, cfg, &schedule);
    CHECK(result.observer.t_min > 0);   // still progresses, just slower
    CHECK(result.messages_queued_at_end >= 0);
  }
}

TEST_CASE("config validation rejects bad stepsizes with the inequality text") {
  const ProblemSpec p = testing::one_dim_problem();
  const double delta = 0.1;
  const DualGeometry geom = make_dual_geometry(p, delta);
  const ProblemConstants consts = compute_constants(p, geom);
  SimulationConfig cfg = base_config(delta);

  SUBCASE("gamma above the bound") {
    cfg.gamma = consts.gamma_max * 1.01;
    CHECK_THROWS_WITH_AS(validate_config(p, geom, consts, cfg),
                         doctest::Contains("gamma"), ValidationError);
  }
  SUBCASE("rho above the dual limit") {
    cfg.rho = dual_step_limit(delta);
    CHECK_THROWS_WITH_AS(validate_config(p, geom, consts, cfg),
                         doctest::Contains("2*delta/(delta^2 + 2)"), ValidationError);
  }
  SUBCASE("delta must match the geometry") {
    cfg.delta = 0.2;
    CHECK_THROWS_AS(validate_config(p, geom, consts, cfg), ValidationError);
  }
  SUBCASE("probabilities must be in (0, 1]") {
    cfg.p_update = 0.0;
    CHECK_THROWS_AS(validate_config(p, geom, consts, cfg), ValidationError);
  }
  SUBCASE("x0 override must be feasible") {
    cfg.x0 = Eigen::VectorXd::Constant(1, 11.0);
    CHECK_THROWS_AS(validate_config(p, geom, consts, cfg), ValidationError);
  }
}

TEST_CASE("trace CSV shape") {
  const ProblemSpec p = testing::one_dim_problem();
  const double delta = 0.1;
  const DualGeometry geom = make_dual_geometry(p, delta);
  const ProblemConstants consts = compute_constants(p, geom);
  SimulationConfig cfg = base_config(delta);
  cfg.max_ticks = 10;
  const RunResult result = run(p, geom, consts, cfg);
  const std::string csv = trace_csv(result);
  CHECK(csv.rfind("tick,ops,T,K,stamp,discards,consec_dist,bound,bound_violated,"
                  "max_dist_sq,dist_sq_0,x_0\n",
                  0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 11);  // header + 10 rows

  const std::string summary = summary_json(cfg, result);
  CHECK(summary.find("\"status\"") != std::string::npos);
  CHECK(summary.find("\"config\"") != std::string::npos);
}
