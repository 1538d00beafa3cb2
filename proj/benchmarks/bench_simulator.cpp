#include <benchmark/benchmark.h>

#include "asyncpd/netflow.hpp"
#include "asyncpd/simulator.hpp"

namespace {

asyncpd::SimulationConfig tick_config(bool grouped) {
  asyncpd::SimulationConfig cfg;
  cfg.delta = 0.1;
  cfg.gamma = 0.01;
  cfg.rho = cfg.delta / (1.0 + cfg.delta * cfg.delta);
  cfg.p_update = grouped ? 0.5 : 1.0;
  cfg.p_comm = 0.75;
  cfg.max_ticks = 500;
  cfg.snapshot_every = 100000;
  cfg.oracle = false;
  return cfg;
}

static void BM_SimulatorTicksGrouped(benchmark::State& state) {
  const auto [net, p] = asyncpd::generate_benchmark(1, {});
  (void)net;
  const asyncpd::DualGeometry geom = asyncpd::make_dual_geometry(p, 0.1);
  const asyncpd::ProblemConstants consts = asyncpd::compute_constants(p, geom);
  asyncpd::SimulationConfig cfg = tick_config(true);
  for (auto _ : state) {
    benchmark::DoNotOptimize(asyncpd::run(p, geom, consts, cfg));
  }
  state.SetItemsProcessed(state.iterations() * cfg.max_ticks);
}
BENCHMARK(BM_SimulatorTicksGrouped)->Unit(benchmark::kMillisecond);

static void BM_SimulatorTicksScalar(benchmark::State& state) {
  const auto [net, paper] = asyncpd::generate_benchmark(1, {});
  const asyncpd::ProblemSpec p =
      asyncpd::problem_from_network(net, net.utility_weight, false);
  (void)paper;
  const asyncpd::DualGeometry geom = asyncpd::make_dual_geometry(p, 0.1);
  const asyncpd::ProblemConstants consts = asyncpd::compute_constants(p, geom);
  asyncpd::SimulationConfig cfg = tick_config(false);
  for (auto _ : state) {
    benchmark::DoNotOptimize(asyncpd::run(p, geom, consts, cfg));
  }
  state.SetItemsProcessed(state.iterations() * cfg.max_ticks);
}
BENCHMARK(BM_SimulatorTicksScalar)->Unit(benchmark::kMillisecond);

}  // namespace
