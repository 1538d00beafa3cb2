#include <benchmark/benchmark.h>

#include "asyncpd/agents.hpp"
#include "asyncpd/netflow.hpp"
#include "asyncpd/reference.hpp"

namespace {

static void BM_BlockGradient(benchmark::State& state) {
  const auto [net, p] = asyncpd::generate_benchmark(1, {});
  (void)net;
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(p.n, 4.0);
  const Eigen::VectorXd mu = Eigen::VectorXd::Constant(p.m, 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(asyncpd::partial_grad_x(p, 0, x, mu));
  }
}
BENCHMARK(BM_BlockGradient);

static void BM_UzawaSolve(benchmark::State& state) {
  const auto [net, p] =
      asyncpd::generate_benchmark(1, {asyncpd::BenchmarkScale::Small});
  (void)net;
  const asyncpd::DualGeometry geom = asyncpd::make_dual_geometry(p, 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        asyncpd::uzawa_solve(p, geom, 0.02, 0.09, 200000, 1e-8));
  }
}
BENCHMARK(BM_UzawaSolve);

}  // namespace
