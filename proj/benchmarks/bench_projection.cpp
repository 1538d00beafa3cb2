#include <benchmark/benchmark.h>

#include <random>

#include "asyncpd/projection.hpp"

namespace {

static void BM_ProjectNonnegL1(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  asyncpd::NonnegL1Ball set{1.0, dim};
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = unif(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(asyncpd::project_nonneg_l1(set, v));
  }
  state.SetItemsProcessed(state.iterations() * dim);
}
BENCHMARK(BM_ProjectNonnegL1)->Arg(8)->Arg(66)->Arg(512);

static void BM_ProjectBox(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  asyncpd::BoxSet box{Eigen::VectorXd::Constant(dim, 0.0),
                      Eigen::VectorXd::Constant(dim, 10.0)};
  Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(dim, -5.0, 15.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(asyncpd::project_box(box, v));
  }
  state.SetItemsProcessed(state.iterations() * dim);
}
BENCHMARK(BM_ProjectBox)->Arg(15)->Arg(512);

}  // namespace
