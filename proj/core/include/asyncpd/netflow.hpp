#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "asyncpd/problem.hpp"
#include "asyncpd/simulator.hpp"

namespace asyncpd {

/// Path/edge routing benchmark: route traffic over fixed paths from a source
/// to a target subject to edge capacities, maximizing a log utility. Paths
/// and edges split into constraint-disjoint groups.
struct FlowNetwork {
  int num_paths = 0;   // n
  int num_edges = 0;   // m
  int num_groups = 0;
  double utility_weight = 0.0;  // W

  Eigen::MatrixXd incidence;   // binary, edge k x path i
  Eigen::VectorXd capacities;  // b
  std::vector<int> edge_group;
  std::vector<int> path_group;
};

enum class BenchmarkScale { Paper, Small, Custom };

struct BenchmarkOptions {
  BenchmarkScale scale = BenchmarkScale::Paper;
  double utility_weight = 30.25;  // beta = W / 121 = 0.25 by default
  bool grouped_partition = true;
  // Custom scale shape: groups x paths, each path with dedicated interior edges.
  int custom_groups = 1;
  int custom_paths_per_group = 3;
  int custom_interior_per_path = 1;
};

/// Seeded reproducible instance. Paper scale: 15 paths, 66 edges, 3 groups of
/// 5 paths and 22 edges; small: 3 paths, 6 edges, 1 group. Source- and
/// target-adjacent edges carry capacity 50, interior edges draw uniformly
/// from [5, 40]; path rates live in [0, 10].
std::pair<FlowNetwork, ProblemSpec> generate_benchmark(std::uint64_t seed,
                                                       const BenchmarkOptions& opts = {});

/// The optimization problem for a generated network at a given utility
/// weight: f(x) = -W sum log(1 + x_i), A x <= b, x in [0, 10]^n, Slater point
/// at the origin, f_star_lower = -W n log(11) (the exact box minimum).
ProblemSpec problem_from_network(const FlowNetwork& net, double utility_weight,
                                 bool grouped_partition);

enum class SweepKind { Blocks, Beta, CommRate };

struct SweepEntry {
  std::string label;
  ProblemSpec problem;
  SimulationConfig config;
};

/// Experiment batches: scalar-vs-grouped blocks at p_comm = 0.75 and
/// p_update = 0.5; the beta sweep {0.10, 0.25, 0.75} via utility-weight
/// scaling at p_comm = 0.75 and p_update = 1; the communication-rate sweep
/// {0.25, 0.5, 0.75, 1.0} at fixed beta and p_update = 1.
std::vector<SweepEntry> experiment_sweeps(const FlowNetwork& net,
                                          const SimulationConfig& base,
                                          SweepKind kind);

/// One row per edge: id, group, capacity, and the quoted path list.
void write_edge_list_csv(const std::string& path, const FlowNetwork& net);

}  // namespace asyncpd
