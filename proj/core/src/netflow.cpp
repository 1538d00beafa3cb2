#include "asyncpd/netflow.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "asyncpd/errors.hpp"

namespace asyncpd {
namespace {

constexpr double kEndpointCapacity = 50.0;
constexpr double kInteriorCapacityLo = 5.0;
constexpr double kInteriorCapacityHi = 40.0;
constexpr double kRateUpper = 10.0;

struct Shape {
  int groups = 0;
  int paths_per_group = 0;
  int interior_per_path = 0;
  bool shared_mid = false;  // one extra edge shared by all paths of a group
};

Shape shape_for(const BenchmarkOptions& opts) {
  switch (opts.scale) {
    case BenchmarkScale::Paper:
      // 3 groups x (1 source + 5*4 interior + 1 target) = 66 edges, 15 paths.
      return {3, 5, 4, false};
    case BenchmarkScale::Small:
      // 1 group x (source + 3 dedicated + 1 shared mid + target) = 6 edges.
      return {1, 3, 1, true};
    case BenchmarkScale::Custom:
      return {opts.custom_groups, opts.custom_paths_per_group,
              opts.custom_interior_per_path, false};
  }
  throw ValidationError("unknown benchmark scale");
}

}  // namespace

std::pair<FlowNetwork, ProblemSpec> generate_benchmark(std::uint64_t seed,
                                                       const BenchmarkOptions& opts) {
  const Shape shape = shape_for(opts);
  if (shape.groups < 1 || shape.paths_per_group < 1 || shape.interior_per_path < 1)
    throw ValidationError("benchmark shape must be positive in every dimension");

  FlowNetwork net;
  net.num_groups = shape.groups;
  net.num_paths = shape.groups * shape.paths_per_group;
  const int edges_per_group = 2 + shape.paths_per_group * shape.interior_per_path +
                              (shape.shared_mid ? 1 : 0);
  net.num_edges = shape.groups * edges_per_group;
  net.utility_weight = opts.utility_weight;
  net.incidence = Eigen::MatrixXd::Zero(net.num_edges, net.num_paths);
  net.capacities.resize(net.num_edges);
  net.edge_group.resize(net.num_edges);
  net.path_group.resize(net.num_paths);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> cap(kInteriorCapacityLo, kInteriorCapacityHi);

  int edge = 0;
  for (int g = 0; g < shape.groups; ++g) {
    const int first_path = g * shape.paths_per_group;
    for (int q = 0; q < shape.paths_per_group; ++q)
      net.path_group[first_path + q] = g;

    // Source-adjacent edge, traversed by every path of the group.
    net.capacities[edge] = kEndpointCapacity;
    net.edge_group[edge] = g;
    for (int q = 0; q < shape.paths_per_group; ++q)
      net.incidence(edge, first_path + q) = 1.0;
    ++edge;

    // Dedicated interior chain per path.
    for (int q = 0; q < shape.paths_per_group; ++q) {
      for (int r = 0; r < shape.interior_per_path; ++r) {
        net.capacities[edge] = cap(rng);
        net.edge_group[edge] = g;
        net.incidence(edge, first_path + q) = 1.0;
        ++edge;
      }
    }

    if (shape.shared_mid) {
      net.capacities[edge] = cap(rng);
      net.edge_group[edge] = g;
      for (int q = 0; q < shape.paths_per_group; ++q)
        net.incidence(edge, first_path + q) = 1.0;
      ++edge;
    }

    // Target-adjacent edge.
    net.capacities[edge] = kEndpointCapacity;
    net.edge_group[edge] = g;
    for (int q = 0; q < shape.paths_per_group; ++q)
      net.incidence(edge, first_path + q) = 1.0;
    ++edge;
  }

  return {net, problem_from_network(net, opts.utility_weight, opts.grouped_partition)};
}

ProblemSpec problem_from_network(const FlowNetwork& net, double utility_weight,
                                 bool grouped_partition) {
  ProblemSpec p;
  p.n = net.num_paths;
  p.m = net.num_edges;
  p.objective = std::make_shared<LogUtilityObjective>(utility_weight, p.n);
  p.constraints = std::make_shared<AffineConstraints>(net.incidence, net.capacities);
  p.box_lower = Eigen::VectorXd::Zero(p.n);
  p.box_upper = Eigen::VectorXd::Constant(p.n, kRateUpper);
  p.slater_point = Eigen::VectorXd::Zero(p.n);
  p.f_star_lower = -utility_weight * p.n * std::log(1.0 + kRateUpper);

  if (grouped_partition) {
    std::vector<int> path_sizes(net.num_groups, 0);
    std::vector<int> edge_sizes(net.num_groups, 0);
    for (int g : net.path_group) ++path_sizes[g];
    for (int g : net.edge_group) ++edge_sizes[g];
    p.primal_partition = Partition(path_sizes);
    p.dual_partition = Partition(edge_sizes);
  } else {
    p.primal_partition = Partition::scalar(p.n);
    p.dual_partition = Partition::scalar(p.m);
  }
  validate(p);
  return p;
}

std::vector<SweepEntry> experiment_sweeps(const FlowNetwork& net,
                                          const SimulationConfig& base,
                                          SweepKind kind) {
  std::vector<SweepEntry> entries;
  auto with = [&](double p_comm, double p_update) {
    SimulationConfig cfg = base;
    cfg.p_comm = p_comm;
    cfg.p_update = p_update;
    return cfg;
  };

  switch (kind) {
    case SweepKind::Blocks: {
      SweepEntry scalar{"scalar", problem_from_network(net, net.utility_weight, false),
                        with(0.75, 0.5)};
      SweepEntry grouped{"grouped", problem_from_network(net, net.utility_weight, true),
                         with(0.75, 0.5)};
      entries.push_back(std::move(scalar));
      entries.push_back(std::move(grouped));
      break;
    }
    case SweepKind::Beta: {
      for (double beta : {0.10, 0.25, 0.75}) {
        const double weight = beta * 121.0;  // beta = W / 11^2
        char label[32];
        std::snprintf(label, sizeof(label), "beta=%.2f", beta);
        entries.push_back(
            {label, problem_from_network(net, weight, true), with(0.75, 1.0)});
      }
      break;
    }
    case SweepKind::CommRate: {
      for (double rate : {0.25, 0.5, 0.75, 1.0}) {
        char label[32];
        std::snprintf(label, sizeof(label), "comm=%.2f", rate);
        entries.push_back(
            {label, problem_from_network(net, net.utility_weight, true),
             with(rate, 1.0)});
      }
      break;
    }
  }
  return entries;
}

void write_edge_list_csv(const std::string& path, const FlowNetwork& net) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open " + path + " for writing");
  out << "edge,group,capacity,paths\n";
  char buf[64];
  for (int k = 0; k < net.num_edges; ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g", net.capacities[k]);
    out << k << ',' << net.edge_group[k] << ',' << buf << ",\"";
    bool first = true;
    for (int i = 0; i < net.num_paths; ++i) {
      if (net.incidence(k, i) != 0.0) {
        if (!first) out << ';';
        out << i;
        first = false;
      }
    }
    out << "\"\n";
  }
}

}  // namespace asyncpd
