#pragma once

#include <Eigen/Core>

namespace asyncpd {

/// Axis-aligned box { v : lower <= v <= upper }.
struct BoxSet {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  int dim() const { return static_cast<int>(lower.size()); }
  bool contains(const Eigen::VectorXd& v, double tol = 0.0) const;
};

/// Nonnegative orthant intersected with the l1 ball of the given radius:
/// { v >= 0 : sum(v) <= radius }.
struct NonnegL1Ball {
  double radius = 0.0;
  int dim = 0;

  bool contains(const Eigen::VectorXd& v, double tol = 0.0) const;
};

/// Componentwise clamp; the Euclidean projection onto a box.
Eigen::VectorXd project_box(const BoxSet& set, const Eigen::VectorXd& v);

/// Exact Euclidean projection onto {v >= 0, ||v||_1 <= radius}. Negative
/// coordinates clip to zero; if the clipped point exceeds the l1 budget, a
/// sort-based water-filling threshold shifts it so the result sums to radius.
Eigen::VectorXd project_nonneg_l1(const NonnegL1Ball& set, const Eigen::VectorXd& v);

}  // namespace asyncpd
