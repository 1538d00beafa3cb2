#pragma once

#include <Eigen/Core>
#include <memory>
#include <vector>

#include "asyncpd/models.hpp"
#include "asyncpd/partition.hpp"
#include "asyncpd/projection.hpp"

namespace asyncpd {

/// A constrained convex program over a compact box, together with the block
/// partitions assigning primal and dual coordinates to agents:
///
///   minimize f(x)  subject to  g(x) <= 0,  x in X = prod_i X_i,
///
/// with a strictly feasible point certifying g(slater_point) < 0.
struct ProblemSpec {
  int n = 0;  // primal dimension
  int m = 0;  // constraint dimension

  std::shared_ptr<const Objective> objective;
  std::shared_ptr<const ConstraintMap> constraints;  // may be null iff m == 0

  Eigen::VectorXd box_lower;
  Eigen::VectorXd box_upper;
  Eigen::VectorXd slater_point;
  /// Any lower bound on min_{x in X} f(x); 0 is valid when f is nonnegative.
  double f_star_lower = 0.0;

  Partition primal_partition;
  Partition dual_partition;

  BoxSet box() const { return {box_lower, box_upper}; }
  BoxSet block_box(int i) const;
};

/// Throws ValidationError if any structural invariant fails: finite box with
/// lower < upper, slater_point strictly feasible, partitions covering the
/// index ranges, f(slater_point) >= f_star_lower.
void validate(const ProblemSpec& p);

/// Dual feasible geometry: regularization weight and the l1 bound confining
/// dual blocks to M_c = { v >= 0 : ||v||_1 <= B }.
struct DualGeometry {
  double delta = 0.0;
  double dual_bound = 0.0;  // B
  std::vector<NonnegL1Ball> block_sets;

  /// The full dual set over all m coordinates (same radius).
  NonnegL1Ball full_set(int m) const { return {dual_bound, m}; }
};

/// B = (f(slater) - f_star_lower) / min_j(-g_j(slater)); 0 when m == 0.
/// Throws ValidationError when the Slater margin is not positive.
double compute_dual_bound(const ProblemSpec& p);

DualGeometry make_dual_geometry(const ProblemSpec& p, double delta);

/// Problem-derived constants used by stepsize rules and the rate bounds.
struct ProblemConstants {
  double beta = 0.0;       // diagonal-dominance margin of H over X x M
  double gamma_max = 0.0;  // strict upper bound for the primal stepsize
  double lipschitz_global = 0.0;           // M = max_X ||grad g|| (Frobenius)
  Eigen::VectorXd lipschitz_per_constraint;  // M_j, per row
  Eigen::VectorXd lipschitz_per_block;       // M_[c], per dual block
  double diameter = 0.0;  // D_x = ||upper - lower||
};

struct DiameterLipschitz {
  double diameter = 0.0;
  double lipschitz_global = 0.0;
  Eigen::VectorXd per_constraint;
  Eigen::VectorXd per_block;
};

/// D_x exact for boxes; gradient norms exact for affine g (constant Jacobian),
/// grid-estimated with a 1.1 inflation factor otherwise.
DiameterLipschitz compute_diameter_and_lipschitz(const ProblemSpec& p);

/// 1 / max_i max_{x in X} max_{mu in M} sum_j |H_ij(x, mu)|, evaluated in
/// closed form for constant or separable-diagonal Hessians with affine
/// constraints, and on a deterministic grid times the vertices of M with a
/// 0.9 safety factor otherwise.
double compute_gamma_bound(const ProblemSpec& p, const DualGeometry& geom);

/// min over the evaluation set of (|H_ii| - sum_{j != i} |H_ij|); throws
/// ValidationError when the margin is not positive (the problem would need a
/// primal regularization, which this library does not provide).
double compute_beta(const ProblemSpec& p, const DualGeometry& geom);

ProblemConstants compute_constants(const ProblemSpec& p, const DualGeometry& geom);

// ---------------------------------------------------------------------------
// Regularized Lagrangian: L_delta(x, mu) = f(x) + mu'g(x) - (delta/2)||mu||^2.

/// Throws ValidationError when x is outside X or mu outside M (tol 1e-9).
double eval_lagrangian(const ProblemSpec& p, const DualGeometry& geom,
                       const Eigen::VectorXd& x, const Eigen::VectorXd& mu);

/// grad_x L = grad f(x) + (dg/dx)' mu.
Eigen::VectorXd grad_x(const ProblemSpec& p, const DualGeometry& geom,
                       const Eigen::VectorXd& x, const Eigen::VectorXd& mu);

/// grad_mu L = g(x) - delta * mu.
Eigen::VectorXd grad_mu(const ProblemSpec& p, const DualGeometry& geom,
                        const Eigen::VectorXd& x, const Eigen::VectorXd& mu);

/// H(x, mu) = hess f(x) + sum_j mu_j hess g_j(x).
Eigen::MatrixXd lagrangian_hessian(const ProblemSpec& p, const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& mu);

// ---------------------------------------------------------------------------
// Structure-derived topology.

/// result[i] lists primal blocks j != i whose variables enter block i's
/// partial gradient (essential neighbors N_i).
std::vector<std::vector<int>> essential_neighbors(const ProblemSpec& p);

/// result[c] lists the primal blocks structurally present in g_[c].
std::vector<std::vector<int>> constrained_primal_blocks(const ProblemSpec& p);

/// result[i] lists the dual blocks c whose g_[c] constrains block i.
std::vector<std::vector<int>> relevant_dual_blocks(const ProblemSpec& p);

}  // namespace asyncpd
