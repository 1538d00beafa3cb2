#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>

#include "asyncpd/problem.hpp"

namespace asyncpd {

/// A (possibly approximate) saddle point of L_delta over X x M.
struct SaddlePoint {
  Eigen::VectorXd x;
  Eigen::VectorXd mu;
  double residual = 0.0;  // sup-norm fixed-point residual of the update maps
  bool converged = false;
  std::int64_t iterations = 0;
};

/// Centralized alternating projected steps:
///   x <- Pi_X[x - gamma grad_x L_delta(x, mu)]
///   mu <- Pi_M[mu + rho (g(x_new) - delta mu)]
/// until the simultaneous fixed-point residual drops below tol. On iteration
/// exhaustion the best iterate is returned with converged = false.
SaddlePoint uzawa_solve(const ProblemSpec& p, const DualGeometry& geom, double gamma,
                        double rho, std::int64_t max_iters, double tol);

/// Fixed point of h(x) = Pi_X[x - gamma grad_x L_delta(x, mu)] for a fixed mu:
/// the minimizer of L_delta(., mu) over X.
Eigen::VectorXd fixed_mu_minimizer(const ProblemSpec& p, const DualGeometry& geom,
                                   const Eigen::VectorXd& mu, double tol,
                                   std::int64_t max_iters = 2000000);

/// High-accuracy saddle point (tol 1e-10) with conservative stepsizes.
SaddlePoint saddle_oracle(const ProblemSpec& p, const DualGeometry& geom,
                          const ProblemConstants& consts);

/// Independent cross-validation path: projected ascent on the regularized
/// dual function with an exact inner minimization per step.
SaddlePoint dual_ascent_solve(const ProblemSpec& p, const DualGeometry& geom,
                              const ProblemConstants& consts, double tol,
                              std::int64_t max_iters = 2000000);

/// Unregularized solution (delta = 0) by the same outer dual ascent; the dual
/// iterate stays confined to the Slater bound set M.
SaddlePoint solve_unregularized(const ProblemSpec& p, const ProblemConstants& consts,
                                double tol, std::int64_t max_iters = 2000000);

/// Comparison matrices of the fixed-mu update map: G flips off-diagonal signs
/// of |H|, F = I - gamma G, with their positivity certificates.
struct ContractionMatrices {
  Eigen::MatrixXd g;
  Eigen::MatrixXd f;
  bool gamma_small_enough = false;   // gamma * max row sum of |H| < 1
  bool g_positive_definite = false;  // Gershgorin: dominant + positive diagonal
  bool f_positive_definite = false;
  double max_f_row_sum = 0.0;
  std::string diagnostic;  // empty when all certificates hold
};

ContractionMatrices contraction_matrices(const ProblemSpec& p, const DualGeometry& geom,
                                         double gamma, const Eigen::VectorXd& x,
                                         const Eigen::VectorXd& mu);

/// Rate and penalty constants of the convergence bound.
struct RateConstants {
  double q_p = 0.0;  // 1 - gamma beta
  double q_d = 0.0;  // (1 - rho delta)^2 + 2 rho^2
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;  // asynchrony penalty
  Eigen::VectorXd e1, e2, e3;  // per dual block

  // context
  int n = 0;
  int num_dual_agents = 0;
  double beta = 0.0, gamma = 0.0, rho = 0.0, delta = 0.0;
  double lipschitz_global = 0.0;  // M
  double diameter = 0.0;          // D_x
};

RateConstants rate_constants(const ProblemSpec& p, const DualGeometry& geom,
                             const ProblemConstants& consts, double gamma, double rho);

/// q_p^(2 ops) 2 n X0^2 + q_d^T (2 M^2 / beta^2) mu0_dist_sq
///   + q_p^(2K) C1 + q_p^K C2 + C3,
/// where X0 = x0_dist_inf when positive (measured initial deviation),
/// otherwise the worst-case D_x.
double convergence_bound(const RateConstants& rc, std::int64_t ops, std::int64_t t_min,
                     std::int64_t k_min, double mu0_dist_sq, double x0_dist_inf = -1.0);

struct RegularizationBounds {
  double solution_gap_sq = 0.0;          // (delta/beta) B^2
  Eigen::VectorXd constraint_violation;  // M_j B sqrt(delta/beta), per row
};

RegularizationBounds regularization_error_bounds(const ProblemSpec& p,
                                                 const DualGeometry& geom,
                                                 const ProblemConstants& consts);

/// Largest delta for which the self-consistent constraint tightening below
/// stays strictly feasible at the Slater point.
double max_tightening_delta(const ProblemSpec& p, const ProblemConstants& consts);

/// Shifted problem requiring g_j(x) <= -c_j with c_j = M_j B~ sqrt(delta/beta),
/// B~ the tightened problem's own dual bound (solved by fixed point). Solving
/// the result at this delta yields a point feasible for the original g.
/// Throws InfeasibleParameterError (with the largest feasible delta) when the
/// Slater point cannot absorb the shift.
ProblemSpec tighten_constraints(const ProblemSpec& p, const DualGeometry& geom,
                                const ProblemConstants& consts);

struct ParameterRecipe {
  std::int64_t k_min = 0;
  std::int64_t t_min = 0;
  double rho = 0.0;
  double delta = 0.0;
  double mu0_dist_sq = 0.0;   // ||mu(0) - mu_hat_delta||^2 used for t_min
  bool mu0_from_oracle = true;  // false: diameter fallback (2B)^2
  double round_trip_bound = 0.0;  // convergence_bound at the returned parameters
};

/// Parameter recipes meeting ||x^i - x_hat_delta||^2 <= eps1 + eps2:
/// the smallest admissible delta (bisection over (0, 10], clamped below at
/// 0.05 to keep T(t) practical), rho = delta/(1+delta^2), and the K(t), T(t)
/// floors. gamma < gamma_max must be supplied (<= 0 picks gamma_max/2).
/// Throws InfeasibleParameterError with the achievable eps2 frontier when no
/// delta in range satisfies the coupled inequality.
ParameterRecipe parameter_recipe(const ProblemSpec& p, const DualGeometry& geom,
                                         const ProblemConstants& consts, double eps1,
                                         double eps2, double gamma = -1.0,
                                         bool use_oracle_mu = true);

}  // namespace asyncpd
