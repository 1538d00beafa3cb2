#pragma once

// Shared problem builders and brute-force oracles for the test suites.

#include <Eigen/Core>
#include <cmath>
#include <memory>
#include <random>

#include "asyncpd/problem.hpp"
#include "asyncpd/projection.hpp"

namespace asyncpd::testing {

/// f(x) = 1/2 (x - 2)^2, g(x) = x - 1, X = [0, 10], Slater point 0.
/// Closed-form regularized saddle: mu = 1/(1 + delta), x = (1 + 2 delta)/(1 + delta).
inline ProblemSpec one_dim_problem() {
  ProblemSpec p;
  p.n = 1;
  p.m = 1;
  p.objective = std::make_shared<QuadraticObjective>(
      Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Constant(1, -2.0), 2.0);
  p.constraints = std::make_shared<AffineConstraints>(
      Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Constant(1, 1.0));
  p.box_lower = Eigen::VectorXd::Constant(1, 0.0);
  p.box_upper = Eigen::VectorXd::Constant(1, 10.0);
  p.slater_point = Eigen::VectorXd::Constant(1, 0.0);
  p.f_star_lower = 0.0;  // f >= 0
  p.primal_partition = Partition::scalar(1);
  p.dual_partition = Partition::scalar(1);
  return p;
}

inline double one_dim_mu_hat(double delta) { return 1.0 / (1.0 + delta); }
inline double one_dim_x_hat(double delta) {
  return (1.0 + 2.0 * delta) / (1.0 + delta);
}

/// Two primal blocks of two coordinates coupled through the objective, with
/// both dual blocks constrained by both primal blocks so the freshness gate
/// throttles dual updates to full primal rounds. Exercises primal-to-primal
/// channels, stamp matching, and transient discards.
inline ProblemSpec coupled_quadratic() {
  Eigen::MatrixXd q(4, 4);
  q << 2.0, 0.5, 0.3, 0.0,  //
      0.5, 2.0, 0.0, 0.0,   //
      0.3, 0.0, 2.0, 0.5,   //
      0.0, 0.0, 0.5, 2.0;
  Eigen::VectorXd c = Eigen::VectorXd::Constant(4, -3.0);
  Eigen::MatrixXd a(2, 4);
  a << 1.0, 1.0, 0.5, 0.0,  //
      0.0, 0.5, 1.0, 1.0;
  Eigen::VectorXd b = Eigen::VectorXd::Constant(2, 1.0);

  ProblemSpec p;
  p.n = 4;
  p.m = 2;
  p.objective = std::make_shared<QuadraticObjective>(q, c);
  p.constraints = std::make_shared<AffineConstraints>(a, b);
  p.box_lower = Eigen::VectorXd::Constant(4, -5.0);
  p.box_upper = Eigen::VectorXd::Constant(4, 5.0);
  p.slater_point = Eigen::VectorXd::Zero(4);
  p.f_star_lower = -60.0;  // f = x'Qx/2 - 3 sum(x) >= -60 on the box
  p.primal_partition = Partition({2, 2});
  p.dual_partition = Partition({1, 1});
  return p;
}

/// Variant with heterogeneous dual relevance: each dual block constrains only
/// one primal block while the objective couples the blocks. Dual updates then
/// outpace the primal exchange so the strict discard rule starves adoption;
/// used to pin down that regime (ops stays 0, the bound never tightens).
inline ProblemSpec starved_coupled_quadratic() {
  ProblemSpec p = coupled_quadratic();
  Eigen::MatrixXd a(2, 4);
  a << 1.0, 1.0, 0.0, 0.0,  //
      0.0, 0.0, 1.0, 1.0;
  p.constraints =
      std::make_shared<AffineConstraints>(a, Eigen::VectorXd::Constant(2, 1.0));
  return p;
}

/// Acceptance-oracle quadratic: f = 1/2 ||x - (2,1)||^2, g = x1 + x2 - 1,
/// X = [-5,5]^2. Regularized saddle solved by hand from the stationarity
/// system: mu = 2/(2 + delta), x = (2 - mu, 1 - mu).
inline ProblemSpec two_var_quadratic() {
  ProblemSpec p;
  p.n = 2;
  p.m = 1;
  Eigen::VectorXd c(2);
  c << -2.0, -1.0;
  p.objective = std::make_shared<QuadraticObjective>(Eigen::MatrixXd::Identity(2, 2), c,
                                                     2.5);
  Eigen::MatrixXd a(1, 2);
  a << 1.0, 1.0;
  p.constraints =
      std::make_shared<AffineConstraints>(a, Eigen::VectorXd::Constant(1, 1.0));
  p.box_lower = Eigen::VectorXd::Constant(2, -5.0);
  p.box_upper = Eigen::VectorXd::Constant(2, 5.0);
  p.slater_point = Eigen::VectorXd::Zero(2);
  p.f_star_lower = 0.0;
  p.primal_partition = Partition::scalar(2);
  p.dual_partition = Partition::scalar(1);
  return p;
}

inline double two_var_mu_hat(double delta) { return 2.0 / (2.0 + delta); }
inline Eigen::Vector2d two_var_x_hat(double delta) {
  const double mu = two_var_mu_hat(delta);
  return {2.0 - mu, 1.0 - mu};
}

/// Brute-force projection oracle: coarse-to-fine grid minimization of
/// ||v - candidate|| over {candidate >= 0, sum <= radius}. Valid because the
/// objective is strictly convex, so the optimum lies near the coarse argmin.
inline Eigen::VectorXd brute_force_nonneg_l1(const Eigen::VectorXd& v, double radius,
                                             double step) {
  const int d = static_cast<int>(v.size());
  const double coarse = 16.0 * step;

  auto search = [&](const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                    double s) -> Eigen::VectorXd {
    Eigen::VectorXi counts(d);
    for (int i = 0; i < d; ++i)
      counts[i] = static_cast<int>(std::floor((hi[i] - lo[i]) / s)) + 1;
    Eigen::VectorXi idx = Eigen::VectorXi::Zero(d);
    Eigen::VectorXd best;
    double best_dist = std::numeric_limits<double>::infinity();
    Eigen::VectorXd cand(d);
    while (true) {
      double sum = 0.0;
      for (int i = 0; i < d; ++i) {
        cand[i] = lo[i] + s * idx[i];
        sum += cand[i];
      }
      if (sum <= radius + 1e-12) {
        const double dist = (cand - v).squaredNorm();
        if (dist < best_dist) {
          best_dist = dist;
          best = cand;
        }
      }
      int axis = 0;
      while (axis < d && ++idx[axis] == counts[axis]) idx[axis++] = 0;
      if (axis == d) break;
    }
    return best;
  };

  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(d);
  const Eigen::VectorXd top = Eigen::VectorXd::Constant(d, radius);
  const Eigen::VectorXd rough = search(zero, top, coarse);
  Eigen::VectorXd lo = (rough.array() - 2.0 * coarse).cwiseMax(0.0);
  Eigen::VectorXd hi = (rough.array() + 2.0 * coarse).cwiseMin(radius);
  return search(lo, hi, step);
}

}  // namespace asyncpd::testing
