#include "asyncpd/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "asyncpd/errors.hpp"

namespace asyncpd {
namespace {

Eigen::VectorXd primal_step(const ProblemSpec& p, double gamma,
                            const Eigen::VectorXd& x, const Eigen::VectorXd& mu) {
  Eigen::VectorXd g = p.objective->gradient(x);
  if (p.m > 0) g += p.constraints->jacobian(x).transpose() * mu;
  return project_box(p.box(), x - gamma * g);
}

Eigen::VectorXd dual_step(const ProblemSpec& p, const DualGeometry& geom, double rho,
                          const Eigen::VectorXd& x, const Eigen::VectorXd& mu) {
  if (p.m == 0) return mu;
  const Eigen::VectorXd grad = p.constraints->value(x) - geom.delta * mu;
  return project_nonneg_l1(geom.full_set(p.m), mu + rho * grad);
}

double fixed_point_residual(const ProblemSpec& p, const DualGeometry& geom,
                            double gamma, double rho, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& mu) {
  double res = (x - primal_step(p, gamma, x, mu)).lpNorm<Eigen::Infinity>();
  if (p.m > 0)
    res = std::max(res, (mu - dual_step(p, geom, rho, x, mu)).lpNorm<Eigen::Infinity>());
  return res;
}

Eigen::VectorXd box_midpoint(const ProblemSpec& p) {
  return 0.5 * (p.box_lower + p.box_upper);
}

}  // namespace

SaddlePoint uzawa_solve(const ProblemSpec& p, const DualGeometry& geom, double gamma,
                        double rho, std::int64_t max_iters, double tol) {
  if (gamma <= 0.0) throw ValidationError("uzawa_solve: gamma must be positive");
  if (p.m > 0 && (rho <= 0.0 || rho >= 2.0 * geom.delta / (geom.delta * geom.delta + 2.0)))
    throw ValidationError(
        "uzawa_solve: rho must satisfy 0 < rho < 2*delta/(delta^2 + 2)");

  SaddlePoint sp;
  sp.x = box_midpoint(p);
  sp.mu = Eigen::VectorXd::Zero(p.m);
  for (std::int64_t k = 0; k < max_iters; ++k) {
    sp.x = primal_step(p, gamma, sp.x, sp.mu);
    sp.mu = dual_step(p, geom, rho, sp.x, sp.mu);
    sp.iterations = k + 1;
    sp.residual = fixed_point_residual(p, geom, gamma, rho, sp.x, sp.mu);
    if (sp.residual <= tol) {
      sp.converged = true;
      break;
    }
  }
  return sp;
}

Eigen::VectorXd fixed_mu_minimizer(const ProblemSpec& p, const DualGeometry& geom,
                                   const Eigen::VectorXd& mu, double tol,
                                   std::int64_t max_iters) {
  const double gamma = 0.9 * compute_gamma_bound(p, geom);
  Eigen::VectorXd x = box_midpoint(p);
  for (std::int64_t k = 0; k < max_iters; ++k) {
    const Eigen::VectorXd next = primal_step(p, gamma, x, mu);
    const double res = (next - x).lpNorm<Eigen::Infinity>();
    x = next;
    if (res <= tol) return x;
  }
  return x;
}

SaddlePoint saddle_oracle(const ProblemSpec& p, const DualGeometry& geom,
                          const ProblemConstants& consts) {
  const double gamma = 0.9 * consts.gamma_max;
  const double rho = 0.9 * 2.0 * geom.delta / (geom.delta * geom.delta + 2.0);
  return uzawa_solve(p, geom, gamma, rho, 4000000, 1e-10);
}

namespace {

/// Projected gradient ascent on d(mu) = min_x L(x, mu) with exact inner
/// minimization and warm starts; delta = 0 gives the unregularized problem.
SaddlePoint outer_dual_ascent(const ProblemSpec& p, double delta, double dual_bound,
                              const ProblemConstants& consts, double tol,
                              std::int64_t max_iters) {
  SaddlePoint sp;
  if (p.m == 0) {
    DualGeometry geom{1.0, 0.0, {}};
    sp.x = fixed_mu_minimizer(p, geom, Eigen::VectorXd(0), tol);
    sp.mu = Eigen::VectorXd(0);
    sp.converged = true;
    return sp;
  }

  // Inner solves need only gamma, which is delta-free; reuse a unit geometry.
  DualGeometry inner_geom{1.0, dual_bound, {}};
  const double lips = consts.lipschitz_global * consts.lipschitz_global / consts.beta +
                      delta;
  const double step = 1.0 / lips;
  const NonnegL1Ball dual_set{dual_bound, p.m};
  const double inner_tol = std::min(tol, 1e-11);

  sp.mu = Eigen::VectorXd::Zero(p.m);
  const double gamma = 0.9 * compute_gamma_bound(p, inner_geom);
  sp.x = box_midpoint(p);
  for (std::int64_t k = 0; k < max_iters; ++k) {
    // warm-started inner fixed point
    for (std::int64_t inner = 0; inner < 1000000; ++inner) {
      Eigen::VectorXd g = p.objective->gradient(sp.x);
      g += p.constraints->jacobian(sp.x).transpose() * sp.mu;
      const Eigen::VectorXd next = project_box(p.box(), sp.x - gamma * g);
      const double res = (next - sp.x).lpNorm<Eigen::Infinity>();
      sp.x = next;
      if (res <= inner_tol) break;
    }
    const Eigen::VectorXd grad = p.constraints->value(sp.x) - delta * sp.mu;
    const Eigen::VectorXd next_mu = project_nonneg_l1(dual_set, sp.mu + step * grad);
    sp.residual = (next_mu - sp.mu).lpNorm<Eigen::Infinity>();
    sp.mu = next_mu;
    sp.iterations = k + 1;
    if (sp.residual <= tol) {
      sp.converged = true;
      break;
    }
  }
  // final inner polish at the settled dual iterate
  for (std::int64_t inner = 0; inner < 1000000; ++inner) {
    Eigen::VectorXd g = p.objective->gradient(sp.x);
    g += p.constraints->jacobian(sp.x).transpose() * sp.mu;
    const Eigen::VectorXd next = project_box(p.box(), sp.x - gamma * g);
    const double res = (next - sp.x).lpNorm<Eigen::Infinity>();
    sp.x = next;
    if (res <= inner_tol) break;
  }
  return sp;
}

}  // namespace

SaddlePoint dual_ascent_solve(const ProblemSpec& p, const DualGeometry& geom,
                              const ProblemConstants& consts, double tol,
                              std::int64_t max_iters) {
  return outer_dual_ascent(p, geom.delta, geom.dual_bound, consts, tol, max_iters);
}

SaddlePoint solve_unregularized(const ProblemSpec& p, const ProblemConstants& consts,
                                double tol, std::int64_t max_iters) {
  return outer_dual_ascent(p, 0.0, compute_dual_bound(p), consts, tol, max_iters);
}

ContractionMatrices contraction_matrices(const ProblemSpec& p, const DualGeometry& geom,
                                         double gamma, const Eigen::VectorXd& x,
                                         const Eigen::VectorXd& mu) {
  (void)geom;
  const Eigen::MatrixXd h = lagrangian_hessian(p, x, mu);
  const int n = p.n;
  ContractionMatrices out;
  out.g.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      out.g(i, j) = (i == j) ? std::abs(h(i, j)) : -std::abs(h(i, j));
  }
  out.f = Eigen::MatrixXd::Identity(n, n) - gamma * out.g;

  out.gamma_small_enough = true;
  out.g_positive_definite = true;
  out.f_positive_definite = true;
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j != i) off += std::abs(h(i, j));
    }
    const double row_sum = std::abs(h(i, i)) + off;
    if (gamma * row_sum >= 1.0) out.gamma_small_enough = false;
    if (std::abs(h(i, i)) <= off) out.g_positive_definite = false;
    // F's diagonal dominance reduces to gamma * row_sum < 1.
    if (out.f(i, i) <= 0.0 || gamma * row_sum >= 1.0) out.f_positive_definite = false;
    double f_row = 0.0;
    for (int j = 0; j < n; ++j) f_row += out.f(i, j);
    out.max_f_row_sum = std::max(out.max_f_row_sum, f_row);
  }
  if (!out.gamma_small_enough)
    out.diagnostic = "(i) gamma * max row sum of |H| must be < 1";
  else if (!out.g_positive_definite)
    out.diagnostic = "(ii) G is not strictly diagonally dominant with positive diagonal";
  else if (!out.f_positive_definite)
    out.diagnostic = "(iii) F is not positive definite";
  return out;
}

RateConstants rate_constants(const ProblemSpec& p, const DualGeometry& geom,
                             const ProblemConstants& consts, double gamma, double rho) {
  if (gamma <= 0.0 || gamma >= consts.gamma_max)
    throw ValidationError("rate_constants: gamma must lie in (0, gamma_max)");
  const double q_d = (1.0 - rho * geom.delta) * (1.0 - rho * geom.delta) +
                     2.0 * rho * rho;
  if (rho <= 0.0 || q_d >= 1.0)
    throw ValidationError(
        "rate_constants: rho rejected, q_d = (1 - rho delta)^2 + 2 rho^2 must be < 1");

  RateConstants rc;
  rc.n = p.n;
  rc.num_dual_agents = p.dual_partition.count();
  rc.beta = consts.beta;
  rc.gamma = gamma;
  rc.rho = rho;
  rc.delta = geom.delta;
  rc.lipschitz_global = consts.lipschitz_global;
  rc.diameter = consts.diameter;
  rc.q_p = 1.0 - gamma * consts.beta;
  rc.q_d = q_d;

  const double m2 = consts.lipschitz_global * consts.lipschitz_global;
  const double m4 = m2 * m2;
  const double d2 = consts.diameter * consts.diameter;
  const double beta2 = consts.beta * consts.beta;
  const double nd = static_cast<double>(rc.num_dual_agents);
  const double n = static_cast<double>(p.n);
  const double denom = beta2 * (1.0 - q_d);
  rc.c1 = 2.0 * n * nd * m4 * d2 * (q_d - rho * rho) / denom;
  rc.c2 = 4.0 * rho * rho * std::sqrt(n) * nd * m4 * d2 / denom;
  rc.c3 = 2.0 * nd * m4 * d2 * (q_d - rho * rho) / denom;

  rc.e1.resize(rc.num_dual_agents);
  rc.e2.resize(rc.num_dual_agents);
  rc.e3.resize(rc.num_dual_agents);
  for (int c = 0; c < rc.num_dual_agents; ++c) {
    const double mc2 = consts.lipschitz_per_block[c] * consts.lipschitz_per_block[c];
    rc.e1[c] = (q_d - rho * rho) * n * mc2 * d2;
    rc.e2[c] = 2.0 * rho * rho * std::sqrt(n) * mc2 * d2;
    rc.e3[c] = (q_d - rho * rho) * mc2 * d2;
  }
  return rc;
}

double convergence_bound(const RateConstants& rc, std::int64_t ops, std::int64_t t_min,
                     std::int64_t k_min, double mu0_dist_sq, double x0_dist_inf) {
  if (ops < 0 || t_min < 0 || k_min < 0)
    throw ValidationError("convergence_bound: counters must be nonnegative");
  const double x0 = x0_dist_inf > 0.0 ? x0_dist_inf : rc.diameter;
  const double m2 = rc.lipschitz_global * rc.lipschitz_global;
  const double first = std::pow(rc.q_p, 2.0 * static_cast<double>(ops)) * 2.0 *
                       static_cast<double>(rc.n) * x0 * x0;
  const double second = std::pow(rc.q_d, static_cast<double>(t_min)) * 2.0 * m2 /
                        (rc.beta * rc.beta) * mu0_dist_sq;
  const double third = std::pow(rc.q_p, 2.0 * static_cast<double>(k_min)) * rc.c1;
  const double fourth = std::pow(rc.q_p, static_cast<double>(k_min)) * rc.c2;
  return first + second + third + fourth + rc.c3;
}

RegularizationBounds regularization_error_bounds(const ProblemSpec& p,
                                                 const DualGeometry& geom,
                                                 const ProblemConstants& consts) {
  RegularizationBounds out;
  const double b = geom.dual_bound;
  out.solution_gap_sq = geom.delta / consts.beta * b * b;
  const double root = std::sqrt(geom.delta / consts.beta);
  out.constraint_violation = consts.lipschitz_per_constraint * b * root;
  (void)p;
  return out;
}

namespace {

/// Fixed point of the tightening shift c_j = M_j B~(c) sqrt(delta/beta).
/// Returns false when the Slater slack is exhausted (infeasible tightening).
bool solve_tightening_shift(const ProblemSpec& p, const ProblemConstants& consts,
                            double delta, Eigen::VectorXd* shift_out) {
  const Eigen::VectorXd slack = -p.constraints->value(p.slater_point);
  const double numerator = p.objective->value(p.slater_point) - p.f_star_lower;
  const double root = std::sqrt(delta / consts.beta);
  Eigen::VectorXd shift = Eigen::VectorXd::Zero(p.m);
  double bound = numerator / slack.minCoeff();
  if (bound == 0.0) {
    if (shift_out) *shift_out = shift;
    return true;
  }
  for (int iter = 0; iter < 500; ++iter) {
    const Eigen::VectorXd next = consts.lipschitz_per_constraint * bound * root;
    const double margin = (slack - next).minCoeff();
    if (margin <= 0.0) return false;
    const double next_bound = numerator / margin;
    const bool settled = (next - shift).lpNorm<Eigen::Infinity>() <=
                         1e-12 * std::max(1.0, next.lpNorm<Eigen::Infinity>());
    shift = next;
    bound = next_bound;
    if (settled) break;
    if (!std::isfinite(bound) || bound > 1e15) return false;
  }
  if (shift_out) *shift_out = shift;
  return true;
}

}  // namespace

double max_tightening_delta(const ProblemSpec& p, const ProblemConstants& consts) {
  if (p.m == 0) return std::numeric_limits<double>::infinity();
  auto feasible = [&](double delta) {
    return solve_tightening_shift(p, consts, delta, nullptr);
  };
  double lo = 1.0;
  while (lo > 1e-30 && !feasible(lo)) lo *= 0.5;
  if (!feasible(lo)) return 0.0;
  double hi = 2.0 * lo;
  while (hi < 1e12 && feasible(hi)) {
    lo = hi;
    hi *= 2.0;
  }
  if (hi >= 1e12) return std::numeric_limits<double>::infinity();
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

ProblemSpec tighten_constraints(const ProblemSpec& p, const DualGeometry& geom,
                                const ProblemConstants& consts) {
  if (p.m == 0 || geom.dual_bound == 0.0) return p;
  Eigen::VectorXd shift;
  if (!solve_tightening_shift(p, consts, geom.delta, &shift)) {
    const double achievable = max_tightening_delta(p, consts);
    throw InfeasibleParameterError(
        "constraint tightening infeasible at the Slater point for this delta; "
        "largest feasible delta is " +
            std::to_string(achievable),
        achievable);
  }
  ProblemSpec tightened = p;
  if (const auto* affine = dynamic_cast<const AffineConstraints*>(p.constraints.get())) {
    tightened.constraints =
        std::make_shared<AffineConstraints>(affine->a(), affine->b() - shift);
  } else {
    tightened.constraints = std::make_shared<ShiftedConstraints>(p.constraints, shift);
  }
  validate(tightened);
  return tightened;
}

namespace {

double recipe_q_d(double delta) {
  const double rho = delta / (1.0 + delta * delta);
  return (1.0 - rho * delta) * (1.0 - rho * delta) + 2.0 * rho * rho;
}

}  // namespace

ParameterRecipe parameter_recipe(const ProblemSpec& p, const DualGeometry& geom,
                                         const ProblemConstants& consts, double eps1,
                                         double eps2, double gamma, bool use_oracle_mu) {
  if (eps1 <= 0.0 || eps2 <= 0.0)
    throw ValidationError("parameter_recipe: eps1 and eps2 must be positive");
  if (gamma <= 0.0) gamma = 0.5 * consts.gamma_max;

  const double m2 = consts.lipschitz_global * consts.lipschitz_global;
  const double m4 = m2 * m2;
  const double d2 = consts.diameter * consts.diameter;
  const double nd = static_cast<double>(p.dual_partition.count());
  const double beta2 = consts.beta * consts.beta;

  // delta^2 >= 2 Nd M^4 Dx^2 / (eps2 beta^2 (1 - q_d)) - 1 with rho = delta/(1+delta^2);
  // the gap function is monotone, so bisect for the smallest admissible delta.
  // The search starts on (0, 10] and extends geometrically (to 1e6) when the
  // penalty constants demand a larger regularization weight.
  auto gap = [&](double delta) {
    const double rhs = 2.0 * nd * m4 * d2 / (eps2 * beta2 * (1.0 - recipe_q_d(delta))) - 1.0;
    return delta * delta - rhs;
  };
  double hi_limit = 10.0;
  const double hi_cap = 1e6;
  while (hi_limit < hi_cap && gap(hi_limit) < 0.0) hi_limit *= 2.0;
  if (gap(hi_limit) < 0.0) {
    const double frontier = 2.0 * nd * m4 * d2 /
                            (beta2 * (1.0 - recipe_q_d(hi_limit)) *
                             (1.0 + hi_limit * hi_limit));
    throw InfeasibleParameterError(
        "no delta in the search range satisfies the eps2 target; achievable eps2 "
        "frontier is " +
            std::to_string(frontier),
        frontier);
  }
  double delta;
  if (gap(1e-9) >= 0.0) {
    delta = 1e-9;
  } else {
    double lo = 1e-9, hi = hi_limit;
    while (hi - lo > 1e-8 * std::max(1.0, hi)) {
      const double mid = 0.5 * (lo + hi);
      if (gap(mid) >= 0.0)
        hi = mid;
      else
        lo = mid;
    }
    delta = hi;
  }
  // Tiny admissible deltas make q_d -> 1 and T(t) astronomically large; clamp.
  delta = std::max(delta, 0.05);
  const double rho = delta / (1.0 + delta * delta);

  const DualGeometry geom_star = make_dual_geometry(p, delta);
  const RateConstants rc = rate_constants(p, geom_star, consts, gamma, rho);

  ParameterRecipe out;
  out.delta = delta;
  out.rho = rho;
  out.mu0_from_oracle = use_oracle_mu;
  if (use_oracle_mu) {
    const SaddlePoint sp = saddle_oracle(p, geom_star, consts);
    out.mu0_dist_sq = sp.mu.squaredNorm();  // mu(0) = 0
  } else {
    out.mu0_dist_sq = 4.0 * geom_star.dual_bound * geom_star.dual_bound;
  }

  const double k_base = 4.0 * static_cast<double>(p.n) * d2 + 2.0 * rc.c1 + 2.0 * rc.c2;
  double k_min = 0.0;
  if (eps1 < k_base) k_min = std::ceil((std::log(eps1) - std::log(k_base)) / std::log(rc.q_p));
  double t_min = 0.0;
  const double t_base = 4.0 * m2 * out.mu0_dist_sq;
  if (out.mu0_dist_sq > 0.0 && eps1 * beta2 < t_base)
    t_min = std::ceil((std::log(eps1 * beta2) - std::log(t_base)) / std::log(rc.q_d));
  out.k_min = static_cast<std::int64_t>(std::max(0.0, k_min));
  out.t_min = static_cast<std::int64_t>(std::max(0.0, t_min));

  const std::int64_t ops = (out.k_min + 1) / 2;  // 2 ops >= K
  out.round_trip_bound = convergence_bound(rc, ops, out.t_min, out.k_min, out.mu0_dist_sq);
  (void)geom;
  return out;
}

}  // namespace asyncpd
