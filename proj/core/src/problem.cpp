#include "asyncpd/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "asyncpd/errors.hpp"

namespace asyncpd {
namespace {

constexpr double kDomainTol = 1e-9;
constexpr int kGridPointsPerAxis = 17;
constexpr std::int64_t kGridCap = 100000;
constexpr std::uint64_t kGridSeed = 0x9e3779b97f4a7c15ull;
constexpr double kGammaGridSafety = 0.9;
constexpr double kLipschitzGridInflation = 1.1;

bool constraints_affine(const ProblemSpec& p) {
  return p.m == 0 || p.constraints->is_affine();
}

void check_primal_domain(const ProblemSpec& p, const Eigen::VectorXd& x) {
  if (x.size() != p.n) throw ValidationError("x has wrong dimension");
  if (!p.box().contains(x, kDomainTol))
    throw ValidationError("x outside the box set X");
}

void check_dual_domain(const ProblemSpec& p, const DualGeometry& geom,
                       const Eigen::VectorXd& mu) {
  if (mu.size() != p.m) throw ValidationError("mu has wrong dimension");
  if (p.m == 0) return;
  if ((mu.array() < -kDomainTol).any())
    throw ValidationError("mu outside M: negative component");
  if (mu.lpNorm<1>() > geom.dual_bound + kDomainTol)
    throw ValidationError("mu outside M: l1 bound exceeded");
}

/// Deterministic evaluation points over the box: the full tensor grid with 17
/// points per axis when small enough, otherwise a seeded uniform sample of the
/// same cardinality cap (always including both box corners).
std::vector<Eigen::VectorXd> box_evaluation_points(const ProblemSpec& p) {
  std::vector<Eigen::VectorXd> points;
  double count = 1.0;
  for (int i = 0; i < p.n && count <= static_cast<double>(kGridCap); ++i)
    count *= kGridPointsPerAxis;

  if (count <= static_cast<double>(kGridCap)) {
    std::vector<int> idx(p.n, 0);
    Eigen::VectorXd x(p.n);
    while (true) {
      for (int i = 0; i < p.n; ++i) {
        const double t = static_cast<double>(idx[i]) / (kGridPointsPerAxis - 1);
        x[i] = p.box_lower[i] + t * (p.box_upper[i] - p.box_lower[i]);
      }
      points.push_back(x);
      int axis = 0;
      while (axis < p.n && ++idx[axis] == kGridPointsPerAxis) idx[axis++] = 0;
      if (axis == p.n) break;
    }
  } else {
    std::mt19937_64 rng(kGridSeed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    points.push_back(p.box_lower);
    points.push_back(p.box_upper);
    Eigen::VectorXd x(p.n);
    for (std::int64_t k = 2; k < kGridCap; ++k) {
      for (int i = 0; i < p.n; ++i)
        x[i] = p.box_lower[i] + unif(rng) * (p.box_upper[i] - p.box_lower[i]);
      points.push_back(x);
    }
  }
  return points;
}

/// Vertices of M = {mu >= 0 : ||mu||_1 <= B}: the origin and B e_j. The
/// Lagrangian Hessian is affine in mu, so row-sum maxima over M are attained
/// at these vertices.
std::vector<Eigen::VectorXd> dual_vertices(const ProblemSpec& p, double bound) {
  std::vector<Eigen::VectorXd> vertices;
  vertices.push_back(Eigen::VectorXd::Zero(p.m));
  if (bound > 0.0) {
    for (int j = 0; j < p.m; ++j) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(p.m);
      v[j] = bound;
      vertices.push_back(v);
    }
  }
  return vertices;
}

struct HessianScan {
  double max_row_sum = 0.0;
  double min_margin = std::numeric_limits<double>::infinity();
  bool exact = false;
};

void fold_matrix(const Eigen::MatrixXd& h, HessianScan& scan) {
  for (int i = 0; i < h.rows(); ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < h.cols(); ++j) {
      const double a = std::abs(h(i, j));
      if (!std::isfinite(a)) throw EvaluationError("non-finite Hessian entry");
      row_sum += a;
    }
    const double margin = 2.0 * std::abs(h(i, i)) - row_sum;
    scan.max_row_sum = std::max(scan.max_row_sum, row_sum);
    scan.min_margin = std::min(scan.min_margin, margin);
  }
}

HessianScan scan_hessian(const ProblemSpec& p, const DualGeometry& geom) {
  HessianScan scan;
  const bool affine = constraints_affine(p);

  if (affine && p.objective->hessian_kind() == HessianKind::Constant) {
    fold_matrix(p.objective->hessian(p.box_lower), scan);
    scan.exact = true;
    return scan;
  }
  if (affine && p.objective->hessian_kind() == HessianKind::SeparableDiagonal) {
    for (int i = 0; i < p.n; ++i) {
      const auto [lo, hi] =
          p.objective->diagonal_hessian_range(i, p.box_lower[i], p.box_upper[i]);
      if (!std::isfinite(lo) || !std::isfinite(hi))
        throw EvaluationError("non-finite Hessian entry");
      scan.max_row_sum = std::max(scan.max_row_sum, std::abs(hi));
      scan.min_margin = std::min(scan.min_margin, std::abs(lo));
    }
    scan.exact = true;
    return scan;
  }

  const auto points = box_evaluation_points(p);
  const auto vertices = dual_vertices(p, geom.dual_bound);
  for (const auto& x : points) {
    const Eigen::MatrixXd hf = p.objective->hessian(x);
    for (const auto& mu : vertices) {
      Eigen::MatrixXd h = hf;
      if (p.m > 0 && !p.constraints->is_affine()) {
        for (int j = 0; j < p.m; ++j) {
          if (mu[j] != 0.0) h += mu[j] * p.constraints->component_hessian(j, x);
        }
      }
      fold_matrix(h, scan);
      if (p.m == 0 || p.constraints->is_affine()) break;  // mu-independent
    }
  }
  return scan;
}

}  // namespace

BoxSet ProblemSpec::block_box(int i) const {
  const int off = primal_partition.offset(i);
  const int len = primal_partition.size(i);
  return {box_lower.segment(off, len), box_upper.segment(off, len)};
}

void validate(const ProblemSpec& p) {
  if (p.n <= 0) throw ValidationError("problem: n must be positive");
  if (p.m < 0) throw ValidationError("problem: m must be nonnegative");
  if (!p.objective) throw ValidationError("problem: objective missing");
  if (p.m > 0 && !p.constraints) throw ValidationError("problem: constraints missing");
  if (p.m > 0 && (p.constraints->rows() != p.m || p.constraints->cols() != p.n))
    throw ValidationError("problem: constraint dimensions disagree with n, m");
  if (p.box_lower.size() != p.n || p.box_upper.size() != p.n)
    throw ValidationError("problem: box bounds must have dimension n");
  if (!p.box_lower.allFinite() || !p.box_upper.allFinite())
    throw ValidationError("problem: box bounds must be finite");
  if (!((p.box_lower.array() < p.box_upper.array()).all()))
    throw ValidationError("problem: box_lower must be strictly below box_upper");
  if (p.slater_point.size() != p.n)
    throw ValidationError("problem: slater_point must have dimension n");
  if (!p.box().contains(p.slater_point, kDomainTol))
    throw ValidationError("problem: slater_point outside the box");
  if (p.m > 0) {
    const Eigen::VectorXd gs = p.constraints->value(p.slater_point);
    if (!(gs.array() < 0.0).all())
      throw ValidationError("problem: slater_point must satisfy g < 0 componentwise");
    for (int k = 0; k < p.m; ++k) {
      bool any = false;
      for (int a = 0; a < p.n && !any; ++a) any = p.constraints->depends(k, a);
      if (!any)
        throw ValidationError("problem: constraint row " + std::to_string(k) +
                              " depends on no variables");
    }
  }
  if (p.primal_partition.total() != p.n)
    throw ValidationError("problem: primal partition must cover all n coordinates");
  if (p.dual_partition.total() != p.m)
    throw ValidationError("problem: dual partition must cover all m constraints");
  const double fs = p.objective->value(p.slater_point);
  if (!std::isfinite(fs)) throw ValidationError("problem: f(slater_point) not finite");
  if (fs < p.f_star_lower - 1e-12)
    throw ValidationError("problem: f(slater_point) below f_star_lower");
}

double compute_dual_bound(const ProblemSpec& p) {
  if (p.m == 0) return 0.0;
  const Eigen::VectorXd gs = p.constraints->value(p.slater_point);
  const double margin = (-gs).minCoeff();
  if (margin <= 0.0)
    throw ValidationError("invalid Slater point: min_j(-g_j) must be positive");
  const double numerator = p.objective->value(p.slater_point) - p.f_star_lower;
  return numerator / margin;
}

DualGeometry make_dual_geometry(const ProblemSpec& p, double delta) {
  if (delta <= 0.0) throw ValidationError("delta must be positive");
  DualGeometry geom;
  geom.delta = delta;
  geom.dual_bound = compute_dual_bound(p);
  geom.block_sets.reserve(p.dual_partition.count());
  for (int c = 0; c < p.dual_partition.count(); ++c)
    geom.block_sets.push_back({geom.dual_bound, p.dual_partition.size(c)});
  return geom;
}

DiameterLipschitz compute_diameter_and_lipschitz(const ProblemSpec& p) {
  if (!p.box_lower.allFinite() || !p.box_upper.allFinite())
    throw ValidationError("unbounded box rejected");
  DiameterLipschitz out;
  out.diameter = (p.box_upper - p.box_lower).norm();
  out.per_constraint = Eigen::VectorXd::Zero(p.m);
  out.per_block = Eigen::VectorXd::Zero(p.dual_partition.count());
  if (p.m == 0) return out;

  auto fold = [&](const Eigen::MatrixXd& jac) {
    out.lipschitz_global = std::max(out.lipschitz_global, jac.norm());
    for (int j = 0; j < p.m; ++j)
      out.per_constraint[j] = std::max(out.per_constraint[j], jac.row(j).norm());
    for (int c = 0; c < p.dual_partition.count(); ++c) {
      const auto block =
          jac.middleRows(p.dual_partition.offset(c), p.dual_partition.size(c));
      out.per_block[c] = std::max(out.per_block[c], block.norm());
    }
  };

  if (p.constraints->is_affine()) {
    fold(p.constraints->jacobian(p.box_lower));
  } else {
    for (const auto& x : box_evaluation_points(p)) fold(p.constraints->jacobian(x));
    out.lipschitz_global *= kLipschitzGridInflation;
    out.per_constraint *= kLipschitzGridInflation;
    out.per_block *= kLipschitzGridInflation;
  }
  if (!std::isfinite(out.lipschitz_global))
    throw EvaluationError("non-finite constraint gradient norm");
  return out;
}

double compute_gamma_bound(const ProblemSpec& p, const DualGeometry& geom) {
  const HessianScan scan = scan_hessian(p, geom);
  if (scan.max_row_sum <= 0.0)
    throw EvaluationError("degenerate Hessian: zero row sums");
  const double bound = 1.0 / scan.max_row_sum;
  return scan.exact ? bound : kGammaGridSafety * bound;
}

double compute_beta(const ProblemSpec& p, const DualGeometry& geom) {
  const HessianScan scan = scan_hessian(p, geom);
  if (!(scan.min_margin > 0.0))
    throw ValidationError(
        "Hessian is not diagonally dominant over the evaluation set; this "
        "solver requires diagonal dominance (a primal regularization could "
        "restore it, but is not implemented)");
  return scan.min_margin;
}

ProblemConstants compute_constants(const ProblemSpec& p, const DualGeometry& geom) {
  ProblemConstants consts;
  consts.beta = compute_beta(p, geom);
  consts.gamma_max = compute_gamma_bound(p, geom);
  const DiameterLipschitz dl = compute_diameter_and_lipschitz(p);
  consts.diameter = dl.diameter;
  consts.lipschitz_global = dl.lipschitz_global;
  consts.lipschitz_per_constraint = dl.per_constraint;
  consts.lipschitz_per_block = dl.per_block;
  return consts;
}

double eval_lagrangian(const ProblemSpec& p, const DualGeometry& geom,
                       const Eigen::VectorXd& x, const Eigen::VectorXd& mu) {
  check_primal_domain(p, x);
  check_dual_domain(p, geom, mu);
  double value = p.objective->value(x);
  if (p.m > 0) value += mu.dot(p.constraints->value(x));
  return value - 0.5 * geom.delta * mu.squaredNorm();
}

Eigen::VectorXd grad_x(const ProblemSpec& p, const DualGeometry& geom,
                       const Eigen::VectorXd& x, const Eigen::VectorXd& mu) {
  check_primal_domain(p, x);
  check_dual_domain(p, geom, mu);
  Eigen::VectorXd g = p.objective->gradient(x);
  if (p.m > 0) g += p.constraints->jacobian(x).transpose() * mu;
  return g;
}

Eigen::VectorXd grad_mu(const ProblemSpec& p, const DualGeometry& geom,
                        const Eigen::VectorXd& x, const Eigen::VectorXd& mu) {
  check_primal_domain(p, x);
  check_dual_domain(p, geom, mu);
  if (p.m == 0) return Eigen::VectorXd(0);
  return p.constraints->value(x) - geom.delta * mu;
}

Eigen::MatrixXd lagrangian_hessian(const ProblemSpec& p, const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& mu) {
  Eigen::MatrixXd h = p.objective->hessian(x);
  if (p.m > 0 && !p.constraints->is_affine()) {
    for (int j = 0; j < p.m; ++j) {
      if (mu[j] != 0.0) h += mu[j] * p.constraints->component_hessian(j, x);
    }
  }
  return h;
}

std::vector<std::vector<int>> essential_neighbors(const ProblemSpec& p) {
  const int np = p.primal_partition.count();
  const bool affine = constraints_affine(p);
  auto coords_couple = [&](int a, int b) {
    if (p.objective->couples(a, b)) return true;
    if (affine) return false;
    for (int k = 0; k < p.m; ++k) {
      if (p.constraints->depends(k, a) && p.constraints->depends(k, b)) return true;
    }
    return false;
  };

  std::vector<std::vector<int>> neighbors(np);
  for (int i = 0; i < np; ++i) {
    for (int j = 0; j < np; ++j) {
      if (i == j) continue;
      bool coupled = false;
      for (int a = p.primal_partition.offset(i);
           !coupled && a < p.primal_partition.offset(i) + p.primal_partition.size(i);
           ++a) {
        for (int b = p.primal_partition.offset(j);
             b < p.primal_partition.offset(j) + p.primal_partition.size(j); ++b) {
          if (coords_couple(a, b)) {
            coupled = true;
            break;
          }
        }
      }
      if (coupled) neighbors[i].push_back(j);
    }
  }
  return neighbors;
}

std::vector<std::vector<int>> constrained_primal_blocks(const ProblemSpec& p) {
  const int nd = p.dual_partition.count();
  const int np = p.primal_partition.count();
  std::vector<std::vector<int>> result(nd);
  for (int c = 0; c < nd; ++c) {
    for (int i = 0; i < np; ++i) {
      bool touches = false;
      for (int k = p.dual_partition.offset(c);
           !touches && k < p.dual_partition.offset(c) + p.dual_partition.size(c); ++k) {
        for (int a = p.primal_partition.offset(i);
             a < p.primal_partition.offset(i) + p.primal_partition.size(i); ++a) {
          if (p.constraints->depends(k, a)) {
            touches = true;
            break;
          }
        }
      }
      if (touches) result[c].push_back(i);
    }
  }
  return result;
}

std::vector<std::vector<int>> relevant_dual_blocks(const ProblemSpec& p) {
  std::vector<std::vector<int>> result(p.primal_partition.count());
  const auto constrained = constrained_primal_blocks(p);
  for (int c = 0; c < static_cast<int>(constrained.size()); ++c) {
    for (int i : constrained[c]) result[i].push_back(c);
  }
  return result;
}

}  // namespace asyncpd
