#include "asyncpd/projection.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "asyncpd/errors.hpp"

namespace asyncpd {

bool BoxSet::contains(const Eigen::VectorXd& v, double tol) const {
  return (v.array() >= lower.array() - tol).all() &&
         (v.array() <= upper.array() + tol).all();
}

bool NonnegL1Ball::contains(const Eigen::VectorXd& v, double tol) const {
  if ((v.array() < -tol).any()) return false;
  return v.sum() <= radius + tol;
}

Eigen::VectorXd project_box(const BoxSet& set, const Eigen::VectorXd& v) {
  if (v.size() != set.lower.size())
    throw ValidationError("project_box: dimension mismatch");
  return v.cwiseMax(set.lower).cwiseMin(set.upper);
}

Eigen::VectorXd project_nonneg_l1(const NonnegL1Ball& set, const Eigen::VectorXd& v) {
  if (v.size() != set.dim)
    throw ValidationError("project_nonneg_l1: dimension mismatch");
  Eigen::VectorXd clipped = v.cwiseMax(0.0);
  if (set.radius <= 0.0) return Eigen::VectorXd::Zero(v.size());
  if (clipped.sum() <= set.radius) return clipped;

  // Water-filling threshold: find theta > 0 with sum_i max(v_i - theta, 0) = radius.
  // Only positive coordinates can stay active, so sorting v descending suffices.
  std::vector<double> sorted(v.data(), v.data() + v.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - set.radius) / static_cast<double>(k + 1);
    if (k + 1 == sorted.size() || sorted[k + 1] <= candidate) {
      theta = candidate;
      break;
    }
  }
  return (v.array() - theta).cwiseMax(0.0);
}

}  // namespace asyncpd
