#include "asyncpd/models.hpp"

#include <cmath>

#include "asyncpd/errors.hpp"

namespace asyncpd {

std::pair<double, double> Objective::diagonal_hessian_range(int, double, double) const {
  throw EvaluationError("diagonal_hessian_range: objective has no separable diagonal form");
}

QuadraticObjective::QuadraticObjective(Eigen::MatrixXd q, Eigen::VectorXd c, double d)
    : q_(std::move(q)), c_(std::move(c)), d_(d) {
  if (q_.rows() != q_.cols() || q_.rows() != c_.size())
    throw ValidationError("quadratic objective: dimension mismatch");
  if (!q_.isApprox(q_.transpose(), 1e-12))
    throw ValidationError("quadratic objective: Q must be symmetric");
}

double QuadraticObjective::value(const Eigen::VectorXd& x) const {
  return 0.5 * x.dot(q_ * x) + c_.dot(x) + d_;
}

Eigen::VectorXd QuadraticObjective::gradient(const Eigen::VectorXd& x) const {
  return q_ * x + c_;
}

Eigen::MatrixXd QuadraticObjective::hessian(const Eigen::VectorXd&) const { return q_; }

bool QuadraticObjective::couples(int a, int b) const {
  return a == b || q_(a, b) != 0.0;
}

LogUtilityObjective::LogUtilityObjective(double weight, int dim)
    : weight_(weight), dim_(dim) {
  if (weight <= 0.0) throw ValidationError("log utility: weight must be positive");
  if (dim <= 0) throw ValidationError("log utility: dimension must be positive");
}

double LogUtilityObjective::value(const Eigen::VectorXd& x) const {
  return -weight_ * (1.0 + x.array()).log().sum();
}

Eigen::VectorXd LogUtilityObjective::gradient(const Eigen::VectorXd& x) const {
  return (-weight_ / (1.0 + x.array())).matrix();
}

Eigen::MatrixXd LogUtilityObjective::hessian(const Eigen::VectorXd& x) const {
  return (weight_ / (1.0 + x.array()).square()).matrix().asDiagonal();
}

std::pair<double, double> LogUtilityObjective::diagonal_hessian_range(int, double lo,
                                                                      double hi) const {
  if (lo <= -1.0) throw EvaluationError("log utility: box reaches the singularity at -1");
  // W/(1+x)^2 is decreasing on x > -1.
  const double max = weight_ / ((1.0 + lo) * (1.0 + lo));
  const double min = weight_ / ((1.0 + hi) * (1.0 + hi));
  return {min, max};
}

CallableObjective::CallableObjective(ValueFn value, GradFn grad, HessFn hess,
                                     CouplesFn couples)
    : value_(std::move(value)),
      grad_(std::move(grad)),
      hess_(std::move(hess)),
      couples_(std::move(couples)) {
  if (!value_ || !grad_ || !hess_)
    throw ValidationError("callable objective: value, gradient, and hessian required");
}

bool CallableObjective::couples(int a, int b) const {
  if (couples_) return couples_(a, b);
  return true;
}

AffineConstraints::AffineConstraints(Eigen::MatrixXd a, Eigen::VectorXd b)
    : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() != b_.size())
    throw ValidationError("affine constraints: dimension mismatch");
}

Eigen::VectorXd AffineConstraints::value(const Eigen::VectorXd& x) const {
  return a_ * x - b_;
}

Eigen::MatrixXd AffineConstraints::component_hessian(int, const Eigen::VectorXd&) const {
  return Eigen::MatrixXd::Zero(cols(), cols());
}

CallableConstraints::CallableConstraints(int rows, int cols, ValueFn value,
                                         JacobianFn jacobian,
                                         ComponentHessFn component_hessian,
                                         DependsFn depends)
    : rows_(rows),
      cols_(cols),
      value_(std::move(value)),
      jacobian_(std::move(jacobian)),
      component_hessian_(std::move(component_hessian)),
      depends_(std::move(depends)) {
  if (rows_ < 0 || cols_ <= 0)
    throw ValidationError("callable constraints: invalid dimensions");
  if (!value_ || !jacobian_ || !component_hessian_)
    throw ValidationError("callable constraints: value, jacobian, and hessian required");
}

bool CallableConstraints::depends(int j, int a) const {
  if (depends_) return depends_(j, a);
  return true;
}

ShiftedConstraints::ShiftedConstraints(std::shared_ptr<const ConstraintMap> base,
                                       Eigen::VectorXd shift)
    : base_(std::move(base)), shift_(std::move(shift)) {
  if (!base_) throw ValidationError("shifted constraints: null base");
  if (shift_.size() != base_->rows())
    throw ValidationError("shifted constraints: shift dimension mismatch");
}

}  // namespace asyncpd
