#pragma once

#include <Eigen/Core>
#include <functional>
#include <memory>
#include <string>
#include <utility>

namespace asyncpd {

enum class HessianKind {
  Constant,           // hessian() is independent of x
  SeparableDiagonal,  // diag(phi_i''(x_i)); each entry depends on one coordinate
  General,
};

/// Twice-differentiable convex objective.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual double value(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd gradient(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const = 0;

  /// Structural coupling: true when H_ab can be nonzero for some x.
  virtual bool couples(int a, int b) const = 0;

  virtual HessianKind hessian_kind() const { return HessianKind::General; }

  /// For SeparableDiagonal: (min, max) of the i-th diagonal Hessian entry
  /// over x_i in [lo, hi].
  virtual std::pair<double, double> diagonal_hessian_range(int i, double lo,
                                                           double hi) const;

  /// Serialization tag; "callable" objectives are not serializable.
  virtual std::string kind() const = 0;
};

/// Vector constraint map g : R^n -> R^m with componentwise convex, twice
/// differentiable entries.
class ConstraintMap {
 public:
  virtual ~ConstraintMap() = default;

  virtual int rows() const = 0;
  virtual int cols() const = 0;
  virtual Eigen::VectorXd value(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const = 0;
  /// Hessian of the j-th component.
  virtual Eigen::MatrixXd component_hessian(int j, const Eigen::VectorXd& x) const = 0;

  virtual bool is_affine() const { return false; }
  /// Structural dependence of row j on coordinate a.
  virtual bool depends(int j, int a) const = 0;

  virtual std::string kind() const = 0;
};

// ---------------------------------------------------------------------------
// Shipped problem classes.

/// f(x) = 1/2 x'Qx + c'x + d with Q symmetric positive semidefinite.
class QuadraticObjective final : public Objective {
 public:
  QuadraticObjective(Eigen::MatrixXd q, Eigen::VectorXd c, double d = 0.0);

  double value(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const override;
  bool couples(int a, int b) const override;
  HessianKind hessian_kind() const override { return HessianKind::Constant; }
  std::string kind() const override { return "quadratic"; }

  const Eigen::MatrixXd& q() const { return q_; }
  const Eigen::VectorXd& c() const { return c_; }
  double d() const { return d_; }

 private:
  Eigen::MatrixXd q_;
  Eigen::VectorXd c_;
  double d_;
};

/// f(x) = -W * sum_i log(1 + x_i), the network-flow utility. Convex and
/// decreasing on x > -1 with Hessian diag(W / (1 + x_i)^2).
class LogUtilityObjective final : public Objective {
 public:
  LogUtilityObjective(double weight, int dim);

  double value(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const override;
  bool couples(int a, int b) const override { return a == b; }
  HessianKind hessian_kind() const override { return HessianKind::SeparableDiagonal; }
  std::pair<double, double> diagonal_hessian_range(int i, double lo,
                                                   double hi) const override;
  std::string kind() const override { return "log_utility"; }

  double weight() const { return weight_; }

 private:
  double weight_;
  int dim_;
};

/// User-registered callables behind the same interface. Not serializable;
/// treated as structurally dense unless a coupling predicate is supplied.
class CallableObjective final : public Objective {
 public:
  using ValueFn = std::function<double(const Eigen::VectorXd&)>;
  using GradFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
  using HessFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;
  using CouplesFn = std::function<bool(int, int)>;

  CallableObjective(ValueFn value, GradFn grad, HessFn hess,
                    CouplesFn couples = nullptr);

  double value(const Eigen::VectorXd& x) const override { return value_(x); }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override { return grad_(x); }
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const override { return hess_(x); }
  bool couples(int a, int b) const override;
  std::string kind() const override { return "callable"; }

 private:
  ValueFn value_;
  GradFn grad_;
  HessFn hess_;
  CouplesFn couples_;
};

/// g(x) = Ax - b.
class AffineConstraints final : public ConstraintMap {
 public:
  AffineConstraints(Eigen::MatrixXd a, Eigen::VectorXd b);

  int rows() const override { return static_cast<int>(a_.rows()); }
  int cols() const override { return static_cast<int>(a_.cols()); }
  Eigen::VectorXd value(const Eigen::VectorXd& x) const override;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd&) const override { return a_; }
  Eigen::MatrixXd component_hessian(int, const Eigen::VectorXd&) const override;
  bool is_affine() const override { return true; }
  bool depends(int j, int a) const override { return a_(j, a) != 0.0; }
  std::string kind() const override { return "affine"; }

  const Eigen::MatrixXd& a() const { return a_; }
  const Eigen::VectorXd& b() const { return b_; }

 private:
  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
};

/// User-registered constraint callables. Structurally dense unless a
/// dependence predicate is supplied.
class CallableConstraints final : public ConstraintMap {
 public:
  using ValueFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
  using JacobianFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;
  using ComponentHessFn = std::function<Eigen::MatrixXd(int, const Eigen::VectorXd&)>;
  using DependsFn = std::function<bool(int, int)>;

  CallableConstraints(int rows, int cols, ValueFn value, JacobianFn jacobian,
                      ComponentHessFn component_hessian,
                      DependsFn depends = nullptr);

  int rows() const override { return rows_; }
  int cols() const override { return cols_; }
  Eigen::VectorXd value(const Eigen::VectorXd& x) const override { return value_(x); }
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const override {
    return jacobian_(x);
  }
  Eigen::MatrixXd component_hessian(int j, const Eigen::VectorXd& x) const override {
    return component_hessian_(j, x);
  }
  bool depends(int j, int a) const override;
  std::string kind() const override { return "callable"; }

 private:
  int rows_;
  int cols_;
  ValueFn value_;
  JacobianFn jacobian_;
  ComponentHessFn component_hessian_;
  DependsFn depends_;
};

/// g~(x) = g(x) + shift; the componentwise-tightened requirement g(x) <= -shift.
class ShiftedConstraints final : public ConstraintMap {
 public:
  ShiftedConstraints(std::shared_ptr<const ConstraintMap> base, Eigen::VectorXd shift);

  int rows() const override { return base_->rows(); }
  int cols() const override { return base_->cols(); }
  Eigen::VectorXd value(const Eigen::VectorXd& x) const override {
    return base_->value(x) + shift_;
  }
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const override {
    return base_->jacobian(x);
  }
  Eigen::MatrixXd component_hessian(int j, const Eigen::VectorXd& x) const override {
    return base_->component_hessian(j, x);
  }
  bool is_affine() const override { return base_->is_affine(); }
  bool depends(int j, int a) const override { return base_->depends(j, a); }
  std::string kind() const override { return base_->kind(); }

  const Eigen::VectorXd& shift() const { return shift_; }

 private:
  std::shared_ptr<const ConstraintMap> base_;
  Eigen::VectorXd shift_;
};

}  // namespace asyncpd
