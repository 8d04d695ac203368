#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <vector>

namespace mpgen::nlp {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// min f(z) s.t. c(z) = 0, l <= z <= u. Variables with l == u are fixed.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual int num_variables() const = 0;
  virtual int num_constraints() const = 0;
  virtual const Eigen::VectorXd& lower() const = 0;
  virtual const Eigen::VectorXd& upper() const = 0;

  /// Objective and constraints. Returns false if z leaves the model domain.
  virtual bool evaluate(const Eigen::VectorXd& z, double& f, Eigen::VectorXd& c) const = 0;

  /// Objective gradient, constraint Jacobian and the Hessian of f + y'c as
  /// symmetric triplets (both triangles). Returns false outside the domain.
  virtual bool derivatives(const Eigen::VectorXd& z, const Eigen::VectorXd& y, Eigen::VectorXd& grad,
                           SparseMatrix& jac, std::vector<Triplet>& hess) const = 0;
};

struct AlmOptions {
  double feas_tol = 1e-10;
  double opt_tol = 1e-8;
  /// Accepted stationarity when the line search can no longer make progress
  /// (penalty-amplified rounding sets a floor on the attainable gradient norm).
  double stall_opt_tol = 1e-6;
  int max_outer = 500;
  int max_newton = 5000;
  double rho_init = 10.0;
  double rho_max = 1e9;
  /// Violation above which a stalled run is declared infeasible.
  double infeasible_threshold = 1e-4;
  double armijo = 1e-4;
};

enum class AlmStatus { Converged, Infeasible, BudgetExhausted, EvaluationFailed };

struct AlmResult {
  AlmStatus status = AlmStatus::BudgetExhausted;
  Eigen::VectorXd z;
  /// Multiplier estimate lambda + rho * c at the returned point.
  Eigen::VectorXd y;
  double objective = 0.0;
  double violation = 0.0;
  /// Infinity norm of the projected Lagrangian gradient.
  double kkt_residual = 0.0;
  int outer_iterations = 0;
  int newton_iterations = 0;
  double rho = 0.0;
};

/// Bound-constrained augmented Lagrangian with projected Newton inner
/// iterations (active set plus Armijo search along the projection arc).
/// `lambda0` may be empty.
AlmResult solve_alm(const Problem& problem, Eigen::VectorXd z0, Eigen::VectorXd lambda0, const AlmOptions& options);

/// ||P(z - g) - z||_inf for the box [l, u].
double projected_gradient_norm(const Eigen::VectorXd& z, const Eigen::VectorXd& g, const Eigen::VectorXd& l,
                               const Eigen::VectorXd& u);

}  // namespace mpgen::nlp
