#pragma once

#include <functional>

#include <Eigen/Dense>

namespace dembed {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct SolverConfig {
  /// Newton stops once |r(x)|_inf <= tol * (1 + |x|_inf).
  double tol = 1e-12;
  int max_iter = 50;
  /// Forward-difference step, scaled by 1 + |x|_inf.
  double fd_step = 1e-7;

  /// Throws DomainError on tol <= 0, max_iter < 1 or fd_step <= 0.
  void validate() const;
};

using ResidualFn = std::function<Vector(const Vector&)>;
using JacobianFn = std::function<Matrix(const Vector&)>;

struct NewtonResult {
  Vector x;
  int iterations = 0;
  double residual_norm = 0.0;
};

/// Forward-difference Jacobian of r at x.
Matrix fd_jacobian(const ResidualFn& r, const Vector& x, const Vector& rx, double fd_step);

/// Damped Newton: full step, halved (at most 20 times) while the residual
/// norm grows. An empty `jacobian` selects the forward-difference fallback.
/// Throws ConvergenceError after max_iter updates and SingularJacobianError
/// when the Newton matrix is rank deficient.
NewtonResult newton_solve(const ResidualFn& residual, const JacobianFn& jacobian,
                          const Vector& x_init, const SolverConfig& cfg);

}  // namespace dembed
