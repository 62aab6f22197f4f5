#include "dembed/newton.hpp"

#include <cmath>

#include "dembed/errors.hpp"

namespace dembed {

void SolverConfig::validate() const {
  if (!(tol > 0.0)) throw DomainError("solver tol must be positive");
  if (max_iter < 1) throw DomainError("solver max_iter must be >= 1");
  if (!(fd_step > 0.0)) throw DomainError("solver fd_step must be positive");
}

namespace {

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

bool converged(const Vector& r, const Vector& x, double tol) {
  return inf_norm(r) <= tol * (1.0 + inf_norm(x));
}

}  // namespace

Matrix fd_jacobian(const ResidualFn& r, const Vector& x, const Vector& rx, double fd_step) {
  const double step = fd_step * (1.0 + inf_norm(x));
  Matrix jac(rx.size(), x.size());
  Vector xp = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    xp[j] = x[j] + step;
    jac.col(j) = (r(xp) - rx) / step;
    xp[j] = x[j];
  }
  return jac;
}

NewtonResult newton_solve(const ResidualFn& residual, const JacobianFn& jacobian,
                          const Vector& x_init, const SolverConfig& cfg) {
  cfg.validate();
  Vector x = x_init;
  Vector r = residual(x);
  if (r.size() != x.size()) throw DomainError("Newton residual must be square");
  double norm = inf_norm(r);

  for (int it = 0; it < cfg.max_iter; ++it) {
    if (converged(r, x, cfg.tol)) return {x, it, norm};
    if (!std::isfinite(norm)) throw ConvergenceError(norm, it);

    const Matrix jac = jacobian ? jacobian(x) : fd_jacobian(residual, x, r, cfg.fd_step);
    Eigen::FullPivLU<Matrix> lu(jac);
    if (!lu.isInvertible()) {
      throw SingularJacobianError("Newton matrix is singular (rank " +
                                  std::to_string(lu.rank()) + " of " +
                                  std::to_string(jac.rows()) + ")");
    }
    const Vector dx = lu.solve(-r);

    double lambda = 1.0;
    Vector x_new = x + dx;
    Vector r_new = residual(x_new);
    for (int halvings = 0; halvings < 20 && !(inf_norm(r_new) <= norm); ++halvings) {
      lambda *= 0.5;
      x_new = x + lambda * dx;
      r_new = residual(x_new);
    }
    x = std::move(x_new);
    r = std::move(r_new);
    norm = inf_norm(r);
  }
  if (converged(r, x, cfg.tol)) return {x, cfg.max_iter, norm};
  throw ConvergenceError(norm, cfg.max_iter);
}

}  // namespace dembed
