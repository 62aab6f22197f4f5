/// \file
/// Variational discrete embedding of a Lagrangian L(t, x, v).
///
/// The discrete action is [J_Delta(L(T, X, Delta X))]_N. Its critical points
/// over fixed endpoints solve the discrete Euler-Lagrange equation
///
///   (p_k - p_{k-1}) / h = dL/dx(t_k, X_k, (Delta X)_k),   k = 1..N-1,
///   p_k = dL/dv(t_k, X_k, (Delta X)_k),
///
/// which, marched forward from (X_0, X_1), is a variational integrator.
/// For L = |v|^2/2 - V(x) this is the leapfrog recurrence
/// X_{k+1} = 2 X_k - X_{k-1} - h^2 grad V(X_k).

#pragma once

#include <functional>
#include <optional>

#include "dembed/embeddings.hpp"
#include "dembed/grid.hpp"
#include "dembed/newton.hpp"

namespace dembed {

class LagrangianFn {
 public:
  using Value = std::function<double(double, const Vector&, const Vector&)>;
  using Partial = std::function<Vector(double, const Vector&, const Vector&)>;

  /// Missing partials fall back to central differences with step fd_step.
  /// Supplied partials are compared against central differences at 8 seeded
  /// random points and rejected (DomainError) when they disagree by more
  /// than 1e-5 relative.
  LagrangianFn(int dim, Value value, Partial d_dx = {}, Partial d_dv = {}, double fd_step = 1e-6);

  /// L = |v|^2 / 2 - V(x), with grad V known. Enables the closed-form
  /// leapfrog step and exact Newton matrices.
  static LagrangianFn separable(int dim, std::function<double(const Vector&)> potential,
                                std::function<Vector(const Vector&)> potential_gradient);

  int dim() const { return dim_; }
  double operator()(double t, const Vector& x, const Vector& v) const;
  Vector d_dx(double t, const Vector& x, const Vector& v) const;
  Vector d_dv(double t, const Vector& x, const Vector& v) const;
  bool has_analytic_partials() const { return static_cast<bool>(d_dx_) && static_cast<bool>(d_dv_); }

  bool is_separable() const { return static_cast<bool>(potential_gradient_); }
  /// grad V for separable Lagrangians; empty otherwise.
  const std::function<Vector(const Vector&)>& potential_gradient() const {
    return potential_gradient_;
  }

 private:
  int dim_;
  Value value_;
  Partial d_dx_;
  Partial d_dv_;
  double fd_step_;
  std::function<Vector(const Vector&)> potential_gradient_;
};

/// h sum_{k<N} L(t_k, X_k, (Delta X)_k), via the Delta antiderivative.
double action_delta(const LagrangianFn& lagrangian, const DiscreteFunction& x);

/// sum_{k<N} L_d(X_k, X_{k+1}) with L_d(x, y) = h L(t_k, x, (y - x)/h).
/// Coded independently of action_delta; the two must agree.
double action_marsden_west(const LagrangianFn& lagrangian, const DiscreteFunction& x);

/// Directional derivative of action_delta at X along H:
/// [J_Delta(dL/dv * Delta H + dL/dx * H)]_N.
double frechet_derivative(const LagrangianFn& lagrangian, const DiscreteFunction& x,
                          const DiscreteFunction& h);

/// Same quantity after summation by parts, valid for boundary-zero H:
/// h sum_{k=1}^{N-1} <-(nabla p)_k + dL/dx_k, H_k>. Throws DomainError when
/// H does not vanish at both ends.
double frechet_derivative_by_parts(const LagrangianFn& lagrangian, const DiscreteFunction& x,
                                   const DiscreteFunction& h);

/// R_k = (p_k - p_{k-1})/h - dL/dx(t_k, X_k, (Delta X)_k) on Interior.
DiscreteFunction del_residual(const LagrangianFn& lagrangian, const DiscreteFunction& x);

/// h * R_k computed from the slot derivatives of L_d:
/// -(D_2 L_d(X_{k-1}, X_k) + D_1 L_d(X_k, X_{k+1})). Interior support.
DiscreteFunction marsden_west_residual(const LagrangianFn& lagrangian, const DiscreteFunction& x);

struct DelOptions {
  /// Take the explicit leapfrog step for separable Lagrangians instead of
  /// running Newton.
  bool closed_form_leapfrog = true;
};

/// Marches R_k = 0 for X_{k+1}, k = 1..N-1, from X_0 = x0 and X_1 = x1.
/// Throws DegeneracyError when the Newton matrix (d2L/dv2 / h^2 - ...) is
/// singular and StepFailure on non-convergence.
Trajectory del_integrate(const LagrangianFn& lagrangian, const Vector& x0, const Vector& x1,
                         const TimeGrid& grid, const SolverConfig& cfg = {},
                         const DelOptions& options = {});

/// del_integrate with X_1 = x0 + h v0.
Trajectory del_integrate_velocity(const LagrangianFn& lagrangian, const Vector& x0,
                                  const Vector& v0, const TimeGrid& grid,
                                  const SolverConfig& cfg = {}, const DelOptions& options = {});

/// Fixed-endpoint problem: X_0 = x0, X_N = xn, interior solved by Newton on
/// the stacked residual starting from the straight line.
Trajectory del_solve_bvp(const LagrangianFn& lagrangian, const Vector& x0, const Vector& xn,
                         const TimeGrid& grid, const SolverConfig& cfg = {});

struct CriticalPointResult {
  /// |del_residual|_inf <= tol
  bool critical = false;
  double residual_sup = 0.0;
  /// max |frechet_derivative(X)(H)| over the sampled boundary-zero H.
  double max_sampled_variation = 0.0;
};

/// Decides criticality from the residual and reports the Frechet derivative
/// along `samples` seeded random boundary-zero directions.
CriticalPointResult critical_point_check(const LagrangianFn& lagrangian,
                                         const DiscreteFunction& x, double tol,
                                         int samples = 20, unsigned seed = 20240611u);

/// E_k = <dL/dv, (Delta X)_k> - L at (t_k, X_k, (Delta X)_k), on Plus.
DiscreteFunction energy_diagnostic(const LagrangianFn& lagrangian, const DiscreteFunction& x);

}  // namespace dembed
