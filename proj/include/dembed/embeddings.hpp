/// \file
/// Differential and integral discrete embeddings of dx/dt = f(t, x).
///
/// The differential embedding replaces d/dt by a discrete derivative and asks
/// D X = f(T, X); the integral embedding replaces the integral by the
/// matching discrete antiderivative and asks X = X_0 + J(f(T, X)). Both are
/// solved block by block, left to right:
///
///   Delta*     X_{k+1} = X_k + h f_k                       (forward Euler)
///   Nabla*     X_k = X_{k-1} + h f_k                       (backward Euler)
///   Delta2*    X_{2k+1} = X_{2k} + h (f_{2k} + f_{2k+1})/2 (trapezoidal)
///              X_{2k+2} = X_{2k} + 2h f_{2k+1}             (midpoint)
///   Delta3*    X_{3k+2} = X_{3k} + h/3 (f + 4f + f)        (forward Simpson)
///
/// Delta2Differential and Delta3Differential solve the block stencil rows
/// as one coupled Newton system; the integral variants solve only the rows
/// that are implicit and close the block explicitly.

#pragma once

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "dembed/grid.hpp"
#include "dembed/newton.hpp"

namespace dembed {

struct ODEField {
  int dim = 1;
  std::function<Vector(double, const Vector&)> rhs;
  /// Optional; forward differences with SolverConfig::fd_step otherwise.
  std::function<Matrix(double, const Vector&)> jacobian;
};

enum class SchemeKind {
  DeltaDifferential,
  NablaDifferential,
  DeltaIntegral,
  NablaIntegral,
  Delta2Differential,
  Delta2Integral,
  Delta3Differential,
  Delta3Integral,
};

std::string_view to_string(SchemeKind kind);
/// Case-sensitive parse of the names printed by to_string.
std::optional<SchemeKind> parse_scheme(std::string_view name);
const std::vector<SchemeKind>& all_schemes();
/// Interpolation order: 1, 2 or 3.
int scheme_order(SchemeKind kind);
/// N must be a multiple of this (1, 2 or 3).
int scheme_block_width(SchemeKind kind);
bool is_differential(SchemeKind kind);

/// Throws DivisibilityError when N is not a multiple of the scheme block.
void require_compatible(SchemeKind kind, const TimeGrid& grid);

struct Trajectory {
  DiscreteFunction path;
  /// Unset for variational trajectories.
  std::optional<SchemeKind> scheme;
  /// Newton updates used per solved step (one entry per block or DEL step).
  std::vector<int> newton_iterations;
};

/// Marches the scheme from x0 over the grid. Throws StepFailure naming the
/// first node of the block that could not be solved.
Trajectory integrate(const ODEField& ode, const Vector& x0, const TimeGrid& grid,
                     SchemeKind scheme, const SolverConfig& cfg = {});

/// Residual of the scheme's defining equations, computed with the operators
/// module: D X - f(T, X) on the derivative's support for differential kinds,
/// X - X_0 - J(f(T, X)) on Full for integral kinds.
DiscreteFunction scheme_residual(const ODEField& ode, const DiscreteFunction& x,
                                 SchemeKind scheme);

struct CoherenceReport {
  int order = 1;
  /// max_k |X^diff_k - X^int_k|_inf
  double max_node_discrepancy = 0.0;
  /// max_node_discrepancy <= 100 * cfg.tol
  bool coherent = false;
  /// What the literature claims for this order (orders 1 and 3 coherent,
  /// order 2 not). Reported, never asserted.
  bool claimed_coherent = false;
};

CoherenceReport coherence_check(const ODEField& ode, const Vector& x0, const TimeGrid& grid,
                                int order, const SolverConfig& cfg = {});

/// f evaluated along X at every node of X's support (EvaluationError on failure).
DiscreteFunction evaluate_field(const ODEField& ode, const DiscreteFunction& x);

}  // namespace dembed
