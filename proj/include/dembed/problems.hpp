/// \file
/// Named test problems used by the command-line harness.

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dembed/embeddings.hpp"
#include "dembed/variational.hpp"

namespace dembed {

struct OdeProblem {
  std::string name;
  ODEField field;
  Vector default_x0;
  /// x(t) for the initial value x(a) = x0; empty when no closed form exists.
  std::function<Vector(double t, double a, const Vector& x0)> reference;
};

struct LagrangianProblem {
  std::string name;
  LagrangianFn lagrangian;
  Vector default_x0;
  Vector default_v0;
};

/// exp, decay, logistic, harmonic2d, pendulum
const std::vector<OdeProblem>& ode_problems();
/// harmonic, pendulum_lag, free
const std::vector<LagrangianProblem>& lagrangian_problems();

/// nullptr when the name is unknown.
const OdeProblem* find_ode_problem(const std::string& name);
const LagrangianProblem* find_lagrangian_problem(const std::string& name);

}  // namespace dembed
