/// \file
/// Convergence-order studies and long-run energy summaries.

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dembed/problems.hpp"

namespace dembed {

/// Slope of the least-squares line through (xs[i], ys[i]).
double least_squares_slope(std::span<const double> xs, std::span<const double> ys);

struct ConvergenceRow {
  int steps = 0;
  double h = 0.0;
  /// max_k |X_k - x(t_k)|_inf
  double error_sup = 0.0;
  /// log(e_prev / e) / log(h_prev / h); unset on the first row.
  std::optional<double> order_estimate;
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;
  /// Least-squares slope of log(error) against log(h).
  double slope = 0.0;
};

/// Integrates `problem` with `scheme` for each step count and compares with
/// the reference solution. Throws DomainError when the problem has none.
ConvergenceStudy convergence_study(const OdeProblem& problem, SchemeKind scheme, double a,
                                   double b, const Vector& x0, const std::vector<int>& steps,
                                   const SolverConfig& cfg = {});

struct EnergySummary {
  double max_deviation = 0.0;  ///< max_k |E_k - E_0|
  double drift_slope = 0.0;    ///< least-squares slope of E_k against t_k
};

/// Summarises a Plus-supported scalar energy series.
EnergySummary summarize_energy(const DiscreteFunction& energy);

}  // namespace dembed
