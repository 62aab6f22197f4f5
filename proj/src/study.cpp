#include "dembed/study.hpp"

#include <algorithm>
#include <cmath>

#include "dembed/errors.hpp"

namespace dembed {

double least_squares_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw DomainError("least-squares slope needs at least two matching points");
  }
  const auto n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

ConvergenceStudy convergence_study(const OdeProblem& problem, SchemeKind scheme, double a,
                                   double b, const Vector& x0, const std::vector<int>& steps,
                                   const SolverConfig& cfg) {
  if (!problem.reference) {
    throw DomainError("problem '" + problem.name + "' has no reference solution");
  }
  ConvergenceStudy study;
  std::vector<double> log_h;
  std::vector<double> log_e;
  for (int n : steps) {
    const TimeGrid grid(a, b, n);
    const auto run = integrate(problem.field, x0, grid, scheme, cfg);
    double err = 0.0;
    for (int k = 0; k <= n; ++k) {
      const Vector exact = problem.reference(grid.node(k), a, x0);
      for (int c = 0; c < problem.field.dim; ++c) {
        err = std::max(err, std::abs(run.path(k, c) - exact[c]));
      }
    }
    ConvergenceRow row{n, grid.h(), err, std::nullopt};
    if (!study.rows.empty()) {
      const auto& prev = study.rows.back();
      row.order_estimate = std::log(prev.error_sup / err) / std::log(prev.h / grid.h());
    }
    study.rows.push_back(row);
    log_h.push_back(std::log(grid.h()));
    log_e.push_back(std::log(err));
  }
  if (study.rows.size() >= 2) study.slope = least_squares_slope(log_h, log_e);
  return study;
}

EnergySummary summarize_energy(const DiscreteFunction& energy) {
  require_support(energy, Support::Plus, "summarize_energy");
  std::vector<double> t;
  std::vector<double> e;
  for (int k = 0; k <= energy.last_index(); ++k) {
    t.push_back(energy.grid().node(k));
    e.push_back(energy(k));
  }
  EnergySummary summary;
  for (double v : e) summary.max_deviation = std::max(summary.max_deviation, std::abs(v - e[0]));
  if (e.size() >= 2) summary.drift_slope = least_squares_slope(t, e);
  return summary;
}

}  // namespace dembed
