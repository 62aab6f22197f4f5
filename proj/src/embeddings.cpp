#include "dembed/embeddings.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "dembed/errors.hpp"
#include "dembed/operators.hpp"

namespace dembed {

namespace {

constexpr std::array<std::pair<SchemeKind, std::string_view>, 8> kSchemeNames{{
    {SchemeKind::DeltaDifferential, "DeltaDifferential"},
    {SchemeKind::NablaDifferential, "NablaDifferential"},
    {SchemeKind::DeltaIntegral, "DeltaIntegral"},
    {SchemeKind::NablaIntegral, "NablaIntegral"},
    {SchemeKind::Delta2Differential, "Delta2Differential"},
    {SchemeKind::Delta2Integral, "Delta2Integral"},
    {SchemeKind::Delta3Differential, "Delta3Differential"},
    {SchemeKind::Delta3Integral, "Delta3Integral"},
}};

}  // namespace

std::string_view to_string(SchemeKind kind) {
  for (const auto& [k, name] : kSchemeNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<SchemeKind> parse_scheme(std::string_view name) {
  for (const auto& [k, n] : kSchemeNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

const std::vector<SchemeKind>& all_schemes() {
  static const std::vector<SchemeKind> schemes = [] {
    std::vector<SchemeKind> out;
    for (const auto& entry : kSchemeNames) out.push_back(entry.first);
    return out;
  }();
  return schemes;
}

int scheme_order(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::Delta2Differential:
    case SchemeKind::Delta2Integral: return 2;
    case SchemeKind::Delta3Differential:
    case SchemeKind::Delta3Integral: return 3;
    default: return 1;
  }
}

int scheme_block_width(SchemeKind kind) { return scheme_order(kind); }

bool is_differential(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::DeltaDifferential:
    case SchemeKind::NablaDifferential:
    case SchemeKind::Delta2Differential:
    case SchemeKind::Delta3Differential: return true;
    default: return false;
  }
}

void require_compatible(SchemeKind kind, const TimeGrid& grid) {
  const int w = scheme_block_width(kind);
  if (grid.steps() % w != 0) {
    throw DivisibilityError(std::string(to_string(kind)) + " needs N divisible by " +
                            std::to_string(w) + ", got N = " + std::to_string(grid.steps()));
  }
}

namespace {

// One block of `width` steps starting at a known X_0.
//
// Rows 0..implicit-1 are solved together for X_1..X_implicit:
//   sum_j alpha[i][j] X_j - sum_j beta[i][j] f(t_j, X_j) = 0
// then nodes implicit+1..width are closed explicitly:
//   X_j = X_0 + sum_l closing[j - implicit - 1][l] f(t_l, X_l),  l <= implicit.
// All coefficients already carry their powers of h.
struct BlockRule {
  int width = 1;
  int implicit = 0;
  std::vector<std::vector<double>> alpha;
  std::vector<std::vector<double>> beta;
  std::vector<std::vector<double>> closing;
};

BlockRule make_rule(SchemeKind kind, double h) {
  switch (kind) {
    case SchemeKind::DeltaDifferential:
    case SchemeKind::DeltaIntegral:
      return {1, 0, {}, {}, {{h}}};
    case SchemeKind::NablaDifferential:
      return {1, 1, {{-1.0 / h, 1.0 / h}}, {{0.0, 1.0}}, {}};
    case SchemeKind::NablaIntegral:
      return {1, 1, {{-1.0, 1.0}}, {{0.0, h}}, {}};
    case SchemeKind::Delta2Differential:
      return {2,
              2,
              {{-1.5 / h, 2.0 / h, -0.5 / h}, {-0.5 / h, 0.0, 0.5 / h}},
              {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}},
              {}};
    case SchemeKind::Delta2Integral:
      return {2, 1, {{-1.0, 1.0, 0.0}}, {{h / 2.0, h / 2.0, 0.0}}, {{0.0, 2.0 * h}}};
    case SchemeKind::Delta3Differential: {
      const double s = 1.0 / (6.0 * h);
      return {3,
              3,
              {{-11.0 * s, 18.0 * s, -9.0 * s, 2.0 * s},
               {-2.0 * s, -3.0 * s, 6.0 * s, -1.0 * s},
               {1.0 * s, -6.0 * s, 3.0 * s, 2.0 * s}},
              {{1.0, 0.0, 0.0, 0.0}, {0.0, 1.0, 0.0, 0.0}, {0.0, 0.0, 1.0, 0.0}},
              {}};
    }
    case SchemeKind::Delta3Integral:
      return {3,
              2,
              {{-1.0, 1.0, 0.0, 0.0}, {-1.0, 0.0, 1.0, 0.0}},
              {{5.0 * h / 12.0, 8.0 * h / 12.0, -h / 12.0, 0.0},
               {h / 3.0, 4.0 * h / 3.0, h / 3.0, 0.0}},
              {{3.0 * h / 4.0, 0.0, 9.0 * h / 4.0}}};
  }
  throw DomainError("unknown scheme");
}

Vector eval_rhs(const ODEField& ode, double t, const Vector& x) {
  Vector f = ode.rhs(t, x);
  if (f.size() != ode.dim) throw DomainError("ODE right-hand side returned wrong dimension");
  return f;
}

Matrix rhs_jacobian(const ODEField& ode, double t, const Vector& x, const Vector& fx,
                    const SolverConfig& cfg) {
  if (ode.jacobian) return ode.jacobian(t, x);
  return fd_jacobian([&](const Vector& y) { return eval_rhs(ode, t, y); }, x, fx, cfg.fd_step);
}

}  // namespace

Trajectory integrate(const ODEField& ode, const Vector& x0, const TimeGrid& grid,
                     SchemeKind scheme, const SolverConfig& cfg) {
  cfg.validate();
  require_compatible(scheme, grid);
  if (!ode.rhs) throw DomainError("ODE field has no right-hand side");
  if (x0.size() != ode.dim) throw DomainError("initial condition has wrong dimension");

  const BlockRule rule = make_rule(scheme, grid.h());
  const int d = ode.dim;
  const int n = grid.steps();
  std::vector<Vector> x(static_cast<size_t>(n + 1));
  x[0] = x0;
  std::vector<int> iterations;

  for (int start = 0; start < n; start += rule.width) {
    try {
      std::vector<double> t(static_cast<size_t>(rule.width + 1));
      for (int j = 0; j <= rule.width; ++j) t[static_cast<size_t>(j)] = grid.node(start + j);
      const Vector& xs = x[static_cast<size_t>(start)];
      std::vector<Vector> f(static_cast<size_t>(rule.width + 1));
      f[0] = eval_rhs(ode, t[0], xs);
      if (!f[0].allFinite()) throw DomainError("non-finite right-hand side");

      const int m = rule.implicit;
      if (m > 0) {
        const auto unpack = [&](const Vector& z, int j) -> Vector {
          return z.segment(static_cast<Eigen::Index>(j - 1) * d, d);
        };
        const ResidualFn residual = [&](const Vector& z) {
          std::vector<Vector> fz(static_cast<size_t>(m + 1));
          fz[0] = f[0];
          for (int j = 1; j <= m; ++j) fz[static_cast<size_t>(j)] = eval_rhs(ode, t[static_cast<size_t>(j)], unpack(z, j));
          Vector r = Vector::Zero(static_cast<Eigen::Index>(m) * d);
          for (int i = 0; i < m; ++i) {
            auto row = r.segment(static_cast<Eigen::Index>(i) * d, d);
            const auto& a = rule.alpha[static_cast<size_t>(i)];
            const auto& b = rule.beta[static_cast<size_t>(i)];
            row += a[0] * xs - b[0] * fz[0];
            for (int j = 1; j <= m; ++j) {
              row += a[static_cast<size_t>(j)] * unpack(z, j) - b[static_cast<size_t>(j)] * fz[static_cast<size_t>(j)];
            }
          }
          return r;
        };
        const JacobianFn jacobian = [&](const Vector& z) {
          Matrix jac = Matrix::Zero(static_cast<Eigen::Index>(m) * d, static_cast<Eigen::Index>(m) * d);
          const Matrix id = Matrix::Identity(d, d);
          for (int j = 1; j <= m; ++j) {
            const Vector xj = unpack(z, j);
            const double tj = t[static_cast<size_t>(j)];
            const Matrix jf = rhs_jacobian(ode, tj, xj, eval_rhs(ode, tj, xj), cfg);
            for (int i = 0; i < m; ++i) {
              jac.block(static_cast<Eigen::Index>(i) * d, static_cast<Eigen::Index>(j - 1) * d, d, d) =
                  rule.alpha[static_cast<size_t>(i)][static_cast<size_t>(j)] * id -
                  rule.beta[static_cast<size_t>(i)][static_cast<size_t>(j)] * jf;
            }
          }
          return jac;
        };

        // explicit Euler predictor
        Vector guess(static_cast<Eigen::Index>(m) * d);
        for (int j = 1; j <= m; ++j) {
          guess.segment(static_cast<Eigen::Index>(j - 1) * d, d) = xs + (j * grid.h()) * f[0];
        }
        const NewtonResult solved = newton_solve(residual, jacobian, guess, cfg);
        iterations.push_back(solved.iterations);
        for (int j = 1; j <= m; ++j) {
          x[static_cast<size_t>(start + j)] = unpack(solved.x, j);
          f[static_cast<size_t>(j)] = eval_rhs(ode, t[static_cast<size_t>(j)], x[static_cast<size_t>(start + j)]);
        }
      } else {
        iterations.push_back(0);
      }

      for (size_t r = 0; r < rule.closing.size(); ++r) {
        const auto& c = rule.closing[r];
        Vector increment = Vector::Zero(d);
        for (size_t l = 0; l < c.size(); ++l) {
          if (c[l] != 0.0) increment += c[l] * f[l];
        }
        const int node = start + m + 1 + static_cast<int>(r);
        x[static_cast<size_t>(node)] = xs + increment;
        if (!x[static_cast<size_t>(node)].allFinite()) throw DomainError("non-finite state");
      }
    } catch (const StepFailure&) {
      throw;
    } catch (const std::exception& e) {
      throw StepFailure(start, e.what());
    }
  }

  std::vector<double> values;
  values.reserve(static_cast<size_t>(n + 1) * static_cast<size_t>(d));
  for (const auto& xk : x) values.insert(values.end(), xk.data(), xk.data() + xk.size());
  return {DiscreteFunction(grid, Support::Full, d, std::move(values)), scheme,
          std::move(iterations)};
}

DiscreteFunction evaluate_field(const ODEField& ode, const DiscreteFunction& x) {
  std::vector<double> values;
  values.reserve(x.values().size());
  for (int k = x.first_index(); k <= x.last_index(); ++k) {
    const auto xk = x.at(k);
    Vector state = Eigen::Map<const Vector>(xk.data(), static_cast<Eigen::Index>(xk.size()));
    Vector f;
    try {
      f = eval_rhs(ode, x.grid().node(k), state);
    } catch (const std::exception& e) {
      throw EvaluationError(k, e.what());
    }
    values.insert(values.end(), f.data(), f.data() + f.size());
  }
  return {x.grid(), x.support(), ode.dim, std::move(values)};
}

DiscreteFunction scheme_residual(const ODEField& ode, const DiscreteFunction& x,
                                 SchemeKind scheme) {
  require_support(x, Support::Full, "scheme_residual");
  require_compatible(scheme, x.grid());
  const DiscreteFunction f = evaluate_field(ode, x);
  switch (scheme) {
    case SchemeKind::DeltaDifferential: return delta(x) - restrict_to(f, Support::Plus);
    case SchemeKind::NablaDifferential: return nabla(x) - restrict_to(f, Support::Minus);
    case SchemeKind::Delta2Differential: return delta2(x) - restrict_to(f, Support::Plus);
    case SchemeKind::Delta3Differential: return delta3(x) - restrict_to(f, Support::Plus);
    default: break;
  }
  const DiscreteFunction x0 = constant_lift(x.at(0), x.grid());
  switch (scheme) {
    case SchemeKind::DeltaIntegral: return x - x0 - j_delta(f);
    case SchemeKind::NablaIntegral: return x - x0 - j_nabla(f);
    case SchemeKind::Delta2Integral: return x - x0 - j_delta2(f);
    case SchemeKind::Delta3Integral: return x - x0 - j_delta3(f);
    default: break;
  }
  throw DomainError("unknown scheme");
}

CoherenceReport coherence_check(const ODEField& ode, const Vector& x0, const TimeGrid& grid,
                                int order, const SolverConfig& cfg) {
  SchemeKind differential{};
  SchemeKind integral{};
  switch (order) {
    case 1:
      differential = SchemeKind::DeltaDifferential;
      integral = SchemeKind::DeltaIntegral;
      break;
    case 2:
      differential = SchemeKind::Delta2Differential;
      integral = SchemeKind::Delta2Integral;
      break;
    case 3:
      differential = SchemeKind::Delta3Differential;
      integral = SchemeKind::Delta3Integral;
      break;
    default: throw DomainError("coherence order must be 1, 2 or 3");
  }
  const auto xd = integrate(ode, x0, grid, differential, cfg);
  const auto xi = integrate(ode, x0, grid, integral, cfg);
  CoherenceReport report;
  report.order = order;
  report.max_node_discrepancy = sup_distance(xd.path, xi.path);
  report.coherent = report.max_node_discrepancy <= 100.0 * cfg.tol;
  report.claimed_coherent = order != 2;
  return report;
}

}  // namespace dembed
