#include "dembed/variational.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "dembed/detail/compensated_sum.hpp"
#include "dembed/errors.hpp"
#include "dembed/operators.hpp"

namespace dembed {

namespace {

Vector central_gradient(const std::function<double(const Vector&)>& g, const Vector& at,
                        double fd_step) {
  Vector grad(at.size());
  Vector probe = at;
  for (Eigen::Index i = 0; i < at.size(); ++i) {
    const double step = fd_step * (1.0 + std::abs(at[i]));
    probe[i] = at[i] + step;
    const double up = g(probe);
    probe[i] = at[i] - step;
    const double down = g(probe);
    probe[i] = at[i];
    grad[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

Vector node_vector(const DiscreteFunction& f, int k) {
  const auto s = f.at(k);
  return Eigen::Map<const Vector>(s.data(), static_cast<Eigen::Index>(s.size()));
}

DiscreteFunction from_vectors(const TimeGrid& grid, Support support, int dim,
                              const std::vector<Vector>& rows) {
  std::vector<double> values;
  values.reserve(rows.size() * static_cast<size_t>(dim));
  for (const auto& r : rows) values.insert(values.end(), r.data(), r.data() + r.size());
  return {grid, support, dim, std::move(values)};
}

void require_path(const LagrangianFn& lagrangian, const DiscreteFunction& x, const char* op) {
  require_support(x, Support::Full, op);
  if (x.dim() != lagrangian.dim()) {
    throw CombinabilityError(std::string(op) + ": trajectory dim does not match Lagrangian");
  }
}

// (t_k, X_k, (Delta X)_k) for k = 0..N-1
struct PlusSamples {
  std::vector<double> t;
  std::vector<Vector> x;
  std::vector<Vector> v;
};

PlusSamples plus_samples(const DiscreteFunction& x) {
  const int n = x.grid().steps();
  const DiscreteFunction dx = delta(x);
  PlusSamples s;
  for (int k = 0; k < n; ++k) {
    s.t.push_back(x.grid().node(k));
    s.x.push_back(node_vector(x, k));
    s.v.push_back(node_vector(dx, k));
  }
  return s;
}

}  // namespace

LagrangianFn::LagrangianFn(int dim, Value value, Partial d_dx, Partial d_dv, double fd_step)
    : dim_(dim), value_(std::move(value)), d_dx_(std::move(d_dx)), d_dv_(std::move(d_dv)),
      fd_step_(fd_step) {
  if (dim < 1) throw DomainError("Lagrangian needs dim >= 1");
  if (!value_) throw DomainError("Lagrangian needs a value function");
  if (!(fd_step > 0.0)) throw DomainError("Lagrangian fd_step must be positive");
  if (!d_dx_ && !d_dv_) return;

  std::mt19937_64 rng(0x5eed1a9ULL);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const auto close = [](const Vector& analytic, const Vector& numeric) {
    for (Eigen::Index i = 0; i < analytic.size(); ++i) {
      if (std::abs(analytic[i] - numeric[i]) > 1e-5 * std::max(1.0, std::abs(analytic[i]))) {
        return false;
      }
    }
    return true;
  };
  for (int sample = 0; sample < 8; ++sample) {
    const double t = 0.5 * (unit(rng) + 1.0);
    Vector x(dim);
    Vector v(dim);
    for (int i = 0; i < dim; ++i) x[i] = unit(rng);
    for (int i = 0; i < dim; ++i) v[i] = unit(rng);
    if (d_dx_) {
      const Vector numeric =
          central_gradient([&](const Vector& y) { return value_(t, y, v); }, x, fd_step_);
      if (!close(d_dx_(t, x, v), numeric)) {
        throw DomainError("supplied dL/dx disagrees with finite differences of L");
      }
    }
    if (d_dv_) {
      const Vector numeric =
          central_gradient([&](const Vector& w) { return value_(t, x, w); }, v, fd_step_);
      if (!close(d_dv_(t, x, v), numeric)) {
        throw DomainError("supplied dL/dv disagrees with finite differences of L");
      }
    }
  }
}

LagrangianFn LagrangianFn::separable(int dim, std::function<double(const Vector&)> potential,
                                     std::function<Vector(const Vector&)> potential_gradient) {
  LagrangianFn lagrangian(
      dim,
      [potential](double, const Vector& x, const Vector& v) {
        return 0.5 * v.squaredNorm() - potential(x);
      },
      [potential_gradient](double, const Vector& x, const Vector&) -> Vector {
        return -potential_gradient(x);
      },
      [](double, const Vector&, const Vector& v) -> Vector { return v; });
  lagrangian.potential_gradient_ = std::move(potential_gradient);
  return lagrangian;
}

double LagrangianFn::operator()(double t, const Vector& x, const Vector& v) const {
  return value_(t, x, v);
}

Vector LagrangianFn::d_dx(double t, const Vector& x, const Vector& v) const {
  if (d_dx_) return d_dx_(t, x, v);
  return central_gradient([&](const Vector& y) { return value_(t, y, v); }, x, fd_step_);
}

Vector LagrangianFn::d_dv(double t, const Vector& x, const Vector& v) const {
  if (d_dv_) return d_dv_(t, x, v);
  return central_gradient([&](const Vector& w) { return value_(t, x, w); }, v, fd_step_);
}

double action_delta(const LagrangianFn& lagrangian, const DiscreteFunction& x) {
  require_path(lagrangian, x, "action_delta");
  const PlusSamples s = plus_samples(x);
  std::vector<double> values;
  for (size_t k = 0; k < s.t.size(); ++k) values.push_back(lagrangian(s.t[k], s.x[k], s.v[k]));
  const auto integrand = DiscreteFunction::scalar(x.grid(), Support::Plus, std::move(values));
  return j_delta(integrand)(x.grid().steps());
}

double action_marsden_west(const LagrangianFn& lagrangian, const DiscreteFunction& x) {
  require_path(lagrangian, x, "action_marsden_west");
  const TimeGrid& grid = x.grid();
  const double h = grid.h();
  const auto discrete_lagrangian = [&](int k, const Vector& from, const Vector& to) {
    return h * lagrangian(grid.node(k), from, (to - from) / h);
  };
  detail::CompensatedSum sum;
  for (int k = 0; k < grid.steps(); ++k) {
    sum.add(discrete_lagrangian(k, node_vector(x, k), node_vector(x, k + 1)));
  }
  return sum.value();
}

double frechet_derivative(const LagrangianFn& lagrangian, const DiscreteFunction& x,
                          const DiscreteFunction& h) {
  require_path(lagrangian, x, "frechet_derivative");
  require_combinable(x, h);
  const PlusSamples s = plus_samples(x);
  std::vector<Vector> p;
  std::vector<Vector> lx;
  for (size_t k = 0; k < s.t.size(); ++k) {
    p.push_back(lagrangian.d_dv(s.t[k], s.x[k], s.v[k]));
    lx.push_back(lagrangian.d_dx(s.t[k], s.x[k], s.v[k]));
  }
  const int d = x.dim();
  const auto momentum = from_vectors(x.grid(), Support::Plus, d, p);
  const auto force = from_vectors(x.grid(), Support::Plus, d, lx);
  const auto integrand =
      pair_star(momentum, delta(h)) + pair_star(force, restrict_to(h, Support::Plus));
  return j_delta(integrand)(x.grid().steps());
}

double frechet_derivative_by_parts(const LagrangianFn& lagrangian, const DiscreteFunction& x,
                                   const DiscreteFunction& h) {
  require_path(lagrangian, x, "frechet_derivative_by_parts");
  require_combinable(x, h);
  if (!is_boundary_zero(h)) throw DomainError("variation must vanish at both endpoints");
  const TimeGrid& grid = x.grid();
  const double step = grid.h();
  const PlusSamples s = plus_samples(x);
  detail::CompensatedSum sum;
  for (int k = 1; k < grid.steps(); ++k) {
    const auto kk = static_cast<size_t>(k);
    const Vector p_now = lagrangian.d_dv(s.t[kk], s.x[kk], s.v[kk]);
    const Vector p_prev = lagrangian.d_dv(s.t[kk - 1], s.x[kk - 1], s.v[kk - 1]);
    const Vector lx = lagrangian.d_dx(s.t[kk], s.x[kk], s.v[kk]);
    sum.add((-(p_now - p_prev) / step + lx).dot(node_vector(h, k)));
  }
  return step * sum.value();
}

DiscreteFunction del_residual(const LagrangianFn& lagrangian, const DiscreteFunction& x) {
  require_path(lagrangian, x, "del_residual");
  const int d = x.dim();
  const PlusSamples s = plus_samples(x);
  std::vector<Vector> p;
  std::vector<Vector> lx;
  for (size_t k = 0; k < s.t.size(); ++k) {
    p.push_back(lagrangian.d_dv(s.t[k], s.x[k], s.v[k]));
    lx.push_back(lagrangian.d_dx(s.t[k], s.x[k], s.v[k]));
  }
  const auto momentum = from_vectors(x.grid(), Support::Plus, d, p);
  const auto force = from_vectors(x.grid(), Support::Plus, d, lx);
  // (nabla p)_k on 1..N-1 as (p_k - p_{k-1}) / h, with p_{k-1} = sigma(p)_k
  const auto nabla_p = (1.0 / x.grid().h()) * (restrict_to(momentum, Support::Interior) -
                                               restrict_to(sigma(momentum), Support::Interior));
  return nabla_p - restrict_to(force, Support::Interior);
}

DiscreteFunction marsden_west_residual(const LagrangianFn& lagrangian,
                                       const DiscreteFunction& x) {
  require_path(lagrangian, x, "marsden_west_residual");
  const TimeGrid& grid = x.grid();
  const double h = grid.h();
  // L_d(a, b) = h L(t, a, (b - a)/h)
  const auto slot1 = [&](double t, const Vector& a, const Vector& b) -> Vector {
    const Vector v = (b - a) / h;
    return h * lagrangian.d_dx(t, a, v) - lagrangian.d_dv(t, a, v);
  };
  const auto slot2 = [&](double t, const Vector& a, const Vector& b) -> Vector {
    return lagrangian.d_dv(t, a, (b - a) / h);
  };
  std::vector<Vector> rows;
  for (int k = 1; k < grid.steps(); ++k) {
    const Vector prev = node_vector(x, k - 1);
    const Vector here = node_vector(x, k);
    const Vector next = node_vector(x, k + 1);
    rows.push_back(-(slot2(grid.node(k - 1), prev, here) + slot1(grid.node(k), here, next)));
  }
  return from_vectors(grid, Support::Interior, x.dim(), rows);
}

namespace {

// h^2 R_k as a function of X_{k+1}, keeping the Newton residual in state units.
Vector scaled_step_residual(const LagrangianFn& lagrangian, double t, double h,
                            const Vector& here, const Vector& p_prev, const Vector& next) {
  const Vector v = (next - here) / h;
  return h * (lagrangian.d_dv(t, here, v) - p_prev) - (h * h) * lagrangian.d_dx(t, here, v);
}

}  // namespace

Trajectory del_integrate(const LagrangianFn& lagrangian, const Vector& x0, const Vector& x1,
                         const TimeGrid& grid, const SolverConfig& cfg,
                         const DelOptions& options) {
  cfg.validate();
  const int d = lagrangian.dim();
  if (x0.size() != d || x1.size() != d) throw DomainError("initial nodes have wrong dimension");
  const int n = grid.steps();
  const double h = grid.h();
  std::vector<Vector> x(static_cast<size_t>(n + 1));
  x[0] = x0;
  x[1] = x1;
  std::vector<int> iterations;

  for (int k = 1; k < n; ++k) {
    const Vector& here = x[static_cast<size_t>(k)];
    const Vector& prev = x[static_cast<size_t>(k - 1)];
    if (lagrangian.is_separable() && options.closed_form_leapfrog) {
      x[static_cast<size_t>(k + 1)] = 2.0 * here - prev - (h * h) * lagrangian.potential_gradient()(here);
      iterations.push_back(1);
      continue;
    }
    const double t = grid.node(k);
    const Vector p_prev = lagrangian.d_dv(grid.node(k - 1), prev, (here - prev) / h);
    const ResidualFn residual = [&](const Vector& next) {
      return scaled_step_residual(lagrangian, t, h, here, p_prev, next);
    };
    JacobianFn jacobian;
    if (lagrangian.is_separable()) {
      jacobian = [d](const Vector&) -> Matrix { return Matrix::Identity(d, d); };
    }
    try {
      const NewtonResult solved = newton_solve(residual, jacobian, 2.0 * here - prev, cfg);
      x[static_cast<size_t>(k + 1)] = solved.x;
      iterations.push_back(solved.iterations);
    } catch (const SingularJacobianError& e) {
      throw DegeneracyError(k, e.what());
    } catch (const ConvergenceError& e) {
      throw StepFailure(k, e.what());
    }
    if (!x[static_cast<size_t>(k + 1)].allFinite()) throw StepFailure(k, "non-finite state");
  }
  return {from_vectors(grid, Support::Full, d, x), std::nullopt, std::move(iterations)};
}

Trajectory del_integrate_velocity(const LagrangianFn& lagrangian, const Vector& x0,
                                  const Vector& v0, const TimeGrid& grid,
                                  const SolverConfig& cfg, const DelOptions& options) {
  return del_integrate(lagrangian, x0, x0 + grid.h() * v0, grid, cfg, options);
}

Trajectory del_solve_bvp(const LagrangianFn& lagrangian, const Vector& x0, const Vector& xn,
                         const TimeGrid& grid, const SolverConfig& cfg) {
  cfg.validate();
  const int d = lagrangian.dim();
  if (x0.size() != d || xn.size() != d) throw DomainError("endpoints have wrong dimension");
  const int n = grid.steps();
  if (n < 2) throw DomainError("boundary-value problem needs N >= 2");
  const double h = grid.h();
  const auto unknowns = static_cast<Eigen::Index>(n - 1) * d;

  const auto assemble = [&](const Vector& z) {
    std::vector<Vector> x(static_cast<size_t>(n + 1));
    x[0] = x0;
    x[static_cast<size_t>(n)] = xn;
    for (int k = 1; k < n; ++k) x[static_cast<size_t>(k)] = z.segment(static_cast<Eigen::Index>(k - 1) * d, d);
    return x;
  };
  const ResidualFn residual = [&](const Vector& z) {
    const auto x = assemble(z);
    Vector r(unknowns);
    for (int k = 1; k < n; ++k) {
      const auto& prev = x[static_cast<size_t>(k - 1)];
      const auto& here = x[static_cast<size_t>(k)];
      const Vector p_prev = lagrangian.d_dv(grid.node(k - 1), prev, (here - prev) / h);
      r.segment(static_cast<Eigen::Index>(k - 1) * d, d) =
          scaled_step_residual(lagrangian, grid.node(k), h, here, p_prev, x[static_cast<size_t>(k + 1)]);
    }
    return r;
  };

  Vector guess(unknowns);
  for (int k = 1; k < n; ++k) {
    const double s = static_cast<double>(k) / n;
    guess.segment(static_cast<Eigen::Index>(k - 1) * d, d) = (1.0 - s) * x0 + s * xn;
  }
  NewtonResult solved;
  try {
    solved = newton_solve(residual, {}, guess, cfg);
  } catch (const SingularJacobianError& e) {
    throw DegeneracyError(0, e.what());
  } catch (const ConvergenceError& e) {
    throw StepFailure(0, e.what());
  }
  return {from_vectors(grid, Support::Full, d, assemble(solved.x)), std::nullopt,
          {solved.iterations}};
}

CriticalPointResult critical_point_check(const LagrangianFn& lagrangian,
                                         const DiscreteFunction& x, double tol, int samples,
                                         unsigned seed) {
  CriticalPointResult result;
  result.residual_sup = sup_norm(del_residual(lagrangian, x));
  result.critical = result.residual_sup <= tol;

  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const int n = x.grid().steps();
  const int d = x.dim();
  for (int s = 0; s < samples; ++s) {
    std::vector<double> values(static_cast<size_t>(n + 1) * static_cast<size_t>(d), 0.0);
    for (int k = 1; k < n; ++k) {
      for (int c = 0; c < d; ++c) values[static_cast<size_t>(k * d + c)] = unit(rng);
    }
    const DiscreteFunction variation(x.grid(), Support::Full, d, std::move(values));
    result.max_sampled_variation = std::max(
        result.max_sampled_variation, std::abs(frechet_derivative(lagrangian, x, variation)));
  }
  return result;
}

DiscreteFunction energy_diagnostic(const LagrangianFn& lagrangian, const DiscreteFunction& x) {
  require_path(lagrangian, x, "energy_diagnostic");
  const PlusSamples s = plus_samples(x);
  std::vector<double> energy;
  for (size_t k = 0; k < s.t.size(); ++k) {
    energy.push_back(lagrangian.d_dv(s.t[k], s.x[k], s.v[k]).dot(s.v[k]) -
                     lagrangian(s.t[k], s.x[k], s.v[k]));
  }
  return DiscreteFunction::scalar(x.grid(), Support::Plus, std::move(energy));
}

}  // namespace dembed
