#include <doctest.h>

#include "dembed/problems.hpp"
#include "dembed/study.hpp"
#include "dembed/variational.hpp"
#include "oracles.hpp"

using namespace dembed;
using oracle::scalar;
using oracle::values;

namespace {

const LagrangianFn& harmonic() { return find_lagrangian_problem("harmonic")->lagrangian; }
const LagrangianFn& free_particle() { return find_lagrangian_problem("free")->lagrangian; }

Vector v1(double x) { return Vector::Constant(1, x); }

/// L = a v^2/2 + b x v + c x^2/2 + e sin(t) x, analytic partials.
LagrangianFn quadratic(double a, double b, double c, double e) {
  return LagrangianFn(
      1,
      [=](double t, const Vector& x, const Vector& v) {
        return 0.5 * a * v[0] * v[0] + b * x[0] * v[0] + 0.5 * c * x[0] * x[0] + e * std::sin(t) * x[0];
      },
      [=](double t, const Vector& x, const Vector& v) -> Vector {
        return v1(b * v[0] + c * x[0] + e * std::sin(t));
      },
      [=](double, const Vector& x, const Vector& v) -> Vector { return v1(a * v[0] + b * x[0]); });
}

/// L = v^4/12 + v^2/2 - x^4/4 on R^2 (componentwise), partials by finite differences.
LagrangianFn quartic2d() {
  return LagrangianFn(2, [](double, const Vector& x, const Vector& v) {
    return (v.array().pow(4) / 12.0 + v.array().square() / 2.0 - x.array().pow(4) / 4.0).sum();
  });
}

}  // namespace

TEST_CASE("actions") {
  const TimeGrid g(0.0, 2.0, 2);
  const auto x = scalar(g, Support::Full, {0, 1, 0});
  CHECK(action_delta(harmonic(), x) == 0.5);
  CHECK(action_marsden_west(harmonic(), x) == 0.5);
  const LagrangianFn zero(1, [](double, const Vector&, const Vector&) { return 0.0; });
  CHECK(action_delta(zero, x) == 0.0);
  const LagrangianFn one(1, [](double, const Vector&, const Vector&) { return 1.0; });
  const TimeGrid g7(0.5, 3.0, 7);
  CHECK(action_marsden_west(one, constant_lift(1.0, g7)) == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(action_delta(free_particle(), constant_lift(4.0, g7)) == 0.0);

  oracle::Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    const auto l = quadratic(rng.uniform(0.5, 2), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const TimeGrid gr = rng.grid(1);
    const auto xr = 0.1 * rng.random(gr, Support::Full, 1);
    const double a = action_delta(l, xr);
    CHECK(std::abs(a - action_marsden_west(l, xr)) <= 1e-13 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("supplied partials are spot-checked") {
  auto value = [](double, const Vector& x, const Vector& v) { return 0.5 * v[0] * v[0] - 0.5 * x[0] * x[0]; };
  auto wrong = [](double, const Vector& x, const Vector&) -> Vector { return v1(x[0]); };
  auto right_dv = [](double, const Vector&, const Vector& v) -> Vector { return v; };
  CHECK_THROWS_AS(LagrangianFn(1, value, wrong, right_dv), DomainError);
  const auto l = LagrangianFn::separable(1, [](const Vector& x) { return 0.5 * x.squaredNorm(); },
                                         [](const Vector& x) -> Vector { return x; });
  CHECK(l.is_separable());
  CHECK(l(0.0, v1(2.0), v1(3.0)) == 2.5);
  CHECK(l.d_dx(0.0, v1(2.0), v1(3.0))[0] == -2.0);
  CHECK(l.d_dv(0.0, v1(2.0), v1(3.0))[0] == 3.0);
  const auto fd = quartic2d();
  Vector x(2), v(2);
  x << 0.3, -0.4;
  v << 1.1, 0.2;
  CHECK(fd.d_dv(0.0, x, v)[0] == doctest::Approx(std::pow(1.1, 3) / 3 + 1.1).epsilon(1e-8));
  CHECK(fd.d_dx(0.0, x, v)[1] == doctest::Approx(-std::pow(-0.4, 3)).epsilon(1e-8));
}

TEST_CASE("Frechet derivative") {
  const TimeGrid g(0.0, 1.0, 8);
  const auto x = discretise([](double t) { return std::sin(3 * t); }, g);
  CHECK(frechet_derivative(harmonic(), x, DiscreteFunction::zeros(g, Support::Full, 1)) == 0.0);

  oracle::Rng rng(99);
  for (int i = 0; i < 50; ++i) {
    const TimeGrid gr(0.0, rng.uniform(0.5, 2.0), rng.integer(2, 30));
    const bool vec = i % 2 == 1;
    const auto l = vec ? quartic2d()
                       : quadratic(rng.uniform(0.5, 2), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const int d = vec ? 2 : 1;
    const auto xr = 0.1 * rng.random(gr, Support::Full, d);
    const auto h1 = 0.1 * rng.random(gr, Support::Full, d);
    const auto h2 = 0.1 * rng.random(gr, Support::Full, d);
    const double eps = 1e-6;
    const double central = (action_delta(l, xr + eps * h1) - action_delta(l, xr - eps * h1)) / (2 * eps);
    const double an = frechet_derivative(l, xr, h1);
    CHECK(std::abs(an - central) <= 1e-6 * std::max(1.0, std::abs(an)));
    const double sum = frechet_derivative(l, xr, h1) + frechet_derivative(l, xr, h2);
    CHECK(frechet_derivative(l, xr, h1 + h2) == doctest::Approx(sum).epsilon(1e-12).scale(1));
  }
}

TEST_CASE("Euler-Lagrange residual") {
  const TimeGrid g(0.0, 1.0, 10);
  const auto lin = discretise([](double t) { return 2 - 3 * t; }, g);
  const auto r0 = del_residual(free_particle(), lin);
  CHECK(r0.support() == Support::Interior);
  CHECK(sup_norm(r0) < 1e-12);

  oracle::Rng rng(77);
  const auto xr = rng.random(g, Support::Full, 1);
  const auto r = del_residual(free_particle(), xr);
  for (int k = 1; k < 10; ++k) {
    const double stencil = (xr(k + 1) - 2 * xr(k) + xr(k - 1)) / (g.h() * g.h());
    CHECK(r(k) == doctest::Approx(stencil).epsilon(1e-12).scale(1));
  }

  const auto leap = del_integrate(harmonic(), v1(1.0), v1(0.995), g, {});
  CHECK(sup_norm(del_residual(harmonic(), leap.path)) == doctest::Approx(0.0).epsilon(1e-10).scale(1));
  CHECK(sup_norm(marsden_west_residual(harmonic(), leap.path)) < 1e-12);
  const LagrangianFn zero(1, [](double, const Vector&, const Vector&) { return 0.0; });
  CHECK(sup_norm(marsden_west_residual(zero, xr)) == 0.0);
}

TEST_CASE("Marsden-West residual is h times the Euler-Lagrange residual") {
  oracle::Rng rng(55);
  for (int i = 0; i < 50; ++i) {
    const auto l = quadratic(rng.uniform(0.5, 2), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const TimeGrid g = rng.grid(1);
    if (g.steps() < 2) continue;
    const auto x = rng.random(g, Support::Full, 1);
    const auto mw = marsden_west_residual(l, x);
    const auto del = g.h() * del_residual(l, x);
    CHECK(approx_equal(mw, del, 1e-10));
  }
}

TEST_CASE("integration-by-parts chain") {
  oracle::Rng rng(66);
  for (int i = 0; i < 50; ++i) {
    const auto l = i % 2 ? quartic2d() : quadratic(1.0, 0.3, -0.7, 0.2);
    const int d = l.dim();
    const TimeGrid g(0.0, 1.0, rng.integer(2, 25));
    const auto x = 0.2 * rng.random(g, Support::Full, d);
    std::vector<double> hv(static_cast<size_t>((g.steps() + 1) * d), 0.0);
    for (size_t j = static_cast<size_t>(d); j + static_cast<size_t>(d) < hv.size(); ++j) hv[j] = rng.uniform(-1, 1);
    const DiscreteFunction h(g, Support::Full, d, hv);
    const double a = frechet_derivative(l, x, h);
    const double b = frechet_derivative_by_parts(l, x, h);
    const auto r = del_residual(l, x);
    double c = 0.0;
    for (int k = 1; k < g.steps(); ++k) {
      for (int q = 0; q < d; ++q) c -= g.h() * r(k, q) * h(k, q);
    }
    const double tol = 1e-11 * std::max(1.0, std::abs(a));
    CHECK(std::abs(a - b) <= tol);
    CHECK(std::abs(a - c) <= tol);
  }
  const TimeGrid g(0, 1, 4);
  CHECK_THROWS_AS(frechet_derivative_by_parts(harmonic(), constant_lift(1.0, g), constant_lift(1.0, g)), DomainError);
}

TEST_CASE("DEL integration") {
  const TimeGrid g(0.0, 1.0, 10);
  const auto run = del_integrate(harmonic(), v1(1.0), v1(1.0), g, {});
  CHECK(run.path(2) == 0.99);
  CHECK_FALSE(run.scheme.has_value());

  // bitwise leapfrog, closed form and Newton
  std::vector<double> ref{1.0, 1.0};
  for (int k = 1; k < 10; ++k) {
    const auto kk = static_cast<size_t>(k);
    ref.push_back(2.0 * ref[kk] - ref[kk - 1] - (g.h() * g.h()) * ref[kk]);
  }
  CHECK(values(run.path) == ref);
  const auto newton = del_integrate(harmonic(), v1(1.0), v1(1.0), g, {}, DelOptions{false});
  for (int it : newton.newton_iterations) CHECK(it == 1);
  CHECK(approx_equal(newton.path, run.path, 1e-13));

  const auto uniform = del_integrate(free_particle(), v1(0.5), v1(0.7), g, {});
  for (int k = 0; k <= 10; ++k) CHECK(uniform.path(k) == doctest::Approx(0.5 + 0.2 * k).epsilon(1e-13));

  const auto vel = del_integrate_velocity(harmonic(), v1(1.0), v1(0.0), g, {});
  CHECK(vel.path(1) == 1.0);

  const auto l = quartic2d();
  Vector x0(2), x1(2);
  x0 << 0.2, -0.1;
  x1 << 0.25, -0.08;
  // finite-difference partials put a floor near 1e-10 under the residual
  SolverConfig loose;
  loose.tol = 1e-9;
  const auto nl = del_integrate(l, x0, x1, TimeGrid(0.0, 1.0, 20), loose);
  // Newton works on h^2 R, so R itself is only small to tol / h^2
  const double h2 = 0.05 * 0.05;
  CHECK(sup_norm(del_residual(l, nl.path)) <= 2e-9 / h2);
  CHECK(critical_point_check(l, nl.path, 2e-9 / h2).critical);
}

TEST_CASE("degenerate Lagrangians are rejected") {
  // L = x^2 / 2 does not depend on v, so X_{k+1} drops out of the residual
  const LagrangianFn deg(1, [](double, const Vector& x, const Vector&) { return 0.5 * x[0] * x[0]; });
  CHECK_THROWS_AS(del_integrate(deg, v1(1.0), v1(1.1), TimeGrid(0, 1, 5), {}, DelOptions{false}), DegeneracyError);
}

TEST_CASE("boundary value mode") {
  const TimeGrid g(0.0, 1.0, 20);
  const auto bvp = del_solve_bvp(harmonic(), v1(0.0), v1(1.0), g, {});
  CHECK(bvp.path(0) == 0.0);
  CHECK(bvp.path(20) == 1.0);
  CHECK(critical_point_check(harmonic(), bvp.path, 1e-9).critical);
  CHECK(bvp.path(10) == doctest::Approx(std::sin(0.5) / std::sin(1.0)).epsilon(1e-2));
}

TEST_CASE("critical point check") {
  const TimeGrid g(0.0, 1.0, 12);
  const auto run = del_integrate(harmonic(), v1(0.3), v1(0.31), g, {});
  const auto yes = critical_point_check(harmonic(), run.path, 1e-9);
  CHECK(yes.critical);
  CHECK(yes.max_sampled_variation < 1e-9);
  oracle::Rng rng(3);
  const auto noise = rng.random(g, Support::Full, 1);
  const auto no = critical_point_check(harmonic(), noise, 1e-9);
  CHECK_FALSE(no.critical);
  CHECK(no.max_sampled_variation > 1e-9);
  const TimeGrid two(0.0, 1.0, 2);
  const auto tiny = critical_point_check(free_particle(), scalar(two, Support::Full, {0, 1, 2}), 1e-12);
  CHECK(tiny.critical);
}

TEST_CASE("energy diagnostic") {
  const TimeGrid g(0.0, 1.0, 10);
  oracle::Rng rng(1);
  const auto x = rng.random(g, Support::Full, 1);
  const auto e = energy_diagnostic(harmonic(), x);
  CHECK(e.support() == Support::Plus);
  for (int k = 0; k < 10; ++k) {
    const double v = (x(k + 1) - x(k)) / g.h();
    CHECK(e(k) == doctest::Approx(0.5 * v * v + 0.5 * x(k) * x(k)).epsilon(1e-12));
  }
  const auto uniform = del_integrate_velocity(free_particle(), v1(0.0), v1(1.0), g, {});
  const auto ef = summarize_energy(energy_diagnostic(free_particle(), uniform.path));
  CHECK(ef.max_deviation <= 1e-12);

  const auto* pend = find_lagrangian_problem("pendulum_lag");
  const TimeGrid lg(0.0, 20.0, 2000);
  const auto pr = del_integrate_velocity(pend->lagrangian, pend->default_x0, pend->default_v0, lg, {});
  CHECK(summarize_energy(energy_diagnostic(pend->lagrangian, pr.path)).max_deviation < 1e-3);
}

TEST_CASE("least squares slope") {
  const std::vector<double> xs{0, 1, 2, 3};
  const std::vector<double> ys{1, 3, 5, 7};
  CHECK(least_squares_slope(xs, ys) == doctest::Approx(2.0));
  CHECK_THROWS_AS(least_squares_slope(std::vector<double>{1.0}, std::vector<double>{1.0}), DomainError);
}
