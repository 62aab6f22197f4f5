// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <fmt/format.h>

#include <functional>
#include <string>
#include <vector>

#include "dembed/embeddings.hpp"
#include "dembed/operators.hpp"
#include "dembed/problems.hpp"
#include "dembed/study.hpp"
#include "dembed/variational.hpp"
#include "oracles.hpp"

using namespace dembed;

namespace {

constexpr double kRel = 1e-12;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

Vector v1(double x) { return Vector::Constant(1, x); }

Outcome criterion_ftc() {
  Outcome o;
  oracle::Rng rng(1001);
  for (int i = 0; i < 200; ++i) {
    const TimeGrid g = rng.grid(6);
    const int d = rng.integer(1, 3);
    const auto f = rng.random(g, Support::Full, d);
    const auto f0 = constant_lift(f.at(0), g);
    const auto p = rng.random(g, Support::Plus, d);
    const auto m = rng.random(g, Support::Minus, d);
    o.require(approx_equal(j_delta(delta(f)), f - f0, kRel), "J_delta(delta F) != F - F_0");
    o.require(approx_equal(j_nabla(nabla(f)), f - f0, kRel), "J_nabla(nabla F) != F - F_0");
    o.require(approx_equal(delta(j_delta(p)), p, kRel), "delta(J_delta F) != F");
    o.require(approx_equal(nabla(j_nabla(m)), m, kRel), "nabla(J_nabla F) != F");
    o.require(approx_equal(j_delta2(delta2(f)), f - f0, kRel), "order-2 J(D F) != F - F_0");
    o.require(approx_equal(j_delta3(delta3(f)), f - f0, kRel), "order-3 J(D F) != F - F_0");
  }
  return o;
}

Outcome criterion_pipeline() {
  Outcome o;
  oracle::Rng rng(1002);
  const std::vector<OperatorKind> kinds{OperatorKind::Delta,  OperatorKind::Nabla,  OperatorKind::Delta2,
                                        OperatorKind::Delta3, OperatorKind::JDelta, OperatorKind::JNabla,
                                        OperatorKind::JDelta2, OperatorKind::JDelta3};
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const TimeGrid g = rng.grid(6);
    const auto f = rng.random(g, Support::Full, rng.integer(1, 3));
    for (auto k : kinds) {
      const auto a = apply(k, f);
      const auto b = pipeline::apply(k, f);
      worst = std::max(worst, sup_distance(a, b) / std::max({1.0, sup_norm(a), sup_norm(b)}));
      o.require(approx_equal(a, b, kRel), std::string(to_string(k)) + " disagrees with its composition");
    }
  }
  if (o.pass) o.detail = fmt::format("worst relative gap {:.2e}", worst);
  return o;
}

Outcome criterion_leibniz_parts() {
  Outcome o;
  const TimeGrid small(0.0, 2.0, 2);
  const auto f = oracle::scalar(small, Support::Full, {1, 2, 3});
  const auto bz = oracle::scalar(small, Support::Full, {0, 5, 0});
  const double lhs = j_delta(star(restrict_to(f, Support::Plus), delta(bz)))(2);
  const double rhs = -small.h() * nabla(f)(1) * bz(1);
  o.require(lhs == -5.0 && rhs == -5.0, fmt::format("worked instance gives {} and {}", lhs, rhs));

  oracle::Rng rng(1003);
  for (int i = 0; i < 200; ++i) {
    const TimeGrid g = rng.grid(1);
    const auto a = rng.random(g, Support::Full, 1);
    const auto b = rng.random(g, Support::Full, 1);
    const auto leibniz = star(delta(a), restrict_to(b, Support::Plus)) +
                         star(rho(restrict_to(a, Support::Minus)), delta(b));
    o.require(approx_equal(delta(star(a, b)), leibniz, kRel), "forward Leibniz rule");
    const auto leibniz_n = star(nabla(a), restrict_to(b, Support::Minus)) +
                           star(sigma(restrict_to(a, Support::Plus)), nabla(b));
    o.require(approx_equal(nabla(star(a, b)), leibniz_n, kRel), "backward Leibniz rule");

    std::vector<double> gv(static_cast<size_t>(g.steps() + 1), 0.0);
    for (int k = 1; k < g.steps(); ++k) gv[static_cast<size_t>(k)] = rng.uniform(-10, 10);
    const auto gz = oracle::scalar(g, Support::Full, gv);
    const double l = j_delta(star(restrict_to(a, Support::Plus), delta(gz)))(g.steps());
    double r = 0.0;
    for (int k = 1; k < g.steps(); ++k) r -= g.h() * nabla(a)(k) * gz(k);
    double scale = 1.0;
    for (int k = 0; k < g.steps(); ++k) scale = std::max(scale, std::abs(a(k) * (gz(k + 1) - gz(k))));
    o.require(std::abs(l - r) <= kRel * scale * g.steps(), fmt::format("summation by parts: {} vs {}", l, r));
  }
  return o;
}

Outcome criterion_duality() {
  Outcome o;
  oracle::Rng rng(1004);
  for (int i = 0; i < 200; ++i) {
    const TimeGrid g = rng.grid(1);
    const int d = rng.integer(1, 3);
    const auto p = rng.random(g, Support::Plus, d);
    const auto m = rng.random(g, Support::Minus, d);
    const auto f = rng.random(g, Support::Full, d);
    o.require(oracle::values(rho(sigma(p))) == oracle::values(p), "rho o sigma != Id");
    o.require(oracle::values(sigma(rho(m))) == oracle::values(m), "sigma o rho != Id");
    o.require(oracle::values(nabla(f)) == oracle::values(sigma(delta(f))), "nabla F != sigma(delta F)");
    o.require(approx_equal(j_nabla(sigma(p)), j_delta(p), kRel), "J_nabla o sigma != J_delta");
    o.require(approx_equal(j_delta(rho(m)), j_nabla(m), kRel), "J_delta o rho != J_nabla");
  }
  return o;
}

Outcome criterion_dubois_raymond() {
  Outcome o;
  oracle::Rng rng(1005);
  for (int i = 0; i < 100; ++i) {
    const TimeGrid g(0.0, rng.uniform(0.5, 3.0), rng.integer(2, 40));
    std::vector<double> v(static_cast<size_t>(g.steps() + 1), 0.0);
    v.front() = rng.uniform(-5, 5);
    v.back() = rng.uniform(-5, 5);
    const bool nonzero = rng.integer(0, 1) == 1;
    if (nonzero) {
      for (int k = 1; k < g.steps(); ++k) {
        if (rng.integer(0, 2) == 0) v[static_cast<size_t>(k)] = rng.uniform(-5, 5);
      }
      v[static_cast<size_t>(rng.integer(1, g.steps() - 1))] = rng.uniform(0.1, 5);
    }
    const auto r = dubois_raymond_witness(oracle::scalar(g, Support::Full, v));
    o.require(r.interior_zero == !nonzero, "misclassified");
    if (nonzero) {
      double sq = 0.0;
      for (int k = 1; k < g.steps(); ++k) sq += v[static_cast<size_t>(k)] * v[static_cast<size_t>(k)];
      o.require(r.witness.has_value() && is_boundary_zero(*r.witness), "witness missing or not boundary-zero");
      o.require(r.pairing > 0.0 && std::abs(r.pairing - g.h() * sq) <= kRel * g.h() * sq,
                "witness pairing is not h * sum F_k^2");
    }
  }
  return o;
}

Outcome criterion_amplification() {
  Outcome o;
  const auto& field = find_ode_problem("exp")->field;
  auto near = [](double a, double b) { return std::abs(a - b) <= kRel * std::max(1.0, std::abs(b)); };
  for (double h : {0.1, 0.5}) {
    const TimeGrid g(0.0, 6 * h, 6);
    const Vector one = v1(1.0);
    const auto fe = integrate(field, one, g, SchemeKind::DeltaDifferential).path;
    const auto be = integrate(field, one, g, SchemeKind::NablaDifferential).path;
    const auto tr = integrate(field, one, g, SchemeKind::Delta2Differential).path;
    const auto s3 = integrate(field, one, g, SchemeKind::Delta3Integral).path;
    const auto s3d = integrate(field, one, g, SchemeKind::Delta3Differential).path;
    for (int k = 0; k < 6; ++k) {
      o.require(near(fe(k + 1), (1 + h) * fe(k)), fmt::format("forward Euler, h = {}", h));
      o.require(near(be(k + 1), be(k) / (1 - h)), fmt::format("backward Euler, h = {}", h));
    }
    for (int k = 0; k < 6; k += 2) {
      o.require(near(tr(k + 1), (1 + h / 2) / (1 - h / 2) * tr(k)), fmt::format("trapezoidal, h = {}", h));
      o.require(near(tr(k + 2), tr(k) + 2 * h * tr(k + 1)), fmt::format("midpoint, h = {}", h));
    }
    for (int k = 0; k < 6; k += 3) {
      for (const auto* s : {&s3, &s3d}) {
        const auto& x = *s;
        const double simpson = x(k) + h / 3 * (x(k) + 4 * x(k + 1) + x(k + 2));
        o.require(near(x(k + 2), simpson), fmt::format("forward Simpson closing step, h = {}", h));
      }
    }
  }
  return o;
}

Outcome criterion_orders() {
  Outcome o;
  const auto* p = find_ode_problem("exp");
  const std::vector<int> steps{12, 24, 48, 96, 192};
  std::string summary;
  for (auto s : all_schemes()) {
    const double slope = convergence_study(*p, s, 0.0, 1.0, p->default_x0, steps).slope;
    const int order = scheme_order(s);
    const bool ok = order == 1 ? slope >= 0.9 && slope <= 1.1 : order == 2 ? slope >= 1.9 && slope <= 2.1 : slope >= 2.7;
    o.require(ok, fmt::format("{} slope {:.4f}", to_string(s), slope));
    summary += fmt::format("{}{}={:.3f}", summary.empty() ? "" : " ", to_string(s), slope);
  }
  if (o.pass) o.detail = summary;
  return o;
}

Outcome criterion_coherence() {
  Outcome o;
  const SolverConfig cfg;
  const auto& field = find_ode_problem("exp")->field;
  const TimeGrid g(0.0, 1.0, 12);
  const auto c1 = coherence_check(field, v1(1.0), g, 1, cfg);
  const auto c2 = coherence_check(field, v1(1.0), g, 2, cfg);
  const auto c3 = coherence_check(field, v1(1.0), g, 3, cfg);
  o.require(c1.max_node_discrepancy == 0.0, fmt::format("order-1 discrepancy {}", c1.max_node_discrepancy));
  o.require(c3.max_node_discrepancy <= 100 * cfg.tol, fmt::format("order-3 discrepancy {}", c3.max_node_discrepancy));
  o.detail = fmt::format("order-2 measured {:.3e} (claimed coherent: {})", c2.max_node_discrepancy,
                         c2.claimed_coherent ? "yes" : "no");
  return o;
}

Outcome criterion_variational() {
  Outcome o;
  const auto& harmonic = find_lagrangian_problem("harmonic")->lagrangian;
  oracle::Rng rng(1009);
  for (int i = 0; i < 50; ++i) {
    const double a = rng.uniform(0.5, 2), b = rng.uniform(-1, 1), c = rng.uniform(-1, 1), q = rng.uniform(0, 1);
    const LagrangianFn l(
        1,
        [=](double t, const Vector& x, const Vector& v) {
          return 0.5 * a * v[0] * v[0] + b * std::cos(t) * x[0] * v[0] + 0.5 * c * x[0] * x[0] - 0.25 * q * std::pow(x[0], 4);
        },
        [=](double t, const Vector& x, const Vector& v) -> Vector {
          return v1(b * std::cos(t) * v[0] + c * x[0] - q * std::pow(x[0], 3));
        },
        [=](double t, const Vector& x, const Vector& v) -> Vector { return v1(a * v[0] + b * std::cos(t) * x[0]); });
    const TimeGrid g(0.0, rng.uniform(0.5, 2.0), rng.integer(2, 40));
    const auto x = 0.3 * rng.random(g, Support::Full, 1);
    const auto h = 0.3 * rng.random(g, Support::Full, 1);
    const double eps = 1e-6;
    const double central = (action_delta(l, x + eps * h) - action_delta(l, x - eps * h)) / (2 * eps);
    const double an = frechet_derivative(l, x, h);
    o.require(std::abs(an - central) <= 1e-6 * std::max(1.0, std::abs(an)),
              fmt::format("Frechet derivative {} vs central difference {}", an, central));
    const double s1 = action_delta(l, x), s2 = action_marsden_west(l, x);
    o.require(std::abs(s1 - s2) <= 1e-13 * std::max(1.0, std::abs(s1)), "action forms differ");
    o.require(approx_equal(marsden_west_residual(l, x), g.h() * del_residual(l, x), 1e-10),
              "Marsden-West residual != h * DEL residual");
  }
  const TimeGrid g(0.0, 5.0, 50);
  const auto run = del_integrate(harmonic, v1(1.0), v1(1.0), g);
  std::vector<double> ref{1.0, 1.0};
  for (int k = 1; k < 50; ++k) {
    const auto kk = static_cast<size_t>(k);
    ref.push_back(2.0 * ref[kk] - ref[kk - 1] - (g.h() * g.h()) * ref[kk]);
  }
  o.require(oracle::values(run.path) == ref, "DEL march is not the leapfrog recurrence bitwise");
  o.require(run.path(2) == 0.99, fmt::format("X_2 = {}", run.path(2)));
  return o;
}

Outcome criterion_energy() {
  Outcome o;
  const auto* p = find_lagrangian_problem("harmonic");
  const TimeGrid g(0.0, 100.0, 10000);
  const auto run = del_integrate_velocity(p->lagrangian, v1(1.0), v1(0.0), g);
  const auto summary = summarize_energy(energy_diagnostic(p->lagrangian, run.path));
  o.detail = fmt::format("max |E - E0| = {:.3e}, drift slope = {:.3e}", summary.max_deviation, summary.drift_slope);
  o.require(summary.max_deviation <= 1e-2, o.detail);
  o.require(std::abs(summary.drift_slope) <= 1e-6, o.detail);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"discrete fundamental theorem, orders 1-3", criterion_ftc},
      {"closed forms match lift compositions", criterion_pipeline},
      {"Leibniz rule and summation by parts", criterion_leibniz_parts},
      {"duality maps and antiderivative duality", criterion_duality},
      {"Dubois-Raymond witness classification", criterion_dubois_raymond},
      {"scheme identification by amplification factors", criterion_amplification},
      {"convergence orders on dx/dt = x", criterion_orders},
      {"coherence of differential and integral embeddings", criterion_coherence},
      {"variational suite", criterion_variational},
      {"long-run energy behaviour of leapfrog", criterion_energy},
  };
  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += o.pass ? 0 : 1;
    fmt::print("{} {:>2} {}{}\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
               o.detail.empty() ? "" : "  [" + o.detail + "]");
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<size_t>(failures), criteria.size());
  return failures == 0 ? 0 : 1;
}
