#include "dembed/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "dembed/embeddings.hpp"
#include "dembed/lifts.hpp"
#include "dembed/operators.hpp"
#include "dembed/problems.hpp"
#include "dembed/study.hpp"
#include "dembed/variational.hpp"

namespace dembed {

OperatorTable OperatorTable::library() {
  return {[](const DiscreteFunction& f) { return dembed::delta(f); },
          [](const DiscreteFunction& f) { return dembed::nabla(f); },
          [](const DiscreteFunction& f) { return dembed::delta2(f); },
          [](const DiscreteFunction& f) { return dembed::delta3(f); },
          [](const DiscreteFunction& f) { return dembed::j_delta(f); },
          [](const DiscreteFunction& f) { return dembed::j_nabla(f); },
          [](const DiscreteFunction& f) { return dembed::j_delta2(f); },
          [](const DiscreteFunction& f) { return dembed::j_delta3(f); }};
}

OperatorTable OperatorTable::with_delta3_sign_fault() {
  OperatorTable table = library();
  table.delta3 = [](const DiscreteFunction& f) {
    // correct row is (-11, 18, -9, 2) / 6h; the fault adds 18 F_{3k+2} / 6h
    const DiscreteFunction good = dembed::delta3(f);
    std::vector<double> values(good.values().begin(), good.values().end());
    const int d = f.dim();
    for (int k = 0; k < f.grid().steps(); k += 3) {
      for (int c = 0; c < d; ++c) {
        values[static_cast<size_t>(k * d + c)] += 18.0 * f(k + 2, c) / (6.0 * f.grid().h());
      }
    }
    return DiscreteFunction(f.grid(), Support::Plus, d, std::move(values));
  };
  return table;
}

bool SelftestReport::all_passed() const {
  return std::all_of(results.begin(), results.end(),
                     [](const InvariantResult& r) { return r.passed; });
}

namespace {

constexpr double kTol = 1e-12;

class Suite {
 public:
  explicit Suite(unsigned long long seed) : rng_(seed) {}

  std::mt19937_64& rng() { return rng_; }

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  DiscreteFunction random(const TimeGrid& grid, Support s, int dim) {
    std::vector<double> v(static_cast<size_t>(node_count(s, grid.steps())) *
                          static_cast<size_t>(dim));
    for (double& x : v) x = uniform(-10.0, 10.0);
    return {grid, s, dim, std::move(v)};
  }

  TimeGrid random_grid(int multiple_of) {
    const int blocks = uniform_int(1, 60 / multiple_of);
    const double a = uniform(-2.0, 2.0);
    return {a, a + uniform(0.5, 4.0), blocks * multiple_of};
  }

  void add(std::string name, const std::function<std::string()>& check) {
    InvariantResult r{std::move(name), false, {}};
    try {
      r.detail = check();
      r.passed = r.detail.empty();
    } catch (const std::exception& e) {
      r.detail = std::string("exception: ") + e.what();
    }
    results_.push_back(std::move(r));
  }

  std::vector<InvariantResult> take() { return std::move(results_); }

 private:
  std::mt19937_64 rng_;
  std::vector<InvariantResult> results_;
};

std::string mismatch(const char* what, const DiscreteFunction& f, const DiscreteFunction& g) {
  return fmt::format("{}: sup difference {:.3e}", what, sup_distance(f, g));
}

}  // namespace

SelftestReport run_selftest(const OperatorTable& ops, unsigned long long seed) {
  Suite suite(seed);
  constexpr int kTrials = 50;

  suite.add("grid.sigma_rho_inverse", [&]() -> std::string {
    for (int i = 0; i < kTrials; ++i) {
      const TimeGrid g = suite.random_grid(1);
      const auto f = suite.random(g, Support::Plus, suite.uniform_int(1, 3));
      const auto m = suite.random(g, Support::Minus, 2);
      if (!std::ranges::equal(rho(sigma(f)).values(), f.values()) || rho(sigma(f)).support() != Support::Plus) {
        return "rho(sigma(F)) != F";
      }
      if (!std::ranges::equal(sigma(rho(m)).values(), m.values())) return "sigma(rho(G)) != G";
    }
    return {};
  });

  suite.add("grid.star_algebra", [&]() -> std::string {
    const TimeGrid g(0.0, 1.0, 8);
    for (int i = 0; i < kTrials; ++i) {
      std::vector<double> a, b, c;
      for (int k = 0; k <= 8; ++k) {
        a.push_back(suite.uniform_int(-5, 5));
        b.push_back(suite.uniform_int(-5, 5));
        c.push_back(suite.uniform_int(-5, 5));
      }
      const auto fa = DiscreteFunction::scalar(g, Support::Full, a);
      const auto fb = DiscreteFunction::scalar(g, Support::Full, b);
      const auto fc = DiscreteFunction::scalar(g, Support::Full, c);
      if (sup_distance(star(fa, fb), star(fb, fa)) != 0.0) return "not commutative";
      if (sup_distance(star(star(fa, fb), fc), star(fa, star(fb, fc))) != 0.0) return "not associative";
      if (sup_distance(star(fa, constant_lift(1.0, g)), fa) != 0.0) return "identity fails";
    }
    return {};
  });

  suite.add("grid.scalar_product_degeneracy", [&]() -> std::string {
    for (int n = 1; n <= 4; ++n) {
      const TimeGrid g(0.0, 1.0, n);
      const int total = 1;
      (void)total;
      std::vector<int> digits(static_cast<size_t>(n + 1), -1);
      // enumerate {-1, 0, 1}^(N+1)
      while (true) {
        std::vector<double> v(digits.begin(), digits.end());
        const auto f = DiscreteFunction::scalar(g, Support::Full, v);
        const double sp = scalar_product_plus(f, f);
        const bool head_zero = std::all_of(v.begin(), v.end() - 1, [](double x) { return x == 0.0; });
        if (sp < 0.0) return "negative <F,F>_+";
        if ((sp == 0.0) != head_zero) return fmt::format("degeneracy mismatch at N={}", n);
        size_t i = 0;
        while (i < digits.size() && digits[i] == 1) digits[i++] = -1;
        if (i == digits.size()) break;
        ++digits[i];
      }
    }
    return {};
  });

  suite.add("lifts.pi_iota_identity", [&]() -> std::string {
    for (int i = 0; i < kTrials; ++i) {
      const TimeGrid g = suite.random_grid(6);
      const auto f = suite.random(g, Support::Full, suite.uniform_int(1, 3));
      for (const auto& p : {iota1(f), iota2(f), iota3(f)}) {
        if (!approx_equal(pi_project(p), f, kTol)) return mismatch("pi(iota(F))", pi_project(p), f);
      }
      const auto plus = restrict_to(pi_project(iota0_plus(f)), Support::Plus);
      if (!approx_equal(plus, restrict_to(f, Support::Plus), kTol)) return "pi(iota0+(F)) on Plus";
      const auto minus = restrict_to(pi_project(iota0_minus(f)), Support::Minus);
      if (!approx_equal(minus, restrict_to(f, Support::Minus), kTol)) return "pi(iota0-(F)) on Minus";
    }
    return {};
  });

  suite.add("lifts.iota_pi_identity", [&]() -> std::string {
    for (int i = 0; i < kTrials; ++i) {
      const TimeGrid g = suite.random_grid(1);
      const auto f = suite.random(g, Support::Full, 1);
      const auto p = iota0_plus(f);
      const auto q = iota0_plus(pi_project(p));
      const auto pm = iota0_minus(f);
      const auto qm = iota0_minus(pi_project(pm));
      for (int b = 0; b < p.blocks(); ++b) {
        if (p.coefficients(b, 0) != q.coefficients(b, 0)) return "iota0+ o pi != Id";
        if (pm.coefficients(b, 0) != qm.coefficients(b, 0)) return "iota0- o pi != Id";
      }
    }
    return {};
  });

  suite.add("lifts.partition_of_unity", [&]() -> std::string {
    for (int nodes = 1; nodes <= 4; ++nodes) {
      const double h = suite.uniform(0.01, 2.0);
      std::vector<double> t;
      for (int j = 0; j < nodes; ++j) t.push_back(j * h);
      const double defect = LagrangeBasis(t).partition_of_unity_defect();
      if (defect > 1e-12 * std::max(1.0, 1.0 / std::pow(h, nodes - 1))) {
        return fmt::format("defect {:.3e} with {} nodes", defect, nodes);
      }
    }
    return {};
  });

  suite.add("lifts.antiderivative_of_derivative", [&]() -> std::string {
    for (int i = 0; i < kTrials; ++i) {
      const TimeGrid g = suite.random_grid(6);
      const auto f = suite.random(g, Support::Full, 1);
      for (const auto& p : {iota1(f), iota2(f), iota3(f)}) {
        const auto back = pi_project(antiderivative(d_plus(p)));
        const auto expected = f - constant_lift(f.at(0), g);
        if (!approx_equal(back, expected, 1e-11)) return mismatch("int d+ p", back, expected);
      }
    }
    return {};
  });

  suite.add("lifts.polynomial_reproduction", [&]() -> std::string {
    const TimeGrid g(0.0, 3.0, 6);
    const auto quad = [](double t) { return 1.0 - 2.0 * t + 0.5 * t * t; };
    const auto cubic = [](double t) { return 2.0 + t - t * t + 0.25 * t * t * t; };
    const auto p2 = iota2(discretise(quad, g));
    const auto p3 = iota3(discretise(cubic, g));
    for (double t = 0.0; t <= 3.0; t += 0.05) {
      if (std::abs(p2.eval(t)[0] - quad(t)) > 1e-12) return "quadratic not reproduced";
      if (std::abs(p3.eval(t)[0] - cubic(t)) > 1e-12) return "cubic not reproduced";
    }
    return {};
  });

  suite.add("operators.pipeline_agreement", [&]() -> std::string {
    const std::vector<std::pair<OperatorKind, const OperatorTable::Op*>> kinds{
        {OperatorKind::Delta, &ops.delta},       {OperatorKind::Nabla, &ops.nabla},
        {OperatorKind::Delta2, &ops.delta2},     {OperatorKind::Delta3, &ops.delta3},
        {OperatorKind::JDelta, &ops.j_delta},    {OperatorKind::JNabla, &ops.j_nabla},
        {OperatorKind::JDelta2, &ops.j_delta2},  {OperatorKind::JDelta3, &ops.j_delta3}};
    for (int i = 0; i < kTrials; ++i) {
      const TimeGrid g = suite.random_grid(6);
      const auto f = suite.random(g, Support::Full, suite.uniform_int(1, 3));
      for (const auto& [kind, op] : kinds) {
        const auto closed = (*op)(f);
        const auto composed = pipeline::apply(kind, f);
        if (!approx_equal(closed, composed, kTol)) {
          return fmt::format("{}: sup difference {:.3e}", to_string(kind),
                             sup_distance(closed, composed));
        }
      }
    }
    return {};
  });

  const auto ftc = [&](const OperatorTable::Op& d, const OperatorTable::Op& j, int width,
                       Support out) -> std::string {
    for (int i = 0; i < kTrials; ++i) {
      const TimeGrid g = suite.random_grid(width);
      const auto f = suite.random(g, Support::Full, suite.uniform_int(1, 3));
      const auto back = j(d(f));
      const auto expected = f - constant_lift(f.at(0), g);
      if (!approx_equal(back, expected, kTol)) return mismatch("J(D(F)) vs F - F_0", back, expected);
      const auto fo = restrict_to(f, out);
      const auto again = restrict_to(d(j(fo)), out);
      if (!approx_equal(again, fo, kTol)) return mismatch("D(J(F)) vs F", again, fo);
    }
    return {};
  };
  suite.add("operators.ftc_order1", [&]() -> std::string {
    if (auto e = ftc(ops.delta, ops.j_delta, 1, Support::Plus); !e.empty()) return "delta: " + e;
    return ftc(ops.nabla, ops.j_nabla, 1, Support::Minus);
  });
  suite.add("operators.ftc_order2", [&] { return ftc(ops.delta2, ops.j_delta2, 2, Support::Plus); });
  suite.add("operators.ftc_order3", [&] { return ftc(ops.delta3, ops.j_delta3, 3, Support::Plus); });

  suite.add("operators.nabla_duality", [&]() -> std::string {
    for (int i = 0; i < kTrials; ++i) {
      const auto f = suite.random(suite.random_grid(1), Support::Full, 2);
      if (!std::ranges::equal(ops.nabla(f).values(), sigma(ops.delta(f)).values())) {
        return "nabla(F) != sigma(delta(F))";
      }
    }
    return {};
  });

  suite.add("operators.antiderivative_duality", [&]() -> std::string {
    for (int i = 0; i < kTrials; ++i) {
      const TimeGrid g = suite.random_grid(1);
      const auto p = suite.random(g, Support::Plus, 2);
      const auto m = suite.random(g, Support::Minus, 2);
      if (!approx_equal(ops.j_nabla(sigma(p)), ops.j_delta(p), kTol)) return "J_nabla o sigma != J_delta";
      if (!approx_equal(ops.j_delta(rho(m)), ops.j_nabla(m), kTol)) return "J_delta o rho != J_nabla";
    }
    return {};
  });

  suite.add("operators.leibniz", [&]() -> std::string {
    for (int i = 0; i < kTrials; ++i) {
      const TimeGrid g = suite.random_grid(1);
      const auto f = suite.random(g, Support::Full, 1);
      const auto h = suite.random(g, Support::Full, 1);
      const auto lhs = ops.delta(star(f, h));
      const auto rhs = star(ops.delta(f), restrict_to(h, Support::Plus)) +
                       star(rho(restrict_to(f, Support::Minus)), ops.delta(h));
      if (!approx_equal(lhs, rhs, kTol)) return mismatch("delta Leibniz", lhs, rhs);
      const auto lhs_m = ops.nabla(star(f, h));
      const auto rhs_m = star(ops.nabla(f), restrict_to(h, Support::Minus)) +
                         star(sigma(restrict_to(f, Support::Plus)), ops.nabla(h));
      if (!approx_equal(lhs_m, rhs_m, kTol)) return mismatch("nabla Leibniz", lhs_m, rhs_m);
    }
    return {};
  });

  suite.add("operators.integration_by_parts", [&]() -> std::string {
    for (int i = 0; i < kTrials; ++i) {
      const TimeGrid g = suite.random_grid(1);
      if (g.steps() < 2) continue;
      const auto f = suite.random(g, Support::Full, 1);
      std::vector<double> gv(static_cast<size_t>(g.steps() + 1), 0.0);
      for (int k = 1; k < g.steps(); ++k) gv[static_cast<size_t>(k)] = suite.uniform(-10.0, 10.0);
      const auto gf = DiscreteFunction::scalar(g, Support::Full, gv);
      const double lhs = ops.j_delta(star(restrict_to(f, Support::Plus), ops.delta(gf)))(g.steps());
      const auto nf = ops.nabla(f);
      double rhs = 0.0;
      for (int k = 1; k < g.steps(); ++k) rhs -= g.h() * nf(k) * gf(k);
      const double scale = std::max(1.0, std::abs(lhs));
      if (std::abs(lhs - rhs) > kTol * scale * 10.0) {
        return fmt::format("lhs {} rhs {}", lhs, rhs);
      }
    }
    return {};
  });

  suite.add("operators.kernel_of_delta", [&]() -> std::string {
    for (int i = 0; i < kTrials; ++i) {
      const TimeGrid g = suite.random_grid(1);
      const auto c = constant_lift(suite.uniform(-10.0, 10.0), g);
      if (sup_norm(ops.delta(c)) != 0.0) return "delta(constant) != 0";
      const auto f = suite.random(g, Support::Full, 1);
      if (sup_norm(ops.delta(f)) == 0.0) return "delta vanished on a non-constant";
    }
    return {};
  });

  suite.add("operators.dubois_raymond", [&]() -> std::string {
    for (int i = 0; i < kTrials; ++i) {
      const TimeGrid g = suite.random_grid(1);
      std::vector<double> v(static_cast<size_t>(g.steps() + 1), 0.0);
      const bool zero_interior = i % 2 == 0;
      v.front() = suite.uniform(-5.0, 5.0);
      v.back() = suite.uniform(-5.0, 5.0);
      if (!zero_interior && g.steps() >= 2) v[1] = suite.uniform(0.5, 5.0);
      const auto f = DiscreteFunction::scalar(g, Support::Full, v);
      const auto r = dubois_raymond_witness(f);
      const bool expect_zero = zero_interior || g.steps() < 2;
      if (r.interior_zero != expect_zero) return "misclassified";
      if (!r.interior_zero && !(r.pairing > 0.0)) return "witness pairing not positive";
    }
    return {};
  });

  suite.add("operators.self_pairing_definiteness", [&]() -> std::string {
    for (int i = 0; i < kTrials; ++i) {
      const TimeGrid g = suite.random_grid(1);
      const auto f = i % 3 == 0 ? constant_lift(suite.uniform(-5.0, 5.0), g)
                                : suite.random(g, Support::Full, 1);
      const auto df = ops.delta(f);
      const double pairing = ops.j_delta(star(df, df))(g.steps());
      if ((pairing == 0.0) != (sup_norm(df) == 0.0)) return "pairing with G = delta F";
    }
    return {};
  });

  suite.add("operators.exactness_degrees", [&]() -> std::string {
    const TimeGrid g(0.0, 1.2, 12);
    const auto sample = [&](auto fn) { return discretise(fn, g); };
    const auto node_error = [&](const DiscreteFunction& got, auto exact) {
      double err = 0.0;
      for (int k = got.first_index(); k <= got.last_index(); ++k) {
        err = std::max(err, std::abs(got(k) - exact(g.node(k))));
      }
      return err;
    };
    const auto lin = [](double t) { return 3.0 - 2.0 * t; };
    const auto quad = [](double t) { return 1.0 + t - 4.0 * t * t; };
    const auto cub = [](double t) { return t * t * t - 2.0 * t; };
    if (node_error(ops.delta(sample(lin)), [](double) { return -2.0; }) > 1e-12) return "delta on linear";
    if (node_error(ops.delta2(sample(quad)), [](double t) { return 1.0 - 8.0 * t; }) > 1e-11) return "delta2 on quadratic";
    if (node_error(ops.delta3(sample(cub)), [](double t) { return 3.0 * t * t - 2.0; }) > 1e-10) return "delta3 on cubic";
    if (node_error(ops.j_delta(sample([](double) { return 2.5; })), [](double t) { return 2.5 * t; }) > 1e-12) return "J_delta on constant";
    if (node_error(ops.j_delta2(sample(lin)), [](double t) { return 3.0 * t - t * t; }) > 1e-12) return "J_delta2 on linear";
    if (node_error(ops.j_delta3(sample(quad)), [](double t) { return t + 0.5 * t * t - 4.0 * t * t * t / 3.0; }) > 1e-12) return "J_delta3 on quadratic";
    return {};
  });

  const auto exp_field = find_ode_problem("exp")->field;
  const SolverConfig cfg;

  suite.add("embeddings.first_order_coherence", [&]() -> std::string {
    for (const auto* name : {"exp", "logistic", "harmonic2d", "pendulum"}) {
      const auto* p = find_ode_problem(name);
      const TimeGrid g(0.0, 1.0, 24);
      const auto d = integrate(p->field, p->default_x0, g, SchemeKind::DeltaDifferential, cfg);
      const auto in = integrate(p->field, p->default_x0, g, SchemeKind::DeltaIntegral, cfg);
      if (!std::ranges::equal(d.path.values(), in.path.values())) return std::string("Delta differs on ") + name;
      const auto nd = integrate(p->field, p->default_x0, g, SchemeKind::NablaDifferential, cfg);
      const auto ni = integrate(p->field, p->default_x0, g, SchemeKind::NablaIntegral, cfg);
      if (sup_distance(nd.path, ni.path) > 100.0 * cfg.tol) return std::string("Nabla differs on ") + name;
    }
    return {};
  });

  suite.add("embeddings.constant_field_exact", [&]() -> std::string {
    const ODEField field{2, [](double, const Vector&) -> Vector { return Vector::Constant(2, 0.75); }, {}};
    Vector x0(2);
    x0 << 1.0, -2.0;
    const TimeGrid g(0.5, 2.0, 12);
    for (const auto s : all_schemes()) {
      const auto run = integrate(field, x0, g, s, cfg);
      for (int k = 0; k <= g.steps(); ++k) {
        for (int c = 0; c < 2; ++c) {
          if (std::abs(run.path(k, c) - (x0[c] + 0.75 * (g.node(k) - g.a()))) > 1e-12) {
            return std::string(to_string(s));
          }
        }
      }
    }
    return {};
  });

  suite.add("embeddings.amplification_factors", [&]() -> std::string {
    for (double lambda : {-1.0, 1.0, 2.0}) {
      for (double h : {0.1, 0.5}) {
        if (lambda * h >= 1.0) continue;  // backward Euler / trapezoid pole
        const ODEField lin{1, [lambda](double, const Vector& x) -> Vector { return lambda * x; },
                           [lambda](double, const Vector&) { return Matrix::Constant(1, 1, lambda); }};
        const TimeGrid g(0.0, 6.0 * h, 6);
        const Vector one = Vector::Ones(1);
        const double z = lambda * h;
        const auto fe = integrate(lin, one, g, SchemeKind::DeltaDifferential, cfg).path;
        const auto be = integrate(lin, one, g, SchemeKind::NablaDifferential, cfg).path;
        const auto q2 = integrate(lin, one, g, SchemeKind::Delta2Differential, cfg).path;
        const double trap = (1.0 + z / 2.0) / (1.0 - z / 2.0);
        for (int k = 0; k < 6; ++k) {
          if (std::abs(fe(k + 1) - (1.0 + z) * fe(k)) > 1e-12 * std::abs(fe(k + 1))) return "forward Euler";
          if (std::abs(be(k + 1) - be(k) / (1.0 - z)) > 1e-12 * std::abs(be(k + 1))) return "backward Euler";
        }
        for (int k = 0; k < 6; k += 2) {
          if (std::abs(q2(k + 1) - trap * q2(k)) > 1e-12 * std::abs(q2(k + 1))) return "trapezoidal";
          if (std::abs(q2(k + 2) - (q2(k) + 2.0 * z * q2(k + 1))) > 1e-12 * std::abs(q2(k + 2))) return "midpoint";
        }
      }
    }
    return {};
  });

  suite.add("embeddings.convergence_orders", [&]() -> std::string {
    const auto* p = find_ode_problem("exp");
    const std::vector<int> steps{12, 24, 48, 96, 192};
    for (const auto s : all_schemes()) {
      const double slope = convergence_study(*p, s, 0.0, 1.0, p->default_x0, steps, cfg).slope;
      const int order = scheme_order(s);
      const bool ok = order == 1   ? (slope >= 0.9 && slope <= 1.1)
                      : order == 2 ? (slope >= 1.9 && slope <= 2.1)
                                   : slope >= 2.7;
      if (!ok) return fmt::format("{} slope {:.3f}", to_string(s), slope);
    }
    return {};
  });

  suite.add("embeddings.solver_soundness", [&]() -> std::string {
    for (const auto* name : {"exp", "logistic", "harmonic2d", "pendulum"}) {
      const auto* p = find_ode_problem(name);
      const TimeGrid g(0.0, 1.0, 24);
      for (const auto s : all_schemes()) {
        const auto run = integrate(p->field, p->default_x0, g, s, cfg);
        const double r = sup_norm(scheme_residual(p->field, run.path, s));
        if (r > cfg.tol * (1.0 + sup_norm(run.path))) {
          return fmt::format("{} on {}: residual {:.3e}", to_string(s), name, r);
        }
      }
    }
    (void)exp_field;
    return {};
  });

  // L = v^2/2 + x^4/4 - cos(t) x v, a non-separable test Lagrangian
  const LagrangianFn quartic(
      1,
      [](double t, const Vector& x, const Vector& v) {
        return 0.5 * v[0] * v[0] - 0.25 * std::pow(x[0], 4) - std::cos(t) * x[0] * v[0];
      },
      [](double t, const Vector& x, const Vector& v) -> Vector {
        return Vector::Constant(1, -std::pow(x[0], 3) - std::cos(t) * v[0]);
      },
      [](double t, const Vector& x, const Vector& v) -> Vector {
        return Vector::Constant(1, v[0] - std::cos(t) * x[0]);
      });
  const auto& harmonic = find_lagrangian_problem("harmonic")->lagrangian;

  suite.add("variational.gradient_consistency", [&]() -> std::string {
    for (int i = 0; i < 20; ++i) {
      const TimeGrid g(0.0, 1.0, suite.uniform_int(2, 20));
      const auto x = (0.2) * suite.random(g, Support::Full, 1);
      const auto h = (0.1) * suite.random(g, Support::Full, 1);
      for (const auto* l : {&quartic, &harmonic}) {
        const double eps = 1e-6;
        const double fd = (action_delta(*l, x + eps * h) - action_delta(*l, x - eps * h)) / (2.0 * eps);
        const double an = frechet_derivative(*l, x, h);
        if (std::abs(fd - an) > 1e-6 * std::max(1.0, std::abs(an))) {
          return fmt::format("analytic {} vs central difference {}", an, fd);
        }
      }
    }
    return {};
  });

  suite.add("variational.by_parts_chain", [&]() -> std::string {
    for (int i = 0; i < 20; ++i) {
      const TimeGrid g(0.0, 1.0, suite.uniform_int(2, 20));
      const auto x = 0.2 * suite.random(g, Support::Full, 1);
      std::vector<double> hv(static_cast<size_t>(g.steps() + 1), 0.0);
      for (int k = 1; k < g.steps(); ++k) hv[static_cast<size_t>(k)] = suite.uniform(-1.0, 1.0);
      const auto h = DiscreteFunction::scalar(g, Support::Full, hv);
      const double direct = frechet_derivative(quartic, x, h);
      const double parts = frechet_derivative_by_parts(quartic, x, h);
      const auto r = del_residual(quartic, x);
      double via_residual = 0.0;
      for (int k = 1; k < g.steps(); ++k) via_residual -= g.h() * r(k) * h(k);
      const double scale = std::max(1.0, std::abs(direct));
      if (std::abs(direct - parts) > 1e-11 * scale || std::abs(direct - via_residual) > 1e-11 * scale) {
        return fmt::format("{} / {} / {}", direct, parts, via_residual);
      }
    }
    return {};
  });

  suite.add("variational.marsden_west_equivalence", [&]() -> std::string {
    for (int i = 0; i < 20; ++i) {
      const TimeGrid g(0.0, 1.0, suite.uniform_int(2, 20));
      const auto x = 0.3 * suite.random(g, Support::Full, 1);
      for (const auto* l : {&quartic, &harmonic}) {
        const double a = action_delta(*l, x);
        const double b = action_marsden_west(*l, x);
        if (std::abs(a - b) > 1e-13 * std::max(1.0, std::abs(a))) return "actions differ";
        const auto mw = marsden_west_residual(*l, x);
        const auto del = g.h() * del_residual(*l, x);
        if (!approx_equal(mw, del, 1e-10)) return mismatch("h * DEL residual", mw, del);
      }
    }
    return {};
  });

  suite.add("variational.leapfrog_reduction", [&]() -> std::string {
    const TimeGrid g(0.0, 2.0, 20);
    const Vector x0 = Vector::Constant(1, 1.0);
    const Vector x1 = Vector::Constant(1, 0.97);
    const auto run = del_integrate(harmonic, x0, x1, g, cfg);
    std::vector<double> ref{1.0, 0.97};
    const double h = g.h();
    for (int k = 1; k < g.steps(); ++k) {
      const auto kk = static_cast<size_t>(k);
      ref.push_back(2.0 * ref[kk] - ref[kk - 1] - (h * h) * ref[kk]);
    }
    if (!std::ranges::equal(run.path.values(), ref)) return "closed-form step differs from leapfrog";
    const auto newton = del_integrate(harmonic, x0, x1, g, cfg, DelOptions{false});
    if (std::ranges::any_of(newton.newton_iterations, [](int it) { return it != 1; })) {
      return "Newton path needed more than one iteration";
    }
    if (!approx_equal(newton.path, run.path, 1e-13)) return "Newton path differs from leapfrog";
    return {};
  });

  suite.add("variational.critical_iff_del", [&]() -> std::string {
    const TimeGrid g(0.0, 1.0, 10);
    const Vector x0 = Vector::Constant(1, 0.3);
    const Vector v0 = Vector::Constant(1, -0.2);
    const auto run = del_integrate_velocity(quartic, x0, v0, g, cfg);
    const auto crit = critical_point_check(quartic, run.path, 1e-9);
    if (!crit.critical || crit.max_sampled_variation > 1e-9) return "DEL trajectory not critical";
    const auto noisy = run.path + 0.01 * suite.random(g, Support::Full, 1);
    const auto off = critical_point_check(quartic, noisy, 1e-9);
    if (off.critical || !(off.max_sampled_variation > 1e-9)) return "perturbed trajectory reported critical";
    return {};
  });

  return {seed, suite.take()};
}

}  // namespace dembed
