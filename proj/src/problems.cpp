#include "dembed/problems.hpp"

#include <cmath>

namespace dembed {

namespace {

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

Matrix mat1(double x) { return Matrix::Constant(1, 1, x); }

std::vector<OdeProblem> build_ode_problems() {
  std::vector<OdeProblem> out;
  out.push_back({"exp",
                 {1, [](double, const Vector& x) -> Vector { return x; },
                  [](double, const Vector&) { return mat1(1.0); }},
                 vec({1.0}),
                 [](double t, double a, const Vector& x0) -> Vector {
                   return x0 * std::exp(t - a);
                 }});
  out.push_back({"decay",
                 {1, [](double, const Vector& x) -> Vector { return -x; },
                  [](double, const Vector&) { return mat1(-1.0); }},
                 vec({1.0}),
                 [](double t, double a, const Vector& x0) -> Vector {
                   return x0 * std::exp(-(t - a));
                 }});
  out.push_back({"logistic",
                 {1,
                  [](double, const Vector& x) -> Vector { return vec({x[0] * (1.0 - x[0])}); },
                  [](double, const Vector& x) { return mat1(1.0 - 2.0 * x[0]); }},
                 vec({0.1}),
                 [](double t, double a, const Vector& x0) -> Vector {
                   const double e = std::exp(t - a);
                   return vec({x0[0] * e / (1.0 - x0[0] + x0[0] * e)});
                 }});
  out.push_back({"harmonic2d",
                 {2, [](double, const Vector& x) -> Vector { return vec({x[1], -x[0]}); },
                  [](double, const Vector&) {
                    Matrix j(2, 2);
                    j << 0.0, 1.0, -1.0, 0.0;
                    return j;
                  }},
                 vec({1.0, 0.0}),
                 [](double t, double a, const Vector& x0) -> Vector {
                   const double s = t - a;
                   return vec({x0[0] * std::cos(s) + x0[1] * std::sin(s),
                               -x0[0] * std::sin(s) + x0[1] * std::cos(s)});
                 }});
  out.push_back({"pendulum",
                 {2,
                  [](double, const Vector& x) -> Vector { return vec({x[1], -std::sin(x[0])}); },
                  [](double, const Vector& x) {
                    Matrix j(2, 2);
                    j << 0.0, 1.0, -std::cos(x[0]), 0.0;
                    return j;
                  }},
                 vec({0.5, 0.0}),
                 {}});
  return out;
}

std::vector<LagrangianProblem> build_lagrangian_problems() {
  std::vector<LagrangianProblem> out;
  out.push_back({"harmonic",
                 LagrangianFn::separable(
                     1, [](const Vector& x) { return 0.5 * x.squaredNorm(); },
                     [](const Vector& x) -> Vector { return x; }),
                 vec({1.0}), vec({0.0})});
  // 1/2 v^2 + cos x, i.e. V(x) = -cos x
  out.push_back({"pendulum_lag",
                 LagrangianFn::separable(
                     1, [](const Vector& x) { return -std::cos(x[0]); },
                     [](const Vector& x) -> Vector { return vec({std::sin(x[0])}); }),
                 vec({0.1}), vec({0.0})});
  out.push_back({"free",
                 LagrangianFn::separable(
                     1, [](const Vector&) { return 0.0; },
                     [](const Vector& x) -> Vector { return Vector::Zero(x.size()); }),
                 vec({0.0}), vec({1.0})});
  return out;
}

}  // namespace

const std::vector<OdeProblem>& ode_problems() {
  static const std::vector<OdeProblem> problems = build_ode_problems();
  return problems;
}

const std::vector<LagrangianProblem>& lagrangian_problems() {
  static const std::vector<LagrangianProblem> problems = build_lagrangian_problems();
  return problems;
}

const OdeProblem* find_ode_problem(const std::string& name) {
  for (const auto& p : ode_problems()) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

const LagrangianProblem* find_lagrangian_problem(const std::string& name) {
  for (const auto& p : lagrangian_problems()) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

}  // namespace dembed
