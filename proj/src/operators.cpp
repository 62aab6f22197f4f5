#include "dembed/operators.hpp"

#include <array>
#include <string>

#include "dembed/detail/compensated_sum.hpp"
#include "dembed/lifts.hpp"

namespace dembed {

std::string_view to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::Delta: return "Delta";
    case OperatorKind::Nabla: return "Nabla";
    case OperatorKind::Delta2: return "Delta2";
    case OperatorKind::Delta3: return "Delta3";
    case OperatorKind::JDelta: return "JDelta";
    case OperatorKind::JNabla: return "JNabla";
    case OperatorKind::JDelta2: return "JDelta2";
    case OperatorKind::JDelta3: return "JDelta3";
  }
  return "?";
}

int block_width(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::Delta2:
    case OperatorKind::JDelta2: return 2;
    case OperatorKind::Delta3:
    case OperatorKind::JDelta3: return 3;
    default: return 1;
  }
}

namespace {

void require_blocks(const DiscreteFunction& f, OperatorKind kind) {
  const int w = block_width(kind);
  if (f.grid().steps() % w != 0) {
    throw DivisibilityError(std::string(to_string(kind)) + " needs N divisible by " +
                            std::to_string(w) + ", got N = " +
                            std::to_string(f.grid().steps()));
  }
}

// Samples 0..N-1 must be present (Full or Plus input).
void require_plus_samples(const DiscreteFunction& f, std::string_view op) {
  if (!f.defined_at(0) || !f.defined_at(f.grid().steps() - 1)) {
    throw SupportError(std::string(op) + " needs samples at nodes 0..N-1, got " +
                       std::string(to_string(f.support())) + " support");
  }
}

// Row r of a block stencil of width W: output node start + r is
// (sum_j weights[r][j] F_{start + j}) / (scale * h). Every row sums to zero,
// so the block-start value is subtracted first and constants map to exact 0.
template <size_t W>
DiscreteFunction block_stencil(const DiscreteFunction& f,
                               const std::array<std::array<double, W + 1>, W>& weights,
                               double scale) {
  const TimeGrid& grid = f.grid();
  const int d = f.dim();
  const double denom = scale * grid.h();
  std::vector<double> out;
  out.reserve(static_cast<size_t>(grid.steps()) * static_cast<size_t>(d));
  for (int start = 0; start < grid.steps(); start += static_cast<int>(W)) {
    for (size_t r = 0; r < W; ++r) {
      for (int c = 0; c < d; ++c) {
        const double base = f(start, c);
        double s = 0.0;
        for (size_t j = 1; j <= W; ++j) s += weights[r][j] * (f(start + static_cast<int>(j), c) - base);
        out.push_back(s / denom);
      }
    }
  }
  return {grid, Support::Plus, d, std::move(out)};
}

}  // namespace

DiscreteFunction delta(const DiscreteFunction& f) {
  require_support(f, Support::Full, "delta");
  return block_stencil<1>(f, {{{-1.0, 1.0}}}, 1.0);
}

DiscreteFunction nabla(const DiscreteFunction& f) {
  require_support(f, Support::Full, "nabla");
  // same numbers as delta, relabelled onto 1..N
  return sigma(block_stencil<1>(f, {{{-1.0, 1.0}}}, 1.0));
}

DiscreteFunction delta2(const DiscreteFunction& f) {
  require_support(f, Support::Full, "delta2");
  require_blocks(f, OperatorKind::Delta2);
  return block_stencil<2>(f,
                          {{
                              {-3.0, 4.0, -1.0},
                              {-1.0, 0.0, 1.0},
                          }},
                          2.0);
}

DiscreteFunction delta3(const DiscreteFunction& f) {
  require_support(f, Support::Full, "delta3");
  require_blocks(f, OperatorKind::Delta3);
  return block_stencil<3>(f,
                          {{
                              {-11.0, 18.0, -9.0, 2.0},
                              {-2.0, -3.0, 6.0, -1.0},
                              {1.0, -6.0, 3.0, 2.0},
                          }},
                          6.0);
}

DiscreteFunction j_delta(const DiscreteFunction& f) {
  require_plus_samples(f, "j_delta");
  const TimeGrid& grid = f.grid();
  const int n = grid.steps();
  const int d = f.dim();
  std::vector<double> out(static_cast<size_t>(n + 1) * static_cast<size_t>(d), 0.0);
  for (int c = 0; c < d; ++c) {
    detail::CompensatedSum sum;
    for (int k = 1; k <= n; ++k) {
      sum.add(f(k - 1, c));
      out[static_cast<size_t>(k * d + c)] = grid.h() * sum.value();
    }
  }
  return {grid, Support::Full, d, std::move(out)};
}

DiscreteFunction j_nabla(const DiscreteFunction& f) {
  if (!f.defined_at(1) || !f.defined_at(f.grid().steps())) {
    throw SupportError("j_nabla needs samples at nodes 1..N, got " +
                       std::string(to_string(f.support())) + " support");
  }
  const TimeGrid& grid = f.grid();
  const int n = grid.steps();
  const int d = f.dim();
  std::vector<double> out(static_cast<size_t>(n + 1) * static_cast<size_t>(d), 0.0);
  for (int c = 0; c < d; ++c) {
    detail::CompensatedSum sum;
    for (int k = 1; k <= n; ++k) {
      sum.add(f(k, c));
      out[static_cast<size_t>(k * d + c)] = grid.h() * sum.value();
    }
  }
  return {grid, Support::Full, d, std::move(out)};
}

DiscreteFunction j_delta2(const DiscreteFunction& f) {
  require_plus_samples(f, "j_delta2");
  require_blocks(f, OperatorKind::JDelta2);
  const TimeGrid& grid = f.grid();
  const double h = grid.h();
  const int n = grid.steps();
  const int d = f.dim();
  std::vector<double> out(static_cast<size_t>(n + 1) * static_cast<size_t>(d), 0.0);
  for (int c = 0; c < d; ++c) {
    detail::CompensatedSum block_sum;
    for (int k = 0; 2 * k < n; ++k) {
      const double base = block_sum.value();
      const double f0 = f(2 * k, c);
      const double f1 = f(2 * k + 1, c);
      out[static_cast<size_t>((2 * k + 1) * d + c)] = base + h * (f0 + f1) / 2.0;
      block_sum.add(2.0 * h * f1);
      out[static_cast<size_t>((2 * k + 2) * d + c)] = block_sum.value();
    }
  }
  return {grid, Support::Full, d, std::move(out)};
}

DiscreteFunction j_delta3(const DiscreteFunction& f) {
  require_plus_samples(f, "j_delta3");
  require_blocks(f, OperatorKind::JDelta3);
  const TimeGrid& grid = f.grid();
  const double h = grid.h();
  const int n = grid.steps();
  const int d = f.dim();
  std::vector<double> out(static_cast<size_t>(n + 1) * static_cast<size_t>(d), 0.0);
  for (int c = 0; c < d; ++c) {
    detail::CompensatedSum block_sum;
    for (int k = 0; 3 * k < n; ++k) {
      const double base = block_sum.value();
      const double f0 = f(3 * k, c);
      const double f1 = f(3 * k + 1, c);
      const double f2 = f(3 * k + 2, c);
      out[static_cast<size_t>((3 * k + 1) * d + c)] =
          base + h / 12.0 * (5.0 * f0 + 8.0 * f1 - f2);
      out[static_cast<size_t>((3 * k + 2) * d + c)] = base + h / 3.0 * (f0 + 4.0 * f1 + f2);
      block_sum.add(3.0 * h / 4.0 * (f0 + 3.0 * f2));
      out[static_cast<size_t>((3 * k + 3) * d + c)] = block_sum.value();
    }
  }
  return {grid, Support::Full, d, std::move(out)};
}

DiscreteFunction apply(OperatorKind kind, const DiscreteFunction& f) {
  switch (kind) {
    case OperatorKind::Delta: return delta(f);
    case OperatorKind::Nabla: return nabla(f);
    case OperatorKind::Delta2: return delta2(f);
    case OperatorKind::Delta3: return delta3(f);
    case OperatorKind::JDelta: return j_delta(f);
    case OperatorKind::JNabla: return j_nabla(f);
    case OperatorKind::JDelta2: return j_delta2(f);
    case OperatorKind::JDelta3: return j_delta3(f);
  }
  throw DomainError("unknown operator kind");
}

double pairing_functional(const DiscreteFunction& f, const DiscreteFunction& g,
                          Antiderivative kind) {
  const auto paired = pair_star(f, g);
  const int n = f.grid().steps();
  const auto j = kind == Antiderivative::JDelta ? j_delta(paired) : j_nabla(paired);
  return j(n);
}

DuboisRaymondResult dubois_raymond_witness(const DiscreteFunction& f) {
  require_support(f, Support::Full, "dubois_raymond_witness");
  if (f.dim() != 1) throw DomainError("dubois_raymond_witness needs a scalar function");
  const int n = f.grid().steps();
  bool interior_zero = true;
  std::vector<double> g(static_cast<size_t>(n + 1), 0.0);
  for (int k = 1; k < n; ++k) {
    g[static_cast<size_t>(k)] = f(k);
    if (f(k) != 0.0) interior_zero = false;
  }
  if (interior_zero) return {true, std::nullopt, 0.0};
  auto witness = DiscreteFunction::scalar(f.grid(), Support::Full, std::move(g));
  const double pairing = pairing_functional(f, witness, Antiderivative::JDelta);
  return {false, std::move(witness), pairing};
}

namespace pipeline {

DiscreteFunction delta(const DiscreteFunction& f) {
  return restrict_to(pi_project(d_plus(iota1(f))), Support::Plus);
}

DiscreteFunction nabla(const DiscreteFunction& f) {
  return restrict_to(pi_project(d_minus(iota1(f))), Support::Minus);
}

DiscreteFunction delta2(const DiscreteFunction& f) {
  return restrict_to(pi_project(d_plus(iota2(f))), Support::Plus);
}

DiscreteFunction delta3(const DiscreteFunction& f) {
  return restrict_to(pi_project(d_plus(iota3(f))), Support::Plus);
}

DiscreteFunction j_delta(const DiscreteFunction& f) {
  return pi_project(antiderivative(iota0_plus(f)));
}

DiscreteFunction j_nabla(const DiscreteFunction& f) {
  return pi_project(antiderivative(iota0_minus(f)));
}

DiscreteFunction j_delta2(const DiscreteFunction& f) {
  return pi_project(antiderivative(iota1_plus(f)));
}

DiscreteFunction j_delta3(const DiscreteFunction& f) {
  return pi_project(antiderivative(iota2_plus(f)));
}

DiscreteFunction apply(OperatorKind kind, const DiscreteFunction& f) {
  switch (kind) {
    case OperatorKind::Delta: return pipeline::delta(f);
    case OperatorKind::Nabla: return pipeline::nabla(f);
    case OperatorKind::Delta2: return pipeline::delta2(f);
    case OperatorKind::Delta3: return pipeline::delta3(f);
    case OperatorKind::JDelta: return pipeline::j_delta(f);
    case OperatorKind::JNabla: return pipeline::j_nabla(f);
    case OperatorKind::JDelta2: return pipeline::j_delta2(f);
    case OperatorKind::JDelta3: return pipeline::j_delta3(f);
  }
  throw DomainError("unknown operator kind");
}

}  // namespace pipeline

}  // namespace dembed
