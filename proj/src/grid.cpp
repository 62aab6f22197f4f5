#include "dembed/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dembed/detail/compensated_sum.hpp"

namespace dembed {

TimeGrid::TimeGrid(double a, double b, int steps) : a_(a), b_(b), steps_(steps), h_(0.0) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) {
    throw DomainError("time grid needs finite a < b");
  }
  if (steps < 1) {
    throw DomainError("time grid needs at least one step");
  }
  h_ = (b - a) / steps;
}

double TimeGrid::node(int k) const {
  if (k < 0 || k > steps_) {
    throw SupportError("node index " + std::to_string(k) + " outside 0.." +
                       std::to_string(steps_));
  }
  return k == steps_ ? b_ : a_ + k * h_;
}

std::string_view to_string(Support s) {
  switch (s) {
    case Support::Full: return "Full";
    case Support::Plus: return "Plus";
    case Support::Minus: return "Minus";
    case Support::Interior: return "Interior";
  }
  return "?";
}

int first_index(Support s) {
  return (s == Support::Full || s == Support::Plus) ? 0 : 1;
}

int last_index(Support s, int steps) {
  return (s == Support::Full || s == Support::Minus) ? steps : steps - 1;
}

int node_count(Support s, int steps) {
  return last_index(s, steps) - first_index(s) + 1;
}

DiscreteFunction::DiscreteFunction(TimeGrid grid, Support support, int dim,
                                   std::vector<double> values)
    : grid_(grid), support_(support), dim_(dim), values_(std::move(values)) {
  if (dim < 1) {
    throw DomainError("discrete function needs dim >= 1");
  }
  const int count = dembed::node_count(support, grid.steps());
  if (count < 1) {
    throw SupportError(std::string("support ") + std::string(to_string(support)) +
                       " is empty for N = " + std::to_string(grid.steps()));
  }
  if (values_.size() != static_cast<size_t>(count) * static_cast<size_t>(dim)) {
    throw SupportError("expected " + std::to_string(count * dim) + " values, got " +
                       std::to_string(values_.size()));
  }
}

DiscreteFunction DiscreteFunction::zeros(TimeGrid grid, Support support, int dim) {
  const auto count = static_cast<size_t>(dembed::node_count(support, grid.steps()));
  return {grid, support, dim, std::vector<double>(count * static_cast<size_t>(dim), 0.0)};
}

DiscreteFunction DiscreteFunction::scalar(TimeGrid grid, Support support,
                                          std::vector<double> values) {
  return {grid, support, 1, std::move(values)};
}

std::span<const double> DiscreteFunction::at(int k) const {
  if (!defined_at(k)) {
    throw SupportError("node " + std::to_string(k) + " not in " +
                       std::string(to_string(support_)) + " support");
  }
  const auto offset = static_cast<size_t>(k - first_index()) * static_cast<size_t>(dim_);
  return std::span<const double>(values_).subspan(offset, static_cast<size_t>(dim_));
}

void require_combinable(const DiscreteFunction& f, const DiscreteFunction& g) {
  if (!(f.grid() == g.grid())) {
    throw CombinabilityError("discrete functions live on different grids");
  }
  if (f.support() != g.support()) {
    throw CombinabilityError(std::string("support mismatch: ") +
                             std::string(to_string(f.support())) + " vs " +
                             std::string(to_string(g.support())));
  }
  if (f.dim() != g.dim()) {
    throw CombinabilityError("dimension mismatch: " + std::to_string(f.dim()) + " vs " +
                             std::to_string(g.dim()));
  }
}

void require_support(const DiscreteFunction& f, Support s, std::string_view op) {
  if (f.support() != s) {
    throw SupportError(std::string(op) + " expects " + std::string(to_string(s)) +
                       " support, got " + std::string(to_string(f.support())));
  }
}

DiscreteFunction discretise(const std::function<std::vector<double>(double)>& f,
                            const TimeGrid& grid) {
  std::vector<double> values;
  int dim = 0;
  for (int k = 0; k <= grid.steps(); ++k) {
    std::vector<double> sample;
    try {
      sample = f(grid.node(k));
    } catch (const std::exception& e) {
      throw EvaluationError(k, e.what());
    }
    if (k == 0) {
      dim = static_cast<int>(sample.size());
      if (dim == 0) throw EvaluationError(k, "empty sample");
      values.reserve(static_cast<size_t>(dim) * static_cast<size_t>(grid.steps() + 1));
    } else if (static_cast<int>(sample.size()) != dim) {
      throw EvaluationError(k, "sample dimension changed");
    }
    for (double v : sample) {
      if (!std::isfinite(v)) throw EvaluationError(k, "non-finite value");
      values.push_back(v);
    }
  }
  return {grid, Support::Full, dim, std::move(values)};
}

DiscreteFunction constant_lift(std::span<const double> c, const TimeGrid& grid) {
  std::vector<double> values;
  values.reserve(c.size() * static_cast<size_t>(grid.steps() + 1));
  for (int k = 0; k <= grid.steps(); ++k) values.insert(values.end(), c.begin(), c.end());
  return {grid, Support::Full, static_cast<int>(c.size()), std::move(values)};
}

DiscreteFunction constant_lift(double c, const TimeGrid& grid) {
  return constant_lift(std::span<const double>(&c, 1), grid);
}

DiscreteFunction sigma(const DiscreteFunction& f) {
  require_support(f, Support::Plus, "sigma");
  return {f.grid(), Support::Minus, f.dim(), {f.values().begin(), f.values().end()}};
}

DiscreteFunction rho(const DiscreteFunction& f) {
  require_support(f, Support::Minus, "rho");
  return {f.grid(), Support::Plus, f.dim(), {f.values().begin(), f.values().end()}};
}

DiscreteFunction restrict_to(const DiscreteFunction& f, Support target) {
  const int n = f.grid().steps();
  const int lo = first_index(target);
  const int hi = last_index(target, n);
  if (!f.defined_at(lo) || !f.defined_at(hi)) {
    throw SupportError(std::string("cannot restrict ") + std::string(to_string(f.support())) +
                       " to " + std::string(to_string(target)));
  }
  const auto d = static_cast<size_t>(f.dim());
  const auto begin = f.values().begin() + static_cast<std::ptrdiff_t>(
                                              static_cast<size_t>(lo - f.first_index()) * d);
  const auto end = begin + static_cast<std::ptrdiff_t>(static_cast<size_t>(hi - lo + 1) * d);
  return {f.grid(), target, f.dim(), {begin, end}};
}

DiscreteFunction star(const DiscreteFunction& f, const DiscreteFunction& g) {
  require_combinable(f, g);
  std::vector<double> out(f.values().size());
  std::transform(f.values().begin(), f.values().end(), g.values().begin(), out.begin(),
                 [](double x, double y) { return x * y; });
  return {f.grid(), f.support(), f.dim(), std::move(out)};
}

DiscreteFunction pair_star(const DiscreteFunction& f, const DiscreteFunction& g) {
  require_combinable(f, g);
  std::vector<double> out;
  out.reserve(static_cast<size_t>(f.node_count()));
  for (int k = f.first_index(); k <= f.last_index(); ++k) {
    const auto fk = f.at(k);
    const auto gk = g.at(k);
    double s = 0.0;
    for (size_t c = 0; c < fk.size(); ++c) s += fk[c] * gk[c];
    out.push_back(s);
  }
  return {f.grid(), f.support(), 1, std::move(out)};
}

namespace {

double scalar_product_over(const DiscreteFunction& f, const DiscreteFunction& g, int lo, int hi) {
  if (!(f.grid() == g.grid()) || f.dim() != g.dim()) {
    throw CombinabilityError("scalar product needs matching grid and dimension");
  }
  detail::CompensatedSum sum;
  for (int k = lo; k <= hi; ++k) {
    const auto fk = f.at(k);
    const auto gk = g.at(k);
    for (size_t c = 0; c < fk.size(); ++c) sum.add(fk[c] * gk[c]);
  }
  return f.grid().h() * sum.value();
}

}  // namespace

double scalar_product_plus(const DiscreteFunction& f, const DiscreteFunction& g) {
  return scalar_product_over(f, g, 0, f.grid().steps() - 1);
}

double scalar_product_minus(const DiscreteFunction& f, const DiscreteFunction& g) {
  return scalar_product_over(f, g, 1, f.grid().steps());
}

bool is_boundary_zero(const DiscreteFunction& f) {
  require_support(f, Support::Full, "is_boundary_zero");
  const auto zero = [](double x) { return x == 0.0; };
  const auto first = f.at(0);
  const auto last = f.at(f.grid().steps());
  return std::all_of(first.begin(), first.end(), zero) &&
         std::all_of(last.begin(), last.end(), zero);
}

namespace {

template <typename Op>
DiscreteFunction zip(const DiscreteFunction& f, const DiscreteFunction& g, Op op) {
  require_combinable(f, g);
  std::vector<double> out(f.values().size());
  std::transform(f.values().begin(), f.values().end(), g.values().begin(), out.begin(), op);
  return {f.grid(), f.support(), f.dim(), std::move(out)};
}

}  // namespace

DiscreteFunction operator+(const DiscreteFunction& f, const DiscreteFunction& g) {
  return zip(f, g, std::plus<>{});
}

DiscreteFunction operator-(const DiscreteFunction& f, const DiscreteFunction& g) {
  return zip(f, g, std::minus<>{});
}

DiscreteFunction operator*(double alpha, const DiscreteFunction& f) {
  std::vector<double> out(f.values().begin(), f.values().end());
  for (double& v : out) v *= alpha;
  return {f.grid(), f.support(), f.dim(), std::move(out)};
}

double sup_norm(const DiscreteFunction& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double sup_distance(const DiscreteFunction& f, const DiscreteFunction& g) {
  return sup_norm(f - g);
}

bool approx_equal(const DiscreteFunction& f, const DiscreteFunction& g, double tol) {
  const double scale = std::max(sup_norm(f), sup_norm(g));
  return sup_distance(f, g) <= std::max(tol, tol * scale);
}

}  // namespace dembed
