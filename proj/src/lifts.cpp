#include "dembed/lifts.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dembed/detail/compensated_sum.hpp"

namespace dembed {

namespace {

double horner(const PiecewisePoly::Coefficients& c, double u) {
  double v = c[kMaxDegree];
  for (int i = kMaxDegree - 1; i >= 0; --i) v = v * u + c[static_cast<size_t>(i)];
  return v;
}

double abs_horner(const PiecewisePoly::Coefficients& c, double u) {
  double v = std::abs(c[kMaxDegree]);
  for (int i = kMaxDegree - 1; i >= 0; --i) v = v * std::abs(u) + std::abs(c[static_cast<size_t>(i)]);
  return v;
}

void require_divisible(const TimeGrid& grid, int width, const char* op) {
  if (grid.steps() % width != 0) {
    throw DivisibilityError(std::string(op) + " needs N divisible by " + std::to_string(width) +
                            ", got N = " + std::to_string(grid.steps()));
  }
}

}  // namespace

PiecewisePoly::PiecewisePoly(TimeGrid grid, int block_width, ContinuitySide side, int dim,
                             std::vector<Coefficients> coefficients)
    : grid_(grid), block_width_(block_width), side_(side), dim_(dim),
      coeffs_(std::move(coefficients)) {
  if (block_width < 1 || block_width > 3) {
    throw DomainError("block width must be 1, 2 or 3");
  }
  require_divisible(grid_, block_width_, "piecewise polynomial");
  if (dim < 1) throw DomainError("piecewise polynomial needs dim >= 1");
  if (coeffs_.size() != static_cast<size_t>(blocks()) * static_cast<size_t>(dim)) {
    throw DomainError("coefficient table has wrong size");
  }
  if (side_ == ContinuitySide::Continuous) {
    const double width = block_width_ * grid_.h();
    for (int q = 0; q + 1 < blocks(); ++q) {
      for (int c = 0; c < dim_; ++c) {
        const auto& left = this->coefficients(q, c);
        const auto& right = this->coefficients(q + 1, c);
        const double lv = horner(left, width);
        const double rv = right[0];
        const double scale = std::max({1.0, abs_horner(left, width), std::abs(rv)});
        if (std::abs(lv - rv) > 1e-12 * scale) {
          throw DomainError("continuous piecewise polynomial jumps at block " +
                            std::to_string(q + 1));
        }
      }
    }
  }
}

PiecewisePoly PiecewisePoly::zero(TimeGrid grid, int block_width, ContinuitySide side, int dim) {
  const auto count = static_cast<size_t>(grid.steps() / block_width) * static_cast<size_t>(dim);
  return {grid, block_width, side, dim, std::vector<Coefficients>(count, Coefficients{})};
}

int PiecewisePoly::degree() const {
  int deg = 0;
  for (const auto& c : coeffs_) {
    for (int i = kMaxDegree; i > deg; --i) {
      if (c[static_cast<size_t>(i)] != 0.0) {
        deg = i;
        break;
      }
    }
  }
  return deg;
}

const PiecewisePoly::Coefficients& PiecewisePoly::coefficients(int block, int component) const {
  return coeffs_[static_cast<size_t>(block) * static_cast<size_t>(dim_) +
                 static_cast<size_t>(component)];
}

int PiecewisePoly::block_for_node(int k) const {
  if (side_ == ContinuitySide::LeftContinuous) {
    const int q = (k + block_width_ - 1) / block_width_ - 1;
    return std::max(q, 0);
  }
  return std::min(k / block_width_, blocks() - 1);
}

std::vector<double> PiecewisePoly::eval_local(int block, double u) const {
  std::vector<double> out(static_cast<size_t>(dim_));
  for (int c = 0; c < dim_; ++c) out[static_cast<size_t>(c)] = horner(coefficients(block, c), u);
  return out;
}

std::vector<double> PiecewisePoly::eval_at_node(int k) const {
  if (k < 0 || k > grid_.steps()) {
    throw DomainError("node " + std::to_string(k) + " outside the grid");
  }
  const int q = block_for_node(k);
  return eval_local(q, (k - q * block_width_) * grid_.h());
}

std::vector<double> PiecewisePoly::eval(double t) const {
  if (!(t >= grid_.a() && t <= grid_.b())) {
    throw DomainError("t = " + std::to_string(t) + " outside [a, b]");
  }
  const double s = (t - grid_.a()) / grid_.h();
  const double nearest = std::round(s);
  if (std::abs(s - nearest) <= 1e-10 * std::max(1.0, std::abs(s))) {
    return eval_at_node(static_cast<int>(nearest));
  }
  const int q = std::clamp(static_cast<int>(std::floor(s / block_width_)), 0, blocks() - 1);
  return eval_local(q, t - block_start(q));
}

LagrangeBasis::LagrangeBasis(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  const size_t n = nodes_.size();
  if (n == 0 || n > kMaxDegree + 1) throw DomainError("Lagrange basis needs 1..4 nodes");
  weights_.assign(n, 1.0);
  basis_.assign(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i) {
    double denom = 1.0;
    // numerator prod_{j != i} (x - T_j), built one factor at a time
    std::vector<double> num{1.0};
    for (size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      if (nodes_[i] == nodes_[j]) throw DomainError("Lagrange nodes must be distinct");
      denom *= nodes_[i] - nodes_[j];
      std::vector<double> next(num.size() + 1, 0.0);
      for (size_t p = 0; p < num.size(); ++p) {
        next[p + 1] += num[p];
        next[p] -= nodes_[j] * num[p];
      }
      num = std::move(next);
    }
    weights_[i] = 1.0 / denom;
    for (size_t p = 0; p < n; ++p) basis_[i][p] = num[p] / denom;
  }
}

std::vector<double> LagrangeBasis::interpolate(std::span<const double> values) const {
  if (values.size() != nodes_.size()) throw DomainError("value count does not match nodes");
  // sum_i l_i = 1, so the non-constant coefficients only see values[i] - values[0];
  // constant data then has exactly zero higher coefficients.
  std::vector<double> out(nodes_.size(), 0.0);
  for (size_t i = 0; i < nodes_.size(); ++i) out[0] += values[i] * basis_[i][0];
  for (size_t i = 1; i < nodes_.size(); ++i) {
    for (size_t p = 1; p < nodes_.size(); ++p) out[p] += (values[i] - values[0]) * basis_[i][p];
  }
  return out;
}

double LagrangeBasis::eval_barycentric(std::span<const double> values, double x) const {
  double num = 0.0;
  double den = 0.0;
  for (size_t i = 0; i < nodes_.size(); ++i) {
    if (x == nodes_[i]) return values[i];
    const double w = weights_[i] / (x - nodes_[i]);
    num += w * values[i];
    den += w;
  }
  return num / den;
}

double LagrangeBasis::partition_of_unity_defect() const {
  double defect = 0.0;
  for (size_t p = 0; p < nodes_.size(); ++p) {
    double s = 0.0;
    for (const auto& l : basis_) s += l[p];
    defect = std::max(defect, std::abs(s - (p == 0 ? 1.0 : 0.0)));
  }
  return defect;
}

DiscreteFunction pi_project(const PiecewisePoly& p) {
  const int n = p.grid().steps();
  std::vector<double> values;
  values.reserve(static_cast<size_t>(n + 1) * static_cast<size_t>(p.dim()));
  for (int k = 0; k <= n; ++k) {
    const auto v = p.eval_at_node(k);
    values.insert(values.end(), v.begin(), v.end());
  }
  return {p.grid(), Support::Full, p.dim(), std::move(values)};
}

namespace {

// Interpolates, on every block of `width` steps, the samples at local
// offsets `offsets` and extends the result over the whole block.
PiecewisePoly lift(const DiscreteFunction& f, int width, std::vector<int> offsets,
                   ContinuitySide side, const char* op) {
  const TimeGrid& grid = f.grid();
  require_divisible(grid, width, op);
  const int blocks = grid.steps() / width;
  for (int q = 0; q < blocks; ++q) {
    for (int off : offsets) {
      if (!f.defined_at(q * width + off)) {
        throw SupportError(std::string(op) + " needs a sample at node " +
                           std::to_string(q * width + off) + " but input has " +
                           std::string(to_string(f.support())) + " support");
      }
    }
  }
  std::vector<double> local;
  for (int off : offsets) local.push_back(off * grid.h());
  const LagrangeBasis basis(local);

  std::vector<PiecewisePoly::Coefficients> coeffs;
  coeffs.reserve(static_cast<size_t>(blocks) * static_cast<size_t>(f.dim()));
  std::vector<double> samples(offsets.size());
  for (int q = 0; q < blocks; ++q) {
    for (int c = 0; c < f.dim(); ++c) {
      for (size_t j = 0; j < offsets.size(); ++j) samples[j] = f(q * width + offsets[j], c);
      const auto poly = basis.interpolate(samples);
      PiecewisePoly::Coefficients row{};
      std::copy(poly.begin(), poly.end(), row.begin());
      coeffs.push_back(row);
    }
  }
  return {grid, width, side, f.dim(), std::move(coeffs)};
}

}  // namespace

PiecewisePoly iota0_plus(const DiscreteFunction& f) {
  return lift(f, 1, {0}, ContinuitySide::RightContinuous, "iota0_plus");
}

PiecewisePoly iota0_minus(const DiscreteFunction& f) {
  return lift(f, 1, {1}, ContinuitySide::LeftContinuous, "iota0_minus");
}

PiecewisePoly iota1(const DiscreteFunction& f) {
  require_support(f, Support::Full, "iota1");
  return lift(f, 1, {0, 1}, ContinuitySide::Continuous, "iota1");
}

PiecewisePoly iota2(const DiscreteFunction& f) {
  require_support(f, Support::Full, "iota2");
  return lift(f, 2, {0, 1, 2}, ContinuitySide::Continuous, "iota2");
}

PiecewisePoly iota3(const DiscreteFunction& f) {
  require_support(f, Support::Full, "iota3");
  return lift(f, 3, {0, 1, 2, 3}, ContinuitySide::Continuous, "iota3");
}

PiecewisePoly iota1_plus(const DiscreteFunction& f) {
  return lift(f, 2, {0, 1}, ContinuitySide::RightContinuous, "iota1_plus");
}

PiecewisePoly iota2_plus(const DiscreteFunction& f) {
  return lift(f, 3, {0, 1, 2}, ContinuitySide::RightContinuous, "iota2_plus");
}

namespace {

PiecewisePoly differentiate(const PiecewisePoly& p, ContinuitySide side) {
  std::vector<PiecewisePoly::Coefficients> out;
  out.reserve(static_cast<size_t>(p.blocks()) * static_cast<size_t>(p.dim()));
  for (int q = 0; q < p.blocks(); ++q) {
    for (int c = 0; c < p.dim(); ++c) {
      const auto& in = p.coefficients(q, c);
      PiecewisePoly::Coefficients d{};
      for (int i = 1; i <= kMaxDegree; ++i) {
        d[static_cast<size_t>(i - 1)] = i * in[static_cast<size_t>(i)];
      }
      out.push_back(d);
    }
  }
  return {p.grid(), p.block_width(), side, p.dim(), std::move(out)};
}

}  // namespace

PiecewisePoly d_plus(const PiecewisePoly& p) {
  return differentiate(p, ContinuitySide::RightContinuous);
}

PiecewisePoly d_minus(const PiecewisePoly& p) {
  return differentiate(p, ContinuitySide::LeftContinuous);
}

PiecewisePoly antiderivative(const PiecewisePoly& p) {
  if (p.degree() >= kMaxDegree) {
    throw DomainError("antiderivative of a cubic exceeds the supported degree");
  }
  const double width = p.block_width() * p.grid().h();
  std::vector<PiecewisePoly::Coefficients> out(static_cast<size_t>(p.blocks()) *
                                               static_cast<size_t>(p.dim()));
  for (int c = 0; c < p.dim(); ++c) {
    detail::CompensatedSum offset;
    for (int q = 0; q < p.blocks(); ++q) {
      const auto& in = p.coefficients(q, c);
      PiecewisePoly::Coefficients integral{};
      for (int i = 0; i < kMaxDegree; ++i) {
        integral[static_cast<size_t>(i + 1)] = in[static_cast<size_t>(i)] / (i + 1);
      }
      integral[0] = offset.value();
      out[static_cast<size_t>(q) * static_cast<size_t>(p.dim()) + static_cast<size_t>(c)] =
          integral;
      integral[0] = 0.0;
      offset.add(horner(integral, width));
    }
  }
  return {p.grid(), p.block_width(), ContinuitySide::Continuous, p.dim(), std::move(out)};
}

}  // namespace dembed
