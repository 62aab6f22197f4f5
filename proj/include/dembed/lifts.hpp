/// \file
/// Piecewise-polynomial lifts of discrete functions and the projection back
/// onto the grid.
///
/// A PiecewisePoly splits [a, b] into blocks of `block_width` grid steps. On
/// block q, component c is a polynomial of degree <= 3 stored in the local
/// variable u = t - t_{q * block_width}. Evaluation at a block boundary
/// follows the continuity side:
///   RightContinuous  value on [t_start, t_end), t = b uses the last block
///   LeftContinuous   value on (t_start, t_end], t = a uses the first block
///   Continuous       blocks agree at boundaries

#pragma once

#include <array>
#include <span>
#include <vector>

#include "dembed/grid.hpp"

namespace dembed {

enum class ContinuitySide { RightContinuous, LeftContinuous, Continuous };

inline constexpr int kMaxDegree = 3;

class PiecewisePoly {
 public:
  using Coefficients = std::array<double, kMaxDegree + 1>;

  /// `coefficients` holds blocks * dim entries, block-major.
  PiecewisePoly(TimeGrid grid, int block_width, ContinuitySide side, int dim,
                std::vector<Coefficients> coefficients);

  static PiecewisePoly zero(TimeGrid grid, int block_width, ContinuitySide side, int dim);

  const TimeGrid& grid() const { return grid_; }
  int block_width() const { return block_width_; }
  int blocks() const { return grid_.steps() / block_width_; }
  ContinuitySide side() const { return side_; }
  int dim() const { return dim_; }
  /// Highest power with a nonzero coefficient anywhere (0 for the zero poly).
  int degree() const;

  const Coefficients& coefficients(int block, int component) const;
  double block_start(int block) const { return grid_.node(block * block_width_); }

  /// Value at t in [a, b] (DomainError otherwise).
  std::vector<double> eval(double t) const;
  /// Value at node k using exact index arithmetic for the block lookup.
  std::vector<double> eval_at_node(int k) const;

 private:
  int block_for_node(int k) const;
  std::vector<double> eval_local(int block, double u) const;

  TimeGrid grid_;
  int block_width_;
  ContinuitySide side_;
  int dim_;
  std::vector<Coefficients> coeffs_;
};

/// Lagrange basis on a handful of nodes, expanded into monomial coefficients.
class LagrangeBasis {
 public:
  explicit LagrangeBasis(std::vector<double> nodes);

  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& barycentric_weights() const { return weights_; }
  /// Monomial coefficients of l_i (length size()).
  const std::vector<double>& basis(int i) const { return basis_[static_cast<size_t>(i)]; }

  /// Coefficients of sum_i values[i] l_i.
  std::vector<double> interpolate(std::span<const double> values) const;
  /// Barycentric evaluation of the interpolant; independent of the expansion.
  double eval_barycentric(std::span<const double> values, double x) const;
  /// max_j |(sum_i l_i)_j - delta_{j0}| over monomial coefficients.
  double partition_of_unity_defect() const;

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<std::vector<double>> basis_;
};

/// Node values of p. One-sided polys take the limit from their own side and,
/// at the endpoint that side cannot reach, the adjacent block's closure.
DiscreteFunction pi_project(const PiecewisePoly& p);

/// Piecewise constant F_i on [t_i, t_{i+1}); needs samples 0..N-1.
PiecewisePoly iota0_plus(const DiscreteFunction& f);
/// Piecewise constant F_i on (t_{i-1}, t_i]; needs samples 1..N.
PiecewisePoly iota0_minus(const DiscreteFunction& f);
/// Continuous piecewise-linear interpolant; Full support.
PiecewisePoly iota1(const DiscreteFunction& f);
/// Lagrange quadratic per 2-step block; N even.
PiecewisePoly iota2(const DiscreteFunction& f);
/// Lagrange cubic per 3-step block; N divisible by 3.
PiecewisePoly iota3(const DiscreteFunction& f);
/// Line through the first two nodes of each 2-step block, right-continuous.
PiecewisePoly iota1_plus(const DiscreteFunction& f);
/// Quadratic through the first three nodes of each 3-step block, right-continuous.
PiecewisePoly iota2_plus(const DiscreteFunction& f);

/// Segmentwise derivative, read as a right-continuous poly.
PiecewisePoly d_plus(const PiecewisePoly& p);
/// Segmentwise derivative, read as a left-continuous poly.
PiecewisePoly d_minus(const PiecewisePoly& p);
/// t -> integral_a^t p(s) ds, exact; Continuous, degree + 1. Throws
/// DomainError when p has degree 3.
PiecewisePoly antiderivative(const PiecewisePoly& p);

}  // namespace dembed
