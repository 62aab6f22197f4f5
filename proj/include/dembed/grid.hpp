/// \file
/// Uniform time grids, support-tagged discrete functions and the pointwise
/// algebra on them (star product, pairings, the two discrete scalar products).

#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string_view>
#include <type_traits>
#include <vector>

#include "dembed/errors.hpp"

namespace dembed {

/// Uniform partition a = t_0 < t_1 < ... < t_N = b with step h = (b - a) / N.
class TimeGrid {
 public:
  TimeGrid(double a, double b, int steps);

  double a() const { return a_; }
  double b() const { return b_; }
  int steps() const { return steps_; }
  double h() const { return h_; }

  /// t_k = a + k h, with t_N pinned to b.
  double node(int k) const;

  bool operator==(const TimeGrid& other) const = default;

 private:
  double a_;
  double b_;
  int steps_;
  double h_;
};

/// Which nodes a discrete function lives on.
///   Full     -> 0..N
///   Plus     -> 0..N-1
///   Minus    -> 1..N
///   Interior -> 1..N-1
enum class Support { Full, Plus, Minus, Interior };

std::string_view to_string(Support s);
int first_index(Support s);
int last_index(Support s, int steps);
int node_count(Support s, int steps);

/// Vector-valued samples of a function on the nodes selected by a Support.
///
/// Values are stored node-major: component c of the sample at node k is
/// values()[(k - first_index()) * dim() + c]. Immutable once built.
class DiscreteFunction {
 public:
  DiscreteFunction(TimeGrid grid, Support support, int dim, std::vector<double> values);

  static DiscreteFunction zeros(TimeGrid grid, Support support, int dim);
  /// Scalar-valued convenience constructor.
  static DiscreteFunction scalar(TimeGrid grid, Support support, std::vector<double> values);

  const TimeGrid& grid() const { return grid_; }
  Support support() const { return support_; }
  int dim() const { return dim_; }
  int first_index() const { return dembed::first_index(support_); }
  int last_index() const { return dembed::last_index(support_, grid_.steps()); }
  int node_count() const { return dembed::node_count(support_, grid_.steps()); }
  bool defined_at(int k) const { return k >= first_index() && k <= last_index(); }

  std::span<const double> values() const { return values_; }
  /// Sample at global node index k (throws SupportError outside the support).
  std::span<const double> at(int k) const;
  double operator()(int k, int c = 0) const { return at(k)[static_cast<size_t>(c)]; }

 private:
  TimeGrid grid_;
  Support support_;
  int dim_;
  std::vector<double> values_;
};

/// Throws CombinabilityError unless grid, support and dim agree.
void require_combinable(const DiscreteFunction& f, const DiscreteFunction& g);
/// Throws SupportError unless f.support() == s.
void require_support(const DiscreteFunction& f, Support s, std::string_view op);

/// Samples f at every node. f may return a double or a std::vector<double>.
/// Throws EvaluationError naming the node when f throws or returns a
/// non-finite value.
DiscreteFunction discretise(const std::function<std::vector<double>(double)>& f,
                            const TimeGrid& grid);

template <typename F>
  requires std::is_convertible_v<std::invoke_result_t<F, double>, double>
DiscreteFunction discretise(F&& f, const TimeGrid& grid) {
  return discretise(
      [&](double t) { return std::vector<double>{static_cast<double>(f(t))}; }, grid);
}

DiscreteFunction constant_lift(std::span<const double> c, const TimeGrid& grid);
DiscreteFunction constant_lift(double c, const TimeGrid& grid);

/// Duality maps between Plus- and Minus-supported data; pure relabelings.
DiscreteFunction sigma(const DiscreteFunction& f);
DiscreteFunction rho(const DiscreteFunction& f);

/// Drops nodes so that the result lives on `target`, which must be a subset
/// of f's support.
DiscreteFunction restrict_to(const DiscreteFunction& f, Support target);

DiscreteFunction star(const DiscreteFunction& f, const DiscreteFunction& g);
/// Pointwise Euclidean inner product; result has dim 1.
DiscreteFunction pair_star(const DiscreteFunction& f, const DiscreteFunction& g);

/// h * sum_{k=0}^{N-1} <F_k, G_k>
double scalar_product_plus(const DiscreteFunction& f, const DiscreteFunction& g);
/// h * sum_{k=1}^{N} <F_k, G_k>
double scalar_product_minus(const DiscreteFunction& f, const DiscreteFunction& g);

/// F_0 == 0 and F_N == 0 componentwise (exact comparison). Requires Full.
bool is_boundary_zero(const DiscreteFunction& f);

DiscreteFunction operator+(const DiscreteFunction& f, const DiscreteFunction& g);
DiscreteFunction operator-(const DiscreteFunction& f, const DiscreteFunction& g);
DiscreteFunction operator*(double alpha, const DiscreteFunction& f);

double sup_norm(const DiscreteFunction& f);
double sup_distance(const DiscreteFunction& f, const DiscreteFunction& g);

/// |f - g| <= max(tol, tol * max(|f|, |g|)) in the sup norm. Supports and
/// dimensions must agree.
bool approx_equal(const DiscreteFunction& f, const DiscreteFunction& g, double tol = 1e-12);

}  // namespace dembed
