/// \file
/// Discrete derivatives and antiderivatives of orders 1 to 3.
///
/// Every operator has a closed-form stencil (namespace dembed) and a
/// composed implementation built from the lifts (namespace
/// dembed::pipeline):
///
///   delta   = pi o d+ o iota1      j_delta  = pi o int o iota0+
///   nabla   = pi o d- o iota1      j_nabla  = pi o int o iota0-
///   delta2  = pi o d+ o iota2      j_delta2 = pi o int o iota1+
///   delta3  = pi o d+ o iota3      j_delta3 = pi o int o iota2+
///
/// The two must agree; the composed versions exist as an oracle.

#pragma once

#include <optional>
#include <string_view>

#include "dembed/grid.hpp"

namespace dembed {

enum class OperatorKind { Delta, Nabla, Delta2, Delta3, JDelta, JNabla, JDelta2, JDelta3 };

std::string_view to_string(OperatorKind kind);
/// Number of grid steps N must be a multiple of this.
int block_width(OperatorKind kind);

/// (F_{k+1} - F_k) / h on Plus.
DiscreteFunction delta(const DiscreteFunction& f);
/// (F_k - F_{k-1}) / h on Minus.
DiscreteFunction nabla(const DiscreteFunction& f);
/// Quadratic-block forward derivative on Plus; N even.
DiscreteFunction delta2(const DiscreteFunction& f);
/// Cubic-block forward derivative on Plus; N divisible by 3.
DiscreteFunction delta3(const DiscreteFunction& f);

/// [J]_k = h sum_{i<k} F_i. Input Full or Plus, output Full.
DiscreteFunction j_delta(const DiscreteFunction& f);
/// [J]_k = h sum_{1<=i<=k} F_i. Input Full or Minus, output Full.
DiscreteFunction j_nabla(const DiscreteFunction& f);
/// Antiderivative matching delta2. Input Full or Plus; N even.
DiscreteFunction j_delta2(const DiscreteFunction& f);
/// Antiderivative matching delta3. Input Full or Plus; N divisible by 3.
DiscreteFunction j_delta3(const DiscreteFunction& f);

/// Dispatch on kind (derivative or antiderivative).
DiscreteFunction apply(OperatorKind kind, const DiscreteFunction& f);

enum class Antiderivative { JDelta, JNabla };

/// Terminal value [J(<F, G>_*)]_N.
double pairing_functional(const DiscreteFunction& f, const DiscreteFunction& g,
                          Antiderivative kind);

struct DuboisRaymondResult {
  bool interior_zero;
  /// Boundary-zero G equal to F at interior nodes; set iff !interior_zero.
  std::optional<DiscreteFunction> witness;
  /// pairing_functional(F, witness, JDelta) when a witness exists.
  double pairing = 0.0;
};

/// Decides whether a scalar Full F vanishes at interior nodes and, if not,
/// builds the boundary-zero test function that makes the pairing positive.
DuboisRaymondResult dubois_raymond_witness(const DiscreteFunction& f);

namespace pipeline {

DiscreteFunction delta(const DiscreteFunction& f);
DiscreteFunction nabla(const DiscreteFunction& f);
DiscreteFunction delta2(const DiscreteFunction& f);
DiscreteFunction delta3(const DiscreteFunction& f);
DiscreteFunction j_delta(const DiscreteFunction& f);
DiscreteFunction j_nabla(const DiscreteFunction& f);
DiscreteFunction j_delta2(const DiscreteFunction& f);
DiscreteFunction j_delta3(const DiscreteFunction& f);

DiscreteFunction apply(OperatorKind kind, const DiscreteFunction& f);

}  // namespace pipeline

}  // namespace dembed
