/// \file
/// Built-in invariant suite run by `dembed selftest`.

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dembed/grid.hpp"

namespace dembed {

/// The closed-form operators the suite exercises. Swapping one out lets a
/// caller check that the suite notices a broken stencil.
struct OperatorTable {
  using Op = std::function<DiscreteFunction(const DiscreteFunction&)>;
  Op delta;
  Op nabla;
  Op delta2;
  Op delta3;
  Op j_delta;
  Op j_nabla;
  Op j_delta2;
  Op j_delta3;

  static OperatorTable library();
  /// library() with the sign of the -9 weight in the block-start row of the
  /// cubic forward derivative flipped.
  static OperatorTable with_delta3_sign_fault();
};

struct InvariantResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SelftestReport {
  unsigned long long seed = 0;
  std::vector<InvariantResult> results;
  bool all_passed() const;
};

inline constexpr unsigned long long kSelftestSeed = 0x0d15c2e7eULL;

SelftestReport run_selftest(const OperatorTable& ops = OperatorTable::library(),
                            unsigned long long seed = kSelftestSeed);

}  // namespace dembed
