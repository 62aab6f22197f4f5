#pragma once

#include <stdexcept>
#include <string>

namespace dembed {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation received a discrete function with the wrong support tag,
/// or an index outside the support was requested.
class SupportError : public Error {
 public:
  using Error::Error;
};

/// Two discrete functions cannot be combined pointwise (grid, support or
/// dimension differ).
class CombinabilityError : public Error {
 public:
  using Error::Error;
};

/// The grid step count is not a multiple of the block width an operator needs.
class DivisibilityError : public Error {
 public:
  using Error::Error;
};

/// Evaluation point or argument outside the admissible domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A user callable failed (threw or returned a non-finite value) at a node.
class EvaluationError : public Error {
 public:
  EvaluationError(int node, const std::string& what)
      : Error("evaluation failed at node " + std::to_string(node) + ": " + what),
        node_(node) {}
  int node() const { return node_; }

 private:
  int node_;
};

/// Newton iteration did not reach the residual tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(double last_residual, int iterations)
      : Error("Newton did not converge after " + std::to_string(iterations) +
              " iterations (residual " + std::to_string(last_residual) + ")"),
        last_residual_(last_residual) {}
  double last_residual() const { return last_residual_; }

 private:
  double last_residual_;
};

/// Newton matrix is numerically singular.
class SingularJacobianError : public Error {
 public:
  using Error::Error;
};

/// A time-stepping scheme failed to advance past a given node.
class StepFailure : public Error {
 public:
  StepFailure(int step, const std::string& why)
      : Error("step " + std::to_string(step) + " failed: " + why), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

/// The discrete Legendre transform is not invertible along the trajectory.
class DegeneracyError : public Error {
 public:
  DegeneracyError(int step, const std::string& why)
      : Error("degenerate Lagrangian at step " + std::to_string(step) + ": " + why),
        step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

}  // namespace dembed
