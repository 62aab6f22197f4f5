/// \file
/// Command-line front end behind the `dembed` executable.

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dembed::cli {

/// Exit codes are a stable contract.
enum ExitCode : int {
  kOk = 0,
  kSelftestFailed = 1,
  kConfigError = 2,
  kNumericalError = 3,
};

/// One run's settings. JSON config documents use these field names as keys.
struct RunConfig {
  std::string problem;
  /// A scheme name, or "del" for variational runs.
  std::string scheme = "DeltaDifferential";
  double a = 0.0;
  double b = 1.0;
  int N = 12;
  std::vector<double> x0;  ///< empty: the problem's default
  std::optional<std::vector<double>> x1;
  std::optional<std::vector<double>> v0;
  double tol = 1e-12;
  std::string output;  ///< empty: standard output
};

/// Parses `args` (args[0] is the program name) and runs the subcommand.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Renders a value with 17 significant digits.
std::string format_real(double x);

}  // namespace dembed::cli
