#include "dembed/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "dembed/errors.hpp"
#include "dembed/problems.hpp"
#include "dembed/selftest.hpp"
#include "dembed/study.hpp"

namespace dembed::cli {

namespace {

/// Raised for anything the user can fix by changing the configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flag values; a flag overrides the JSON document only when it was given.
struct Flags {
  std::string config;
  std::string problem;
  std::string scheme;
  double a = 0.0;
  double b = 0.0;
  int N = 0;
  std::vector<double> x0;
  std::vector<double> x1;
  std::vector<double> v0;
  double tol = 0.0;
  std::string output;
  std::vector<int> n_list{12, 24, 48, 96, 192};
  std::string fault;
  std::multimap<std::string, CLI::Option*> given;

  bool has(const std::string& name) const {
    const auto [lo, hi] = given.equal_range(name);
    return std::any_of(lo, hi, [](const auto& kv) { return kv.second->count() > 0; });
  }
};

void add_common_flags(CLI::App& cmd, Flags& f) {
  f.given.emplace("config", cmd.add_option("--config", f.config, "JSON document with RunConfig keys"));
  f.given.emplace("problem", cmd.add_option("--problem", f.problem, "registry name"));
  f.given.emplace("a", cmd.add_option("--a", f.a, "left endpoint"));
  f.given.emplace("b", cmd.add_option("--b", f.b, "right endpoint"));
  f.given.emplace("N", cmd.add_option("--N", f.N, "number of grid steps"));
  f.given.emplace("x0", cmd.add_option("--x0", f.x0, "initial state, comma separated")->delimiter(','));
  f.given.emplace("tol", cmd.add_option("--tol", f.tol, "Newton tolerance"));
  f.given.emplace("output", cmd.add_option("--out", f.output, "CSV destination (default stdout)"));
}

std::vector<double> json_vector(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_number()) return {v.get<double>()};
  return v.get<std::vector<double>>();
}

RunConfig resolve(const Flags& f, RunConfig cfg) {
  if (f.has("config")) {
    std::ifstream in(f.config);
    if (!in) throw ConfigError("cannot open config file '" + f.config + "'");
    nlohmann::json j;
    try {
      in >> j;
      if (!j.is_object()) throw ConfigError("config must be a JSON object");
      for (const auto& [key, value] : j.items()) {
        if (key == "problem") cfg.problem = value.get<std::string>();
        else if (key == "scheme") cfg.scheme = value.get<std::string>();
        else if (key == "a") cfg.a = value.get<double>();
        else if (key == "b") cfg.b = value.get<double>();
        else if (key == "N") cfg.N = value.get<int>();
        else if (key == "x0") cfg.x0 = json_vector(j, "x0");
        else if (key == "x1") cfg.x1 = json_vector(j, "x1");
        else if (key == "v0") cfg.v0 = json_vector(j, "v0");
        else if (key == "tol") cfg.tol = value.get<double>();
        else if (key == "output") cfg.output = value.get<std::string>();
        else throw ConfigError("unknown config key '" + key + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("invalid config: ") + e.what());
    }
  }
  if (f.has("problem")) cfg.problem = f.problem;
  if (f.has("scheme")) cfg.scheme = f.scheme;
  if (f.has("a")) cfg.a = f.a;
  if (f.has("b")) cfg.b = f.b;
  if (f.has("N")) cfg.N = f.N;
  if (f.has("x0")) cfg.x0 = f.x0;
  if (f.has("x1")) cfg.x1 = f.x1;
  if (f.has("v0")) cfg.v0 = f.v0;
  if (f.has("tol")) cfg.tol = f.tol;
  if (f.has("output")) cfg.output = f.output;
  if (cfg.N < 1) throw ConfigError("N must be at least 1");
  if (!(cfg.b > cfg.a)) throw ConfigError("b must exceed a");
  if (!(cfg.tol > 0.0)) throw ConfigError("tol must be positive");
  return cfg;
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Vector state_or_default(const std::vector<double>& given, const Vector& fallback, int dim,
                        const char* what) {
  if (given.empty()) return fallback;
  if (static_cast<int>(given.size()) != dim) {
    throw ConfigError(fmt::format("{} has {} components, problem dimension is {}", what,
                                  given.size(), dim));
  }
  return to_vector(given);
}

const OdeProblem& ode_problem(const RunConfig& cfg) {
  const auto* p = find_ode_problem(cfg.problem);
  if (p == nullptr) throw ConfigError("unknown ODE problem '" + cfg.problem + "'");
  return *p;
}

SchemeKind scheme_of(const RunConfig& cfg) {
  const auto s = parse_scheme(cfg.scheme);
  if (!s) throw ConfigError("unknown scheme '" + cfg.scheme + "'");
  return *s;
}

SolverConfig solver(const RunConfig& cfg) {
  SolverConfig s;
  s.tol = cfg.tol;
  return s;
}

/// Sink for CSV text: a file when `path` is set, otherwise `fallback`.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw ConfigError("cannot open output '" + path + "'");
      out_ = &file_;
    }
  }
  std::ostream& stream() { return *out_; }
  bool to_file() const { return file_.is_open(); }

 private:
  std::ofstream file_;
  std::ostream* out_;
};

void write_path_header(std::ostream& os, int dim) {
  os << "k,t";
  for (int c = 0; c < dim; ++c) os << ",x_" << c;
}

void write_path_row(std::ostream& os, const DiscreteFunction& x, int k) {
  os << k << ',' << format_real(x.grid().node(k));
  for (int c = 0; c < x.dim(); ++c) os << ',' << format_real(x(k, c));
}

int cmd_integrate(const RunConfig& cfg, std::ostream& out) {
  const auto& p = ode_problem(cfg);
  const auto scheme = scheme_of(cfg);
  const TimeGrid grid(cfg.a, cfg.b, cfg.N);
  try {
    require_compatible(scheme, grid);
  } catch (const DivisibilityError& e) {
    throw ConfigError(e.what());
  }
  const Vector x0 = state_or_default(cfg.x0, p.default_x0, p.field.dim, "x0");
  const auto run = integrate(p.field, x0, grid, scheme, solver(cfg));
  Sink sink(cfg.output, out);
  auto& os = sink.stream();
  write_path_header(os, p.field.dim);
  os << '\n';
  for (int k = 0; k <= grid.steps(); ++k) {
    write_path_row(os, run.path, k);
    os << '\n';
  }
  return kOk;
}

int cmd_converge(const RunConfig& cfg, const std::vector<int>& steps, std::ostream& out) {
  const auto& p = ode_problem(cfg);
  if (!p.reference) throw ConfigError("problem '" + p.name + "' has no reference solution");
  const auto scheme = scheme_of(cfg);
  if (steps.size() < 2) throw ConfigError("need at least two step counts");
  for (int n : steps) {
    if (n < 1 || n % scheme_block_width(scheme) != 0) {
      throw ConfigError(fmt::format("N = {} is not a positive multiple of {}", n,
                                    scheme_block_width(scheme)));
    }
  }
  const Vector x0 = state_or_default(cfg.x0, p.default_x0, p.field.dim, "x0");
  const auto study = convergence_study(p, scheme, cfg.a, cfg.b, x0, steps, solver(cfg));
  Sink sink(cfg.output, out);
  auto& os = sink.stream();
  os << "N,h,error_sup,order_estimate\n";
  for (const auto& row : study.rows) {
    os << row.steps << ',' << format_real(row.h) << ',' << format_real(row.error_sup) << ',';
    if (row.order_estimate) os << format_real(*row.order_estimate);
    os << '\n';
  }
  os << "lsq,,," << format_real(study.slope) << '\n';
  return kOk;
}

int cmd_cohere(const RunConfig& cfg, std::ostream& out) {
  const auto& p = ode_problem(cfg);
  if (cfg.N % 6 != 0) throw ConfigError("cohere needs N divisible by 6");
  const TimeGrid grid(cfg.a, cfg.b, cfg.N);
  const Vector x0 = state_or_default(cfg.x0, p.default_x0, p.field.dim, "x0");
  std::vector<CoherenceReport> reports;
  for (int order = 1; order <= 3; ++order) {
    reports.push_back(coherence_check(p.field, x0, grid, order, solver(cfg)));
  }
  out << fmt::format("{:<6} {:>24} {:>9} {:>8}\n", "order", "max_node_discrepancy", "measured",
                     "claimed");
  for (const auto& r : reports) {
    out << fmt::format("{:<6} {:>24} {:>9} {:>8}\n", r.order, format_real(r.max_node_discrepancy),
                       r.coherent ? "coherent" : "differ", r.claimed_coherent ? "coherent" : "differ");
  }
  if (!cfg.output.empty()) {
    Sink sink(cfg.output, out);
    auto& os = sink.stream();
    os << "order,max_node_discrepancy,coherent,claimed_coherent\n";
    for (const auto& r : reports) {
      os << r.order << ',' << format_real(r.max_node_discrepancy) << ',' << int(r.coherent) << ','
         << int(r.claimed_coherent) << '\n';
    }
  }
  return kOk;
}

int cmd_variational(const RunConfig& cfg, std::ostream& out) {
  const auto* p = find_lagrangian_problem(cfg.problem);
  if (p == nullptr) throw ConfigError("unknown Lagrangian '" + cfg.problem + "'");
  if (cfg.scheme != "del") throw ConfigError("variational runs use scheme \"del\"");
  if (cfg.x1 && cfg.v0) throw ConfigError("give x1 or v0, not both");
  if (cfg.N < 2) throw ConfigError("variational runs need N >= 2");
  const int dim = p->lagrangian.dim();
  const TimeGrid grid(cfg.a, cfg.b, cfg.N);
  const Vector x0 = state_or_default(cfg.x0, p->default_x0, dim, "x0");
  const auto run =
      cfg.x1 ? del_integrate(p->lagrangian, x0, state_or_default(*cfg.x1, x0, dim, "x1"), grid,
                             solver(cfg))
             : del_integrate_velocity(p->lagrangian, x0,
                                      state_or_default(cfg.v0.value_or(std::vector<double>{}),
                                                       p->default_v0, dim, "v0"),
                                      grid, solver(cfg));
  const auto energy = energy_diagnostic(p->lagrangian, run.path);
  const auto summary = summarize_energy(energy);
  Sink sink(cfg.output, out);
  auto& os = sink.stream();
  write_path_header(os, dim);
  os << ",E\n";
  for (int k = 0; k <= grid.steps(); ++k) {
    write_path_row(os, run.path, k);
    os << ',';
    if (energy.defined_at(k)) os << format_real(energy(k));
    os << '\n';
  }
  const std::string line = fmt::format("# max_abs_energy_deviation={} drift_slope={}\n",
                                       format_real(summary.max_deviation),
                                       format_real(summary.drift_slope));
  os << line;
  if (sink.to_file()) out << line;
  return kOk;
}

int cmd_selftest(const std::string& fault, std::ostream& out, std::ostream& err) {
  OperatorTable ops = OperatorTable::library();
  if (fault == "delta3_sign") {
    ops = OperatorTable::with_delta3_sign_fault();
  } else if (!fault.empty()) {
    throw ConfigError("unknown fault '" + fault + "'");
  }
  const auto report = run_selftest(ops);
  out << "# seed=" << report.seed << '\n';
  std::vector<std::string> failed;
  for (const auto& r : report.results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name;
    if (!r.passed) {
      out << "  " << r.detail;
      failed.push_back(r.name);
    }
    out << '\n';
  }
  if (failed.empty()) return kOk;
  for (const auto& name : failed) err << "selftest failed: " << name << '\n';
  return kSelftestFailed;
}

}  // namespace

std::string format_real(double x) { return fmt::format("{:.17g}", x); }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Discrete embeddings of ODEs and Lagrangian systems"};
  app.require_subcommand(1);

  Flags f;
  auto* integrate_cmd = app.add_subcommand("integrate", "run one scheme, write the trajectory");
  auto* converge_cmd = app.add_subcommand("converge", "error and order against the reference");
  auto* cohere_cmd = app.add_subcommand("cohere", "differential vs integral embeddings");
  auto* variational_cmd = app.add_subcommand("variational", "discrete Euler-Lagrange run");
  auto* selftest_cmd = app.add_subcommand("selftest", "built-in invariant suite");
  for (auto* cmd : {integrate_cmd, converge_cmd, cohere_cmd, variational_cmd}) {
    add_common_flags(*cmd, f);
  }
  for (auto* cmd : {integrate_cmd, converge_cmd}) {
    f.given.emplace("scheme", cmd->add_option("--scheme", f.scheme, "scheme name"));
  }
  converge_cmd->add_option("--Ns", f.n_list, "step counts, comma separated")->delimiter(',');
  f.given.emplace("x1", variational_cmd->add_option("--x1", f.x1, "second node")->delimiter(','));
  f.given.emplace("v0", variational_cmd->add_option("--v0", f.v0, "initial velocity")->delimiter(','));
  selftest_cmd->add_option("--inject-fault", f.fault)->group("");

  std::vector<std::string> reversed(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(reversed.begin(), reversed.end());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (selftest_cmd->parsed()) return cmd_selftest(f.fault, out, err);
    RunConfig ode_base;
    ode_base.problem = "exp";
    if (integrate_cmd->parsed()) return cmd_integrate(resolve(f, ode_base), out);
    if (converge_cmd->parsed()) return cmd_converge(resolve(f, ode_base), f.n_list, out);
    if (cohere_cmd->parsed()) return cmd_cohere(resolve(f, ode_base), out);
    RunConfig del_base;
    del_base.problem = "harmonic";
    del_base.scheme = "del";
    del_base.N = 100;
    return cmd_variational(resolve(f, del_base), out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DivisibilityError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const Error& e) {
    err << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  }
}

}  // namespace dembed::cli
