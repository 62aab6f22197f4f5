#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dembed/cli.hpp"

namespace fs = std::filesystem;
using dembed::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  args.insert(args.begin(), "dembed");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path temp(const std::string& name) { return fs::temp_directory_path() / ("dembed_test_" + name); }

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("integrate writes the forward Euler table") {
  const auto r = call({"integrate", "--problem", "exp", "--scheme", "DeltaDifferential", "--N", "2"});
  CHECK(r.code == 0);
  CHECK(r.out == "k,t,x_0\n0,0,1\n1,0.5,1.5\n2,1,2.25\n");
}

TEST_CASE("differential and integral forward files are identical") {
  const auto a = temp("diff.csv"), b = temp("int.csv");
  CHECK(call({"integrate", "--scheme", "DeltaDifferential", "--N", "40", "--b", "3", "--out", a.string()}).code == 0);
  CHECK(call({"integrate", "--scheme", "DeltaIntegral", "--N", "40", "--b", "3", "--out", b.string()}).code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).find('\r') == std::string::npos);
  fs::remove(a);
  fs::remove(b);
}

TEST_CASE("values carry 17 significant digits") {
  const auto r = call({"integrate", "--scheme", "DeltaDifferential", "--N", "3"});
  const auto l = lines(r.out);
  CHECK(l[2].rfind("1,0.33333333333333331,1.3333333333333333", 0) == 0);
  CHECK(dembed::cli::format_real(0.1) == "0.10000000000000001");
}

TEST_CASE("configuration errors exit with 2") {
  CHECK(call({"integrate", "--scheme", "Delta3Integral", "--N", "4"}).code == 2);
  CHECK(call({"integrate", "--scheme", "Nope"}).code == 2);
  CHECK(call({"integrate", "--problem", "nope"}).code == 2);
  CHECK(call({"integrate", "--N", "0"}).code == 2);
  CHECK(call({"integrate", "--a", "1", "--b", "0"}).code == 2);
  CHECK(call({"integrate", "--problem", "harmonic2d", "--x0", "1"}).code == 2);
  CHECK(call({"converge", "--problem", "pendulum"}).code == 2);
  CHECK(call({"cohere", "--N", "10"}).code == 2);
  CHECK(call({"variational", "--x1", "1", "--v0", "0"}).code == 2);
  CHECK(call({"bogus"}).code == 2);
  CHECK(call({}).code == 2);
  const auto r = call({"integrate", "--config", "/nonexistent/cfg.json"});
  CHECK(r.code == 2);
  CHECK(r.err.find("config") != std::string::npos);
}

TEST_CASE("numerical failures exit with 3") {
  // backward Euler on x' = x with h = 1 divides by zero
  const auto r = call({"integrate", "--scheme", "NablaDifferential", "--N", "1", "--b", "1"});
  CHECK(r.code == 3);
}

TEST_CASE("JSON config with flag override") {
  const auto cfg = temp("cfg.json");
  std::ofstream(cfg) << R"({"problem": "decay", "scheme": "NablaIntegral", "a": 0, "b": 2, "N": 4, "x0": [3]})";
  const auto from_json = call({"integrate", "--config", cfg.string()});
  CHECK(from_json.code == 0);
  CHECK(lines(from_json.out).size() == 6);
  CHECK(lines(from_json.out)[1] == "0,0,3");
  CHECK(lines(from_json.out)[2] == "1,0.5,2");
  const auto overridden = call({"integrate", "--config", cfg.string(), "--N", "2"});
  CHECK(lines(overridden.out).size() == 4);
  CHECK(lines(overridden.out)[2] == "1,1,1.5");
  std::ofstream(cfg) << R"({"problem": "exp", "colour": 1})";
  CHECK(call({"integrate", "--config", cfg.string()}).code == 2);
  fs::remove(cfg);
}

TEST_CASE("converge emits rows and a slope") {
  const auto r = call({"converge", "--scheme", "Delta2Integral"});
  CHECK(r.code == 0);
  const auto l = lines(r.out);
  REQUIRE(l.size() == 7);
  CHECK(l[0] == "N,h,error_sup,order_estimate");
  CHECK(l[1].rfind("12,", 0) == 0);
  CHECK(l[1].back() == ',');
  CHECK(l[6].rfind("lsq,,,", 0) == 0);
  const double slope = std::stod(l[6].substr(6));
  CHECK(slope == doctest::Approx(2.0).epsilon(0.05));
  CHECK(call({"converge", "--scheme", "Delta3Integral", "--Ns", "12,24,50"}).code == 2);
}

TEST_CASE("cohere prints all three orders") {
  const auto csv = temp("coh.csv");
  const auto r = call({"cohere", "--N", "12", "--out", csv.string()});
  CHECK(r.code == 0);
  CHECK(lines(r.out).size() == 4);
  const auto c = lines(slurp(csv));
  REQUIRE(c.size() == 4);
  CHECK(c[0] == "order,max_node_discrepancy,coherent,claimed_coherent");
  CHECK(c[1] == "1,0,1,1");
  CHECK(c[2].substr(c[2].size() - 2) == ",0");
  CHECK(c[3].substr(c[3].size() - 4) == ",1,1");
  fs::remove(csv);
}

TEST_CASE("variational output") {
  const auto r = call({"variational", "--problem", "harmonic", "--N", "10", "--x0", "1", "--x1", "1", "--b", "1"});
  CHECK(r.code == 0);
  const auto l = lines(r.out);
  REQUIRE(l.size() == 13);
  CHECK(l[0] == "k,t,x_0,E");
  CHECK(l[3].rfind("2,0.20000000000000001,0.98999999999999999,", 0) == 0);
  CHECK(l[11].back() == ',');
  CHECK(l[12].rfind("# max_abs_energy_deviation=", 0) == 0);
  CHECK(l[12].find("drift_slope=") != std::string::npos);
  const auto free = call({"variational", "--problem", "free", "--N", "8"});
  CHECK(free.code == 0);
  CHECK(call({"variational", "--problem", "exp"}).code == 2);
}

TEST_CASE("selftest exit codes and determinism") {
  const auto a = call({"selftest"});
  const auto b = call({"selftest"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("# seed=", 0) == 0);
  const auto bad = call({"selftest", "--inject-fault", "delta3_sign"});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("operators.ftc_order3") != std::string::npos);
  CHECK(call({"selftest", "--inject-fault", "other"}).code == 2);
}

TEST_CASE("help exits cleanly") { CHECK(call({"--help"}).code == 0); }
