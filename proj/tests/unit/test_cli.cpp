#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::initializer_list<const char*> args) {
  std::vector<const char*> argv{"pcqp"};
  argv.insert(argv.end(), args.begin(), args.end());
  std::ostringstream out, err;
  const int code = pcqp::cli::run_cli(argv, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const char* name) { return std::string(PCQP_TEST_DATA_DIR) + "/" + name; }

std::filesystem::path temp_path(const char* name) { return std::filesystem::temp_directory_path() / name; }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("certify prints both bounds") {
  const Run r = run({"certify", "--n", "40", "--eps", "1e-6"});
  CHECK(r.code == 0);
  CHECK(r.out.find("n_max 343\n") != std::string::npos);
  CHECK(r.out.find("n_ref 202\n") != std::string::npos);
  CHECK(run({"certify", "--n", "2", "--eps", "4"}).code == 1);
  CHECK(run({"certify", "--n", "0"}).code == 1);
}

TEST_CASE("solve a file") {
  const std::string file = data("clamp2.bqp");
  const Run r = run({"solve", file.c_str(), "--eps", "1e-8"});
  CHECK(r.code == 0);
  CHECK(r.out.find("status converged\n") != std::string::npos);
  CHECK(r.out.find("certificates ok") != std::string::npos);
  const auto z_pos = r.out.find("\nz ");
  REQUIRE(z_pos != std::string::npos);
  std::istringstream z_line(r.out.substr(z_pos + 3));
  double z0 = 0, z1 = 0;
  z_line >> z0 >> z1;
  CHECK(std::abs(z0 - 1.0) <= 1e-5);
  CHECK(std::abs(z1 + 0.5) <= 1e-5);
  CHECK(r.out.find("kkt_stationarity") != std::string::npos);

  // Byte-identical on repeat.
  CHECK(run({"solve", file.c_str(), "--eps", "1e-8"}).out == r.out);
}

TEST_CASE("solve writes a trace") {
  const std::string file = data("clamp2.bqp");
  const auto trace = temp_path("pcqp_cli_trace.csv");
  const Run r = run({"solve", file.c_str(), "--trace", trace.c_str()});
  CHECK(r.code == 0);
  const std::string text = slurp(trace);
  CHECK(text.rfind("k,mu,alpha", 0) == 0);
  std::filesystem::remove(trace);
}

TEST_CASE("solve exit codes") {
  SUBCASE("zero h") {
    const std::string file = data("zero_h.bqp");
    const Run r = run({"solve", file.c_str()});
    CHECK(r.code == 0);
    CHECK(r.out.find("iterations 0\n") != std::string::npos);
  }
  SUBCASE("malformed file") {
    const std::string file = data("bad_dims.bqp");
    const Run r = run({"solve", file.c_str()});
    CHECK(r.code == 1);
    CHECK(r.err.find("line 4") != std::string::npos);
  }
  SUBCASE("missing file") { CHECK(run({"solve", "/nonexistent/file.bqp"}).code == 1); }
  SUBCASE("iteration limit") {
    const std::string file = data("clamp2.bqp");
    const Run r = run({"solve", file.c_str(), "--max-iter", "2"});
    CHECK(r.code == 2);
    CHECK(r.out.find("status iteration_limit\n") != std::string::npos);
  }
  SUBCASE("numerical failure") {
    const std::string file = data("indefinite.bqp");
    const Run r = run({"solve", file.c_str()});
    CHECK(r.code == 3);
    CHECK(r.out.find("nan") == std::string::npos);
    CHECK(r.err.find("error:") != std::string::npos);
  }
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"certify", "--n", "4", "--bogus"}).code == 1);
  CHECK(run({"solve"}).code == 1);
  CHECK(run({"solve", "x.bqp", "--eps", "-1"}).code == 1);
  CHECK(run({"bench", "--dims", "a,b"}).code == 1);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("bench writes CSV") {
  const Run r = run({"bench", "--dims", "4,6", "--per-dim", "2", "--seed", "3"});
  CHECK(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 5);
  CHECK(r.out.rfind("n,seed,iterations", 0) == 0);
  CHECK(r.err.find("summary") != std::string::npos);
}

TEST_CASE("mpc runs a scenario") {
  const std::string file = data("double_integrator.scn");
  const auto out = temp_path("pcqp_cli_mpc.csv");
  const Run r = run({"mpc", file.c_str(), "--steps", "5", "--out", out.c_str()});
  CHECK(r.code == 0);
  const std::string text = slurp(out);
  CHECK(text.rfind("step,x0,x1,u0,", 0) == 0);
  std::size_t lines = 0;
  for (char c : text) lines += c == '\n';
  CHECK(lines == 6);
  std::filesystem::remove(out);

  CHECK(run({"mpc", "/nonexistent.scn"}).code == 1);
}
