#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "avgorbit/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

std::string binary() {
  const char* b = std::getenv("AVGORBIT_BIN");
  return b ? b : "avgorbit";
}

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + binary() + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("avgorbit_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("exit codes") {
  CHECK(run("zeros --lambda 0.4").code == 0);
  CHECK(run("zeros --model duffing").code == 2);
  CHECK(run("resonance --lambda -1").code == 2);
  CHECK(run("critical --model piecewise-spring").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("verify --lambda 1.5 --eps 0").code == 2);
  const Run singular = run("zeros --point 0,0");
  CHECK(singular.code == 1);
  CHECK(singular.out.empty());
  CHECK(run("g0 --config /nonexistent/cfg.json").code == 2);
}

TEST_CASE("zeros report three classified roots") {
  const Run r = run("zeros --lambda 0.4 --format json");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  std::string text = j.dump();
  CHECK(text.find("existence_only") != std::string::npos);
  CHECK(text.find("non_asymptotically_stable") != std::string::npos);
  CHECK(text.find("unique_asymptotically_stable") != std::string::npos);
}

TEST_CASE("negative point coordinates") {
  const Run r = run("g0 --lambda 1.5 --point=-3.3967015032259784,0 --format json");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("-3.3967015032259784") != std::string::npos);
}

TEST_CASE("resonance csv is byte-stable and lands in the output directory") {
  const fs::path dir = scratch("resonance");
  const std::string env = "AVGORBIT_OUT_DIR=" + dir.string();
  REQUIRE(run("resonance --lambda 0.4 --n 41", env).code == 0);
  const std::string first = slurp(dir / "resonance.csv");
  REQUIRE(run("resonance --lambda 0.4 --n 41 --out again.csv", env).code == 0);
  const std::string second = slurp(dir / "again.csv");
  CHECK_FALSE(first.empty());
  CHECK(first == second);
  CHECK(first.rfind("# family=I\na,lambda,A,stable,det,trace,multiplicity\n", 0) == 0);
  CHECK(first.find('\r') == std::string::npos);
}

TEST_CASE("config file values are overridden by flags") {
  const fs::path dir = scratch("config");
  const fs::path cfg = dir / "cfg.json";
  std::ofstream(cfg) << R"({"model": "nonsmooth-vdp", "lambda": 1.5, "a_min": -1, "a_max": 1, "n": 3})";
  const Run base = run("resonance --format json --config " + cfg.string());
  REQUIRE(base.code == 0);
  const auto j = nlohmann::json::parse(base.out);
  CHECK(j.at("lambda").get<double>() == 1.5);
  const Run over = run("resonance --format json --lambda 0.4 --config " + cfg.string());
  REQUIRE(over.code == 0);
  CHECK(nlohmann::json::parse(over.out).at("lambda").get<double>() == 0.4);
}

TEST_CASE("apply_json merges nested objects and rejects bad types") {
  avgorbit::cli::RunConfig cfg;
  avgorbit::cli::apply_json(nlohmann::json::parse(R"({"a": 0.25, "spring": {"damping": 0.3}})"), cfg);
  CHECK(cfg.a == 0.25);
  CHECK(cfg.spring.damping == 0.3);
  CHECK_THROWS(avgorbit::cli::apply_json(nlohmann::json::parse(R"({"a": "x"})"), cfg));
  CHECK_THROWS(avgorbit::cli::apply_json(nlohmann::json::parse(R"({"lamda": 0.4})"), cfg));
}

TEST_CASE("critical reports both candidate double-point amplitudes") {
  const Run r = run("critical");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("amplitude_double") != std::string::npos);
  const Run c = run("critical --model classical-vdp");
  REQUIRE(c.code == 0);
  CHECK(c.out.find("plus_a2") != std::string::npos);
}

TEST_CASE("verify exits cleanly on the stable branch") {
  const Run r = run("verify --lambda 1.5 --eps 0.05");
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out).dump().find("\"agreement\":true") != std::string::npos);
}

}  // TEST_SUITE
