#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "avgorbit/averaging.hpp"
#include "avgorbit/models.hpp"
#include "avgorbit/ode.hpp"

namespace avgorbit::cli {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNumeric = 1;
inline constexpr int kExitConfig = 2;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "AVGORBIT_OUT_DIR";

struct RunConfig {
  std::string model = "nonsmooth-vdp";
  double a = 0.0;
  double lambda = 0.0;
  double eps = 0.05;
  double a_min = -2.0;
  double a_max = 2.0;
  int n = 201;
  std::vector<Vec2> points;
  std::string out;
  std::string format;  // empty: command default
  std::string branch = "stable";
  std::vector<double> eps_list;
  SpringParams spring;
  IntegratorConfig integrator;
  QuadratureConfig quadrature;
};

/// Applies the keys present in a JSON config object onto `cfg`.
/// Throws nlohmann::json::exception or std::invalid_argument on bad input.
void apply_json(const nlohmann::json& j, RunConfig& cfg);

/// Runs `avgorbit <command> [options]`. Results go to `out` unless an output
/// file is selected; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace avgorbit::cli
