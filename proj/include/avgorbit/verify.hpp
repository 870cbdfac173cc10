#pragma once

#include <optional>
#include <string>
#include <vector>

#include "avgorbit/averaging.hpp"
#include "avgorbit/models.hpp"
#include "avgorbit/ode.hpp"

namespace avgorbit {

struct VerifyOptions {
  IntegratorConfig integrator;
  QuadratureConfig quadrature;
  double newton_tol = 1e-10;
  int max_iter = 40;
  ZeroSolveOptions zero;
  double floquet_margin = 1e-6;
  /// Agreement requires |v_eps - v0| <= distance_per_eps * eps (0.1 at eps = 0.05).
  double distance_per_eps = 2.0;
};

/// Simulation-side check of one averaged zero at fixed eps.
struct VerificationReport {
  double eps = 0.0;
  Vec v0;
  Vec v_eps;
  double distance = 0.0;
  double simulated_amplitude = 0.0;
  double predicted_amplitude = 0.0;
  std::vector<std::complex<double>> floquet_multipliers;
  StabilityVerdict stability_verdict = StabilityVerdict::marginal;
  Classification classification = Classification::degenerate;
  bool agreement = false;
};

/// Locates the averaged zero near `v0_guess`, the return-map fixed point at
/// eps seeded from it, and its Floquet multipliers. Errors are rethrown with
/// the failing stage prefixed to the message.
VerificationReport verify_branch(const ModelSpec& model, double eps, const Vec& v0_guess,
                                 const VerifyOptions& opts = {});

struct SweepEntry {
  double eps = 0.0;
  std::optional<VerificationReport> report;
  std::optional<std::string> error;
};

struct EpsSweep {
  std::vector<SweepEntry> entries;
  /// Least-squares slope of log |v_eps - v0| against log eps; empty when
  /// fewer than two stages succeeded.
  std::optional<double> slope;
};

/// eps_list must be strictly decreasing and positive.
EpsSweep eps_sweep(const ModelSpec& model, const Vec& v0_guess,
                   const std::vector<double>& eps_list, const VerifyOptions& opts = {});

struct ContractionRate {
  double eps = 0.0;
  double rho = 0.0;  // largest sampled Lipschitz ratio of the return map
  double c = 0.0;    // (1 - rho) / eps
  bool contracting = false;
};

/// Samples pairs in a ball of `radius` around v_eps, in the norm adapted to
/// the averaged Jacobian there, and measures the return map's Lipschitz ratio.
ContractionRate map_contraction_rate(const ModelSpec& model, double eps, const Vec& v_eps,
                                     double radius, int n_pairs,
                                     const VerifyOptions& opts = {},
                                     std::uint64_t seed = 2024);

/// max |z1| over one period of the original-coordinate trajectory from v.
double simulated_amplitude(const PeriodicSystem& original, const Vec& v, double eps,
                           const IntegratorConfig& cfg = {});

}  // namespace avgorbit
