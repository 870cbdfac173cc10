#pragma once

#include <complex>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "avgorbit/errors.hpp"

namespace avgorbit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Right-hand side g of x' = g(t, x, eps). Must be safe to call concurrently.
using RhsFn = std::function<Vec(double t, const Vec& x, double eps)>;
/// Scalar function whose zero crossings mark where the right-hand side loses
/// differentiability.
using SwitchFn = std::function<double(double t, const Vec& x)>;

struct PeriodicSystem {
  std::string name;
  int dim = 0;
  double period = 2.0 * std::numbers::pi;
  RhsFn rhs;
  /// For systems in standard form x' = eps g(t, x, eps): the function g.
  /// Empty otherwise. Averaging integrates g(tau, v, 0).
  RhsFn perturbation;
  std::vector<SwitchFn> switches;

  Vec operator()(double t, const Vec& x, double eps) const {
    return rhs(t, x, eps);
  }
};

struct IntegratorConfig {
  double step = 2.0 * std::numbers::pi / 512.0;
  double event_tol = 1e-12;
  double rtol = 1e-9;
  double atol = 1e-11;
  /// Substeps below this length raise a stiffness error.
  double min_step = 1e-10;

  /// Throws Error(invalid_argument) unless all tolerances are positive and
  /// event_tol < step.
  void validate() const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<double> event_times;

  const Vec& final_state() const { return states.back(); }
};

struct PoincareResult {
  Vec initial;
  Vec image;
  double eps = 0.0;
};

Trajectory integrate(const PeriodicSystem& sys, const Vec& x0, double t0,
                     double t1, double eps, const IntegratorConfig& cfg = {});

/// Return map over one period starting at t = 0.
PoincareResult poincare_map(const PeriodicSystem& sys, const Vec& v, double eps,
                            const IntegratorConfig& cfg = {});

/// Central-difference Jacobian of the return map with step
/// cbrt(machine eps) * max(1, |v|).
Mat poincare_jacobian(const PeriodicSystem& sys, const Vec& v, double eps,
                      const IntegratorConfig& cfg = {});

struct FixedPointResult {
  Vec point;
  double residual = 0.0;
  int iterations = 0;
};

/// Newton iteration on v -> P(v) - v. The step is halved (at most 30 times)
/// whenever the residual would grow.
FixedPointResult fixed_point(const PeriodicSystem& sys, const Vec& guess,
                             double eps, const IntegratorConfig& cfg = {},
                             double newton_tol = 1e-10, int max_iter = 40);

enum class StabilityVerdict { asymptotically_stable, marginal, unstable };

const char* to_string(StabilityVerdict verdict);

struct FloquetResult {
  std::vector<std::complex<double>> multipliers;
  StabilityVerdict verdict = StabilityVerdict::marginal;

  double max_modulus() const;
};

FloquetResult floquet_multipliers(const Mat& monodromy, double margin = 1e-6);

}  // namespace avgorbit
