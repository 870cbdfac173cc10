#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "avgorbit/ode.hpp"

namespace avgorbit {

struct QuadratureConfig {
  int nodes_per_piece = 20;
  /// Split [0, T] at the zeros of the switch functions before integrating.
  bool split_at_kinks = true;
  /// Number of uniform cells used to scan for switch-function sign changes.
  int scan_cells = 720;
  double kink_tol = 1e-12;
};

/// Closed-form replacement for the quadrature, used verbatim when present.
struct AnalyticAverage {
  std::function<Vec(const Vec&)> g0;
  std::function<Mat(const Vec&)> jacobian;
};

/// The averaged field g0(v) = integral over one period of g(tau, v, 0).
struct AveragedField {
  PeriodicSystem system;
  QuadratureConfig quadrature;
  std::optional<AnalyticAverage> analytic;
  /// Points where g0 is not differentiable (the origin for |u|-type kinks).
  std::vector<Vec> singular_points;

  int dim() const { return system.dim; }
  double period() const { return system.period; }
};

/// Zeros of the switch functions in tau over (0, T) at frozen state v, sorted.
std::vector<double> kink_angles(const PeriodicSystem& sys, const Vec& v,
                                const QuadratureConfig& quad);

Vec eval_g0(const AveragedField& field, const Vec& v);

/// Quadrature value, ignoring any analytic override.
Vec eval_g0_numeric(const AveragedField& field, const Vec& v);

/// Jacobian of g0: analytic override if present, else central differences.
/// Throws Error(domain) at a declared singular point.
Mat g0_jacobian(const AveragedField& field, const Vec& v);

/// Central-difference Jacobian of the quadrature, ignoring any override.
Mat g0_jacobian_numeric(const AveragedField& field, const Vec& v);

enum class Classification {
  existence_only,
  unique_asymptotically_stable,
  non_asymptotically_stable,
  degenerate,
};

const char* to_string(Classification c);

struct ClassifyOptions {
  /// |det J| <= degeneracy_rel * max(1, |J|_F) counts as a degenerate zero.
  double degeneracy_rel = 1e-8;
};

Classification classify_zero(const Mat& jacobian, const ClassifyOptions& opts = {});

struct ZeroReport {
  Vec v0;
  double residual = 0.0;
  Mat jacobian;
  double det = 0.0;
  double trace = 0.0;
  std::vector<double> eigen_real_parts;
  Classification verdict = Classification::degenerate;
  int iterations = 0;
  std::optional<std::string> warning;
};

struct ZeroSolveOptions {
  double tol = 1e-10;
  int max_iter = 50;
  /// Zeros closer than this to a singular point are reported degenerate.
  double singular_radius = 1e-6;
  ClassifyOptions classify;
};

/// Damped Newton iteration on g0.
ZeroReport find_zero(const AveragedField& field, const Vec& guess,
                     const ZeroSolveOptions& opts = {});

/// Change of basis (columns) that diagonalizes J over the reals, with complex
/// pairs represented by their real and imaginary parts. Falls back to the
/// real Schur basis when the eigenvector matrix is ill-conditioned.
Mat adapted_basis(const Mat& jacobian);

/// Largest observed Lipschitz ratio of v -> v + alpha * g0(v) over random
/// pairs in a ball around v0, measured in the norm adapted to g0'(v0).
double contraction_probe(const AveragedField& field, const Vec& v0, double alpha,
                         double radius, int n_samples, std::uint64_t seed = 12345);

}  // namespace avgorbit
