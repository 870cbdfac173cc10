#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "avgorbit/averaging.hpp"
#include "avgorbit/ode.hpp"

namespace avgorbit {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

enum class VdpVariant { nonsmooth, classical };

const char* to_string(VdpVariant v);

/// Forced van der Pol oscillator
///   u'' + eps (h(u) - 1) u' + (1 + a eps) u = eps lambda sin t,
/// with h(u) = |u| (nonsmooth) or u^2 (classical).
struct VdpParams {
  double a = 0.0;       // detuning
  double lambda = 0.0;  // forcing amplitude, >= 0
  VdpVariant variant = VdpVariant::nonsmooth;

  void validate() const;
};

/// Piecewise-linear spring with one-sided stiffening,
///   z'' + z + eps (damping z' + stiffening z^+ - load - lambda sin t) = 0.
/// All perturbing terms are taken at order eps and the linear frequency is 1.
struct SpringParams {
  double damping = 0.1;
  double stiffening = 1.0;
  double load = 0.0;
  double lambda = 0.0;

  void validate() const;
};

enum class Coordinates { original, rotated };

/// Rotation linking the two coordinate systems: z(t) = R(t) x(t).
Mat2 rotation(double t);

/// (z1, z2) = (u, u'), period 2 pi. The nonsmooth variant declares the
/// switch function z1.
PeriodicSystem vdp_original(const VdpParams& params);

/// The same flow in rotating coordinates; the right-hand side is
/// proportional to eps and the nonsmooth variant switches on
/// x1 cos t + x2 sin t.
PeriodicSystem vdp_rotated(const VdpParams& params);

PeriodicSystem spring_system(const SpringParams& params,
                             Coordinates coords = Coordinates::rotated);

/// Closed-form averaged field of the nonsmooth oscillator at (M, N).
/// Throws Error(unsupported) for the classical variant.
Vec2 g0_analytic(double m, double n, const VdpParams& params);

/// Closed-form partial derivatives of g0_analytic. Throws Error(domain) at
/// the origin.
Mat2 g0_analytic_jacobian(double m, double n, const VdpParams& params);

struct DetTrace {
  double det = 0.0;
  double trace = 0.0;
};

/// det = pi^2 (1 + a^2) + (32/9) r^2 - 4 pi r, trace = 2 (pi - 2 r), with
/// r = |(M, N)|. Throws Error(domain) at the origin.
DetTrace det_trace_analytic(double m, double n, double a);

struct AmplitudePhase {
  double amplitude = 0.0;
  double phase = 0.0;
};

/// M = A sin(phi), N = A cos(phi), A >= 0, phi in (-pi, pi]. The origin maps
/// to (0, 0).
AmplitudePhase to_amplitude_phase(double m, double n);
Vec2 from_amplitude_phase(double amplitude, double phase);

/// Averaged field built by quadrature over the rotated system. With
/// `with_analytic`, the nonsmooth closed form is attached as override.
AveragedField vdp_averaged_field(const VdpParams& params, bool with_analytic = false,
                                 const QuadratureConfig& quad = {});
AveragedField spring_averaged_field(const SpringParams& params,
                                    const QuadratureConfig& quad = {});

enum class ModelKind { nonsmooth_vdp, classical_vdp, piecewise_spring };

const char* to_string(ModelKind kind);

/// Parses `nonsmooth-vdp`, `classical-vdp` or `piecewise-spring`.
std::optional<ModelKind> parse_model(std::string_view name);

/// A model choice plus its parameters, as consumed by `verify` and the CLI.
struct ModelSpec {
  ModelKind kind = ModelKind::nonsmooth_vdp;
  double a = 0.0;
  double lambda = 0.0;
  SpringParams spring;

  VdpParams vdp() const;
  bool is_vdp() const { return kind != ModelKind::piecewise_spring; }
  PeriodicSystem system(Coordinates coords) const;
  AveragedField averaged_field(bool with_analytic = false,
                               const QuadratureConfig& quad = {}) const;
};

}  // namespace avgorbit
