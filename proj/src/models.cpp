#include "avgorbit/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace avgorbit {

namespace {

constexpr double kPi = std::numbers::pi;

double damping_shape(double u, VdpVariant variant) {
  return variant == VdpVariant::nonsmooth ? std::abs(u) : u * u;
}

// x' = eps g(t, x) from the scalar forcing f(t, u, u') acting on u'' + u,
// written in the rotating frame z = R(t) x.
template <class Force>
RhsFn rotated_perturbation(Force force) {
  return [force](double t, const Vec& x, double) {
    const double c = std::cos(t);
    const double s = std::sin(t);
    const double f = force(t, x(0) * c + x(1) * s, -x(0) * s + x(1) * c);
    Vec g(2);
    g(0) = -s * f;
    g(1) = c * f;
    return g;
  };
}

RhsFn scaled_by_eps(RhsFn g) {
  return [g = std::move(g)](double t, const Vec& x, double eps) {
    return Vec(eps * g(t, x, eps));
  };
}

template <class Force>
RhsFn oscillator_rhs(Force force) {
  return [force](double t, const Vec& z, double eps) {
    Vec dz(2);
    dz(0) = z(1);
    dz(1) = -z(0) + eps * force(t, z(0), z(1));
    return dz;
  };
}

double rotated_switch(double t, const Vec& x) {
  return x(0) * std::cos(t) + x(1) * std::sin(t);
}

double position_switch(double, const Vec& z) { return z(0); }

auto vdp_force(const VdpParams& p) {
  return [p](double t, double u, double du) {
    return -p.a * u - (damping_shape(u, p.variant) - 1.0) * du + p.lambda * std::sin(t);
  };
}

auto spring_force(const SpringParams& p) {
  return [p](double t, double u, double du) {
    return -p.damping * du - p.stiffening * std::max(u, 0.0) + p.load +
           p.lambda * std::sin(t);
  };
}

}  // namespace

const char* to_string(VdpVariant v) {
  return v == VdpVariant::nonsmooth ? "nonsmooth" : "classical";
}

void VdpParams::validate() const {
  if (!std::isfinite(a) || !std::isfinite(lambda)) {
    throw Error(ErrorKind::invalid_argument, "van der Pol parameters must be finite");
  }
  if (lambda < 0.0) {
    throw Error(ErrorKind::invalid_argument, "forcing amplitude lambda must be >= 0");
  }
}

void SpringParams::validate() const {
  if (!std::isfinite(damping) || !std::isfinite(stiffening) || !std::isfinite(load) ||
      !std::isfinite(lambda)) {
    throw Error(ErrorKind::invalid_argument, "spring parameters must be finite");
  }
  if (damping < 0.0 || stiffening < 0.0) {
    throw Error(ErrorKind::invalid_argument,
                "spring damping and stiffening gain must be >= 0");
  }
}

Mat2 rotation(double t) {
  const double c = std::cos(t);
  const double s = std::sin(t);
  Mat2 r;
  r << c, s, -s, c;
  return r;
}

PeriodicSystem vdp_original(const VdpParams& params) {
  params.validate();
  PeriodicSystem sys;
  sys.name = std::string(to_string(params.variant)) + "-vdp-original";
  sys.dim = 2;
  sys.period = 2.0 * kPi;
  sys.rhs = oscillator_rhs(vdp_force(params));
  if (params.variant == VdpVariant::nonsmooth) {
    sys.switches.push_back(position_switch);
  }
  return sys;
}

PeriodicSystem vdp_rotated(const VdpParams& params) {
  params.validate();
  PeriodicSystem sys;
  sys.name = std::string(to_string(params.variant)) + "-vdp-rotated";
  sys.dim = 2;
  sys.period = 2.0 * kPi;
  sys.perturbation = rotated_perturbation(vdp_force(params));
  sys.rhs = scaled_by_eps(sys.perturbation);
  if (params.variant == VdpVariant::nonsmooth) {
    sys.switches.push_back(rotated_switch);
  }
  return sys;
}

PeriodicSystem spring_system(const SpringParams& params, Coordinates coords) {
  params.validate();
  PeriodicSystem sys;
  sys.dim = 2;
  sys.period = 2.0 * kPi;
  if (coords == Coordinates::original) {
    sys.name = "piecewise-spring-original";
    sys.rhs = oscillator_rhs(spring_force(params));
    sys.switches.push_back(position_switch);
  } else {
    sys.name = "piecewise-spring-rotated";
    sys.perturbation = rotated_perturbation(spring_force(params));
    sys.rhs = scaled_by_eps(sys.perturbation);
    sys.switches.push_back(rotated_switch);
  }
  return sys;
}

Vec2 g0_analytic(double m, double n, const VdpParams& params) {
  if (params.variant != VdpVariant::nonsmooth) {
    throw Error(ErrorKind::unsupported,
                "no closed-form averaged field for the classical variant; use quadrature");
  }
  const double r = std::hypot(m, n);
  return {kPi * params.a * n - kPi * params.lambda + kPi * m - (4.0 / 3.0) * m * r,
          -kPi * params.a * m + kPi * n - (4.0 / 3.0) * n * r};
}

Mat2 g0_analytic_jacobian(double m, double n, const VdpParams& params) {
  if (params.variant != VdpVariant::nonsmooth) {
    throw Error(ErrorKind::unsupported,
                "no closed-form averaged Jacobian for the classical variant");
  }
  const double r = std::hypot(m, n);
  if (r == 0.0) {
    throw Error(ErrorKind::domain, "averaged field is not differentiable at the origin");
  }
  // d(v |v|)/dv = |v| I + v v^T / |v|
  Mat2 j;
  j << kPi - (4.0 / 3.0) * (r + m * m / r), kPi * params.a - (4.0 / 3.0) * m * n / r,
      -kPi * params.a - (4.0 / 3.0) * m * n / r, kPi - (4.0 / 3.0) * (r + n * n / r);
  return j;
}

DetTrace det_trace_analytic(double m, double n, double a) {
  const double r = std::hypot(m, n);
  if (r == 0.0) {
    throw Error(ErrorKind::domain, "determinant formula undefined at the origin");
  }
  return {kPi * kPi * (1.0 + a * a) + (32.0 / 9.0) * r * r - 4.0 * kPi * r,
          2.0 * (kPi - 2.0 * r)};
}

AmplitudePhase to_amplitude_phase(double m, double n) {
  if (m == 0.0 && n == 0.0) {
    return {0.0, 0.0};
  }
  double phase = std::atan2(m, n);
  if (phase == -kPi) {
    phase = kPi;
  }
  return {std::hypot(m, n), phase};
}

Vec2 from_amplitude_phase(double amplitude, double phase) {
  return {amplitude * std::sin(phase), amplitude * std::cos(phase)};
}

AveragedField vdp_averaged_field(const VdpParams& params, bool with_analytic,
                                 const QuadratureConfig& quad) {
  AveragedField field;
  field.system = vdp_rotated(params);
  field.quadrature = quad;
  if (params.variant == VdpVariant::nonsmooth) {
    field.singular_points.push_back(Vec::Zero(2));
    if (with_analytic) {
      field.analytic = AnalyticAverage{
          [params](const Vec& v) { return Vec(g0_analytic(v(0), v(1), params)); },
          [params](const Vec& v) { return Mat(g0_analytic_jacobian(v(0), v(1), params)); }};
    }
  }
  return field;
}

AveragedField spring_averaged_field(const SpringParams& params,
                                    const QuadratureConfig& quad) {
  AveragedField field;
  field.system = spring_system(params, Coordinates::rotated);
  field.quadrature = quad;
  return field;
}

const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::nonsmooth_vdp: return "nonsmooth-vdp";
    case ModelKind::classical_vdp: return "classical-vdp";
    case ModelKind::piecewise_spring: return "piecewise-spring";
  }
  return "unknown";
}

std::optional<ModelKind> parse_model(std::string_view name) {
  if (name == "nonsmooth-vdp") return ModelKind::nonsmooth_vdp;
  if (name == "classical-vdp") return ModelKind::classical_vdp;
  if (name == "piecewise-spring") return ModelKind::piecewise_spring;
  return std::nullopt;
}

VdpParams ModelSpec::vdp() const {
  return VdpParams{a, lambda,
                   kind == ModelKind::classical_vdp ? VdpVariant::classical
                                                    : VdpVariant::nonsmooth};
}

PeriodicSystem ModelSpec::system(Coordinates coords) const {
  if (kind == ModelKind::piecewise_spring) {
    SpringParams p = spring;
    p.lambda = lambda;
    return spring_system(p, coords);
  }
  return coords == Coordinates::original ? vdp_original(vdp()) : vdp_rotated(vdp());
}

AveragedField ModelSpec::averaged_field(bool with_analytic,
                                        const QuadratureConfig& quad) const {
  if (kind == ModelKind::piecewise_spring) {
    SpringParams p = spring;
    p.lambda = lambda;
    return spring_averaged_field(p, quad);
  }
  return vdp_averaged_field(vdp(), with_analytic, quad);
}

}  // namespace avgorbit
