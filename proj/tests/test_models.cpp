#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "avgorbit/models.hpp"

using namespace avgorbit;

namespace {

constexpr double kPi = std::numbers::pi;

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

template <class Fn>
ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::unsupported;
}

// max over t of |z(t) - R(t) x(t)| with x(0) = z(0).
double conjugacy_gap(const PeriodicSystem& original, const PeriodicSystem& rotated,
                     const Vec& z0, double eps) {
  double worst = 0.0;
  for (double t : {0.7, 2.0, 4.5, 2.0 * kPi}) {
    const Vec z = integrate(original, z0, 0.0, t, eps).final_state();
    const Vec x = integrate(rotated, z0, 0.0, t, eps).final_state();
    worst = std::max(worst, (z - rotation(t) * x).norm());
  }
  return worst;
}

}  // namespace

TEST_SUITE("models") {

TEST_CASE("closed-form field at (1, 0) with no forcing or detuning") {
  const Vec2 g = g0_analytic(1.0, 0.0, {});
  CHECK(g(0) == doctest::Approx(1.8082593202564599).epsilon(1e-15));
  CHECK(g(1) == doctest::Approx(0.0));
}

TEST_CASE("closed-form Jacobian agrees with differences of the closed form") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  const VdpParams p{-0.6, 0.4, VdpVariant::nonsmooth};
  const double h = 1e-6;
  for (int k = 0; k < 20; ++k) {
    const double m = coord(rng);
    const double n = coord(rng);
    Mat2 fd;
    fd.col(0) = (g0_analytic(m + h, n, p) - g0_analytic(m - h, n, p)) / (2 * h);
    fd.col(1) = (g0_analytic(m, n + h, p) - g0_analytic(m, n - h, p)) / (2 * h);
    const Mat2 j = g0_analytic_jacobian(m, n, p);
    CHECK((j - fd).norm() < 1e-7);
    const DetTrace dt = det_trace_analytic(m, n, p.a);
    CHECK(dt.det == doctest::Approx(j.determinant()).epsilon(1e-12));
    CHECK(dt.trace == doctest::Approx(j.trace()).epsilon(1e-12));
  }
}

TEST_CASE("closed forms are restricted to their domain") {
  CHECK(kind_of([] { g0_analytic(1.0, 0.0, {0.0, 0.0, VdpVariant::classical}); }) ==
        ErrorKind::unsupported);
  CHECK(kind_of([] { g0_analytic_jacobian(0.0, 0.0, {}); }) == ErrorKind::domain);
  CHECK(kind_of([] { det_trace_analytic(0.0, 0.0, 1.0); }) == ErrorKind::domain);
}

TEST_CASE("amplitude-phase coordinates round-trip") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> coord(-4.0, 4.0);
  for (int k = 0; k < 50; ++k) {
    const double m = coord(rng);
    const double n = coord(rng);
    const auto ap = to_amplitude_phase(m, n);
    CHECK(ap.amplitude >= 0.0);
    CHECK(ap.phase > -kPi);
    CHECK(ap.phase <= kPi);
    const Vec2 back = from_amplitude_phase(ap.amplitude, ap.phase);
    CHECK(back(0) == doctest::Approx(m).epsilon(1e-13));
    CHECK(back(1) == doctest::Approx(n).epsilon(1e-13));
  }
  CHECK(to_amplitude_phase(-0.0, -1.0).phase == doctest::Approx(kPi));
  CHECK(to_amplitude_phase(0.0, 0.0).amplitude == 0.0);
}

TEST_CASE("rotated and original coordinates describe the same flow") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  for (VdpVariant variant : {VdpVariant::nonsmooth, VdpVariant::classical}) {
    const VdpParams p{0.5, 0.4, variant};
    const auto original = vdp_original(p);
    const auto rotated = vdp_rotated(p);
    for (int k = 0; k < 3; ++k) {
      const Vec z0 = vec2(coord(rng), coord(rng));
      CHECK(conjugacy_gap(original, rotated, z0, 0.1) < 1e-7);
    }
  }
  const SpringParams sp{0.2, 1.5, 0.3, 0.5};
  CHECK(conjugacy_gap(spring_system(sp, Coordinates::original),
                      spring_system(sp, Coordinates::rotated), vec2(1.0, -0.4), 0.1) < 1e-7);
}

TEST_CASE("spring averaged field is linear") {
  // z^+ averages to half of z against the first harmonics; the load drops out.
  const SpringParams sp{0.2, 1.5, 0.3, 0.5};
  const auto field = spring_averaged_field(sp);
  for (const Vec& v : {vec2(1.0, 0.0), vec2(-0.4, 2.2), vec2(0.0, 0.0)}) {
    const Vec expected =
        kPi * vec2(-sp.damping * v(0) + 0.5 * sp.stiffening * v(1) - sp.lambda,
                   -sp.damping * v(1) - 0.5 * sp.stiffening * v(0));
    CHECK((eval_g0(field, v) - expected).norm() < 1e-10);
  }
}

TEST_CASE("parameter validation") {
  CHECK(kind_of([] { vdp_rotated({0.0, -1.0}); }) == ErrorKind::invalid_argument);
  CHECK(kind_of([] { vdp_original({std::nan(""), 0.0}); }) == ErrorKind::invalid_argument);
  CHECK(kind_of([] { spring_system({-0.1, 1.0, 0.0, 0.0}); }) ==
        ErrorKind::invalid_argument);
}

TEST_CASE("model names") {
  for (ModelKind k :
       {ModelKind::nonsmooth_vdp, ModelKind::classical_vdp, ModelKind::piecewise_spring}) {
    CHECK(parse_model(to_string(k)) == k);
  }
  CHECK_FALSE(parse_model("duffing").has_value());
  ModelSpec spec;
  spec.kind = ModelKind::classical_vdp;
  spec.a = 0.2;
  spec.lambda = 0.3;
  CHECK(spec.vdp().variant == VdpVariant::classical);
  CHECK(spec.system(Coordinates::rotated).name == "classical-vdp-rotated");
  spec.kind = ModelKind::piecewise_spring;
  CHECK_FALSE(spec.is_vdp());
  CHECK(spec.system(Coordinates::original).name == "piecewise-spring-original");
}

}  // TEST_SUITE
