#include <doctest.h>

#include <cmath>
#include <numbers>

#include "avgorbit/verify.hpp"

using namespace avgorbit;

namespace {

constexpr double kPi = std::numbers::pi;

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

ModelSpec nonsmooth(double a, double lambda) {
  ModelSpec m;
  m.a = a;
  m.lambda = lambda;
  return m;
}

}  // namespace

TEST_SUITE("verify") {

TEST_CASE("stable branch under strong forcing") {
  const auto rep = verify_branch(nonsmooth(0.0, 1.5), 0.05, vec2(-3.4, 0.0));
  CHECK(rep.v0(0) == doctest::Approx(-3.3967015032259784).epsilon(1e-9));
  CHECK(rep.distance < 0.1);
  CHECK(rep.classification == Classification::unique_asymptotically_stable);
  CHECK(rep.stability_verdict == StabilityVerdict::asymptotically_stable);
  for (const auto& mu : rep.floquet_multipliers) {
    CHECK(std::abs(mu) < 1.0);
  }
  CHECK(rep.agreement);
  CHECK(rep.simulated_amplitude == doctest::Approx(rep.predicted_amplitude).epsilon(0.01));
}

TEST_CASE("saddle branch has an expanding multiplier") {
  const auto rep = verify_branch(nonsmooth(0.0, 0.4), 0.05, vec2(1.85, 0.0));
  CHECK(rep.classification == Classification::non_asymptotically_stable);
  double worst = 0.0;
  for (const auto& mu : rep.floquet_multipliers) worst = std::max(worst, std::abs(mu));
  CHECK(worst > 1.0);
  CHECK(rep.agreement);
}

TEST_CASE("eps range is enforced") {
  auto kind_of = [](double eps) {
    try {
      verify_branch(nonsmooth(0.0, 1.5), eps, vec2(-3.4, 0.0));
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::unsupported;
  };
  CHECK(kind_of(0.0) == ErrorKind::degenerate_map);
  CHECK(kind_of(0.6) == ErrorKind::invalid_argument);
  CHECK(kind_of(-0.1) == ErrorKind::invalid_argument);
}

TEST_CASE("distance to the averaged zero shrinks linearly in eps") {
  const auto sweep = eps_sweep(nonsmooth(0.0, 1.5), vec2(-3.4, 0.0), {0.2, 0.1, 0.05, 0.025});
  REQUIRE(sweep.entries.size() == 4);
  double prev = INFINITY;
  for (const auto& e : sweep.entries) {
    REQUIRE(e.report.has_value());
    CHECK(e.report->distance < prev);
    prev = e.report->distance;
  }
  REQUIRE(sweep.slope.has_value());
  CHECK(*sweep.slope == doctest::Approx(1.0).epsilon(0.3));
}

TEST_CASE("return map contracts near the stable orbit") {
  const ModelSpec model = nonsmooth(0.0, 1.5);
  const auto rep = verify_branch(model, 0.1, vec2(-3.4, 0.0));
  const auto rate = map_contraction_rate(model, 0.1, rep.v_eps, 0.05, 20);
  CHECK(rate.contracting);
  CHECK(rate.rho < 1.0);
  CHECK(rate.c == doctest::Approx((1.0 - rate.rho) / 0.1));
}

TEST_CASE("free oscillation approaches amplitude 3 pi / 4") {
  const auto sys = vdp_original({0.0, 0.0, VdpVariant::nonsmooth});
  const double eps = 0.05;
  Vec z = vec2(1.0, 0.0);
  z = integrate(sys, z, 0.0, 120.0 * kPi, eps).final_state();
  CHECK(simulated_amplitude(sys, z, eps) == doctest::Approx(0.75 * kPi).epsilon(0.1 / (0.75 * kPi)));
}

TEST_CASE("spring model verifies against its linear averaged zero") {
  ModelSpec model;
  model.kind = ModelKind::piecewise_spring;
  model.lambda = 0.3;
  model.spring = SpringParams{0.2, 1.0, 0.0, 0.0};
  // Solve [-d, k/2; -k/2, -d] v = (lambda, 0) by hand.
  const double d = 0.2;
  const double k2 = 0.5;
  const double det = d * d + k2 * k2;
  const Vec expected = vec2(-d * 0.3 / det, k2 * 0.3 / det);
  const auto rep = verify_branch(model, 0.05, vec2(0.0, 0.0));
  CHECK((rep.v0 - expected).norm() < 1e-9);
  CHECK(rep.classification == Classification::unique_asymptotically_stable);
  CHECK(rep.agreement);
}

}  // TEST_SUITE
