#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "avgorbit/averaging.hpp"
#include "avgorbit/resonance.hpp"

using namespace avgorbit;

namespace {

constexpr double kPi = std::numbers::pi;

double shape(double amp, VdpVariant v) {
  return v == VdpVariant::nonsmooth ? 1.0 - 4.0 * amp / (3.0 * kPi) : 1.0 - amp * amp / 4.0;
}

// Sign-change scan plus bisection; only finds simple roots.
std::vector<double> bisection_roots(double a, double lambda, VdpVariant v) {
  auto f = [&](double amp) {
    const double s = shape(amp, v);
    return amp * amp * (a * a + s * s) - lambda * lambda;
  };
  std::vector<double> out;
  const int n = 10000;
  const double top = 8.0;
  double lo = 1e-9;
  double flo = f(lo);
  for (int i = 1; i <= n; ++i) {
    const double hi = top * i / n;
    const double fhi = f(hi);
    if (fhi == 0.0) {
      out.push_back(hi);
    } else if (flo * fhi < 0.0) {
      double l = lo;
      double h = hi;
      for (int k = 0; k < 200 && h - l > 1e-15; ++k) {
        const double m = 0.5 * (l + h);
        ((f(m) < 0.0) == (f(l) < 0.0) ? l : h) = m;
      }
      out.push_back(0.5 * (l + h));
    }
    lo = hi;
    flo = fhi;
  }
  return out;
}

std::vector<double> amplitudes(const AmplitudeRoots& r) {
  std::vector<double> out;
  for (const auto& root : r.roots) out.push_back(root.amplitude);
  return out;
}

}  // namespace

TEST_SUITE("resonance") {

TEST_CASE("roots agree with a bisection scan") {
  for (VdpVariant v : {VdpVariant::nonsmooth, VdpVariant::classical}) {
    for (double a : {-2.0, -0.7, -0.2, 0.0, 0.1, 0.35, 1.0}) {
      for (double lambda : {0.05, 0.4, 0.6, 0.9, 1.5, 2.0}) {
        CAPTURE(a);
        CAPTURE(lambda);
        const auto oracle = bisection_roots(a, lambda, v);
        const auto got = amplitudes(amplitude_roots(a, lambda, v));
        REQUIRE(got.size() == oracle.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
          CHECK(got[i] == doctest::Approx(oracle[i]).epsilon(1e-10));
          CHECK(std::abs(amplitude_residual(got[i], a, lambda, v)) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("three roots at zero detuning, lambda = 0.4") {
  const auto got = amplitudes(amplitude_roots(0.0, 0.4, VdpVariant::nonsmooth));
  REQUIRE(got.size() == 3);
  CHECK(got[0] == doctest::Approx(0.5106878333957883).epsilon(1e-12));
  CHECK(got[1] == doctest::Approx(1.8455066567965566).epsilon(1e-12));
  CHECK(got[2] == doctest::Approx(2.7046590404323876).epsilon(1e-12));
}

TEST_CASE("roots are even in the detuning") {
  for (double a : {0.1, 0.3, 1.7}) {
    const auto plus = amplitudes(amplitude_roots(a, 0.6, VdpVariant::nonsmooth));
    const auto minus = amplitudes(amplitude_roots(-a, 0.6, VdpVariant::nonsmooth));
    CHECK(plus == minus);
  }
}

TEST_CASE("unforced case keeps the zero branch") {
  const auto r = amplitude_roots(0.0, 0.0, VdpVariant::nonsmooth);
  CHECK(r.zero_amplitude_branch);
  REQUIRE(r.roots.size() == 1);
  CHECK(r.roots[0].amplitude == doctest::Approx(0.75 * kPi));
  CHECK(amplitude_roots(0.5, 0.0, VdpVariant::classical).roots.empty());
}

TEST_CASE("double root at the fold is reported once") {
  const double lambda = 3.0 * kPi / 16.0;
  const auto r = amplitude_roots(0.0, lambda, VdpVariant::nonsmooth);
  bool has_double = false;
  for (const auto& root : r.roots) {
    if (root.multiplicity == 2) {
      has_double = true;
      CHECK(root.amplitude == doctest::Approx(3.0 * kPi / 8.0).epsilon(1e-6));
    }
  }
  CHECK(has_double);
}

TEST_CASE("stability tags match the classification of the reconstructed zero") {
  for (double a : {0.0, 0.2, -0.5}) {
    for (double lambda : {0.4, 0.55, 1.5}) {
      const VdpParams p{a, lambda, VdpVariant::nonsmooth};
      const auto field = vdp_averaged_field(p, true);
      for (const auto& root : amplitude_roots(a, lambda, VdpVariant::nonsmooth).roots) {
        const Vec2 v = reconstruct_zero(root.amplitude, a, lambda, VdpVariant::nonsmooth);
        CHECK(v.norm() == doctest::Approx(root.amplitude).epsilon(1e-12));
        CHECK(g0_analytic(v(0), v(1), p).norm() < 1e-10);
        const auto tag = stability_tag(root.amplitude, a, VdpVariant::nonsmooth);
        const bool stable =
            classify_zero(g0_jacobian(field, Vec(v))) == Classification::unique_asymptotically_stable;
        CHECK(tag.stable == stable);
      }
    }
  }
}

TEST_CASE("classical stability tag from quadrature matches the fold polynomial") {
  for (double a : {0.0, 0.4}) {
    for (double amp : {0.5, 1.3, 2.5}) {
      const auto tag = stability_tag(amp, a, VdpVariant::classical);
      const double det = kPi * kPi * (1 + a * a - amp * amp + 3 * std::pow(amp, 4) / 16);
      CHECK(tag.det == doctest::Approx(det).epsilon(1e-6));
      CHECK(tag.trace == doctest::Approx(kPi * (2 - amp * amp)).epsilon(1e-6));
      if (a != 0.0) {
        CHECK(classical_det_form_check(a, amp).matches == "plus_a2");
      }
    }
  }
}

TEST_CASE("critical values") {
  const auto ns = critical_values(VdpVariant::nonsmooth);
  CHECK(ns.lambda_double == doctest::Approx(3 * kPi / 16).epsilon(1e-10));
  CHECK(ns.amplitude_double == doctest::Approx(3 * kPi / 8).epsilon(1e-8));
  CHECK(ns.lambda_sep == doctest::Approx(9 * std::sqrt(3.0) * kPi / 64).epsilon(1e-10));
  CHECK(ns.a_sep == doctest::Approx(1 / std::sqrt(8.0)).epsilon(1e-6));
  const auto cl = critical_values(VdpVariant::classical);
  CHECK(cl.lambda_double == doctest::Approx(4 * std::sqrt(3.0) / 9).epsilon(1e-10));
  CHECK(cl.amplitude_double == doctest::Approx(2 / std::sqrt(3.0)).epsilon(1e-8));
  CHECK(cl.lambda_sep == doctest::Approx(std::sqrt(32.0 / 27.0)).epsilon(1e-10));
  CHECK(cl.a_sep == doctest::Approx(1 / std::sqrt(3.0)).epsilon(1e-6));
}

TEST_CASE("fold locus points solve both equations") {
  const auto band = fold_band(VdpVariant::nonsmooth);
  CHECK(band.first == doctest::Approx(3 * kPi / 8));
  CHECK(band.second == doctest::Approx(3 * kPi / 4));
  const auto pts = fold_locus(VdpVariant::nonsmooth, {0.5, 1.3, 1.8, 2.2, 3.0});
  CHECK_FALSE(pts[0].exists);
  CHECK_FALSE(pts[4].exists);
  for (int i = 1; i <= 3; ++i) {
    REQUIRE(pts[i].exists);
    CHECK(std::abs(amplitude_residual(pts[i].amplitude, pts[i].a, pts[i].lambda,
                                      VdpVariant::nonsmooth)) < 1e-12);
    CHECK(std::abs(amplitude_residual_slope(pts[i].amplitude, pts[i].a,
                                            VdpVariant::nonsmooth)) < 1e-12);
  }
}

TEST_CASE("fold points have a vanishing averaged determinant") {
  const auto pts = fold_locus(VdpVariant::nonsmooth, {1.2, 1.5, 1.9, 2.3});
  for (const auto& p : pts) {
    REQUIRE(p.exists);
    const Vec2 v = reconstruct_zero(p.amplitude, p.a, p.lambda, VdpVariant::nonsmooth);
    CHECK(std::abs(det_trace_analytic(v(0), v(1), p.a).det) <= 1e-8);
  }
}

TEST_CASE("fold detunings bound the three-root window") {
  for (VdpVariant v : {VdpVariant::nonsmooth, VdpVariant::classical}) {
    const auto cv = critical_values(v);
    const double mid = 0.5 * (cv.lambda_double + cv.lambda_sep);
    const auto folds = fold_detunings(mid, v);
    REQUIRE(folds.size() == 2);
    CHECK(folds[0] < folds[1]);
    for (double a : folds) {
      // At a fold the amplitude equation has a double root.
      bool has_double = false;
      for (const auto& r : amplitude_roots(a, mid, v).roots) {
        has_double = has_double || std::abs(amplitude_residual_slope(r.amplitude, a, v)) < 1e-6;
      }
      CHECK(has_double);
    }
    // Three roots strictly inside the window, one outside it.
    const double inside = 0.5 * (folds[0] + folds[1]);
    CHECK(amplitude_roots(inside, mid, v).roots.size() == 3);
    CHECK(amplitude_roots(0.5 * folds[0], mid, v).roots.size() == 1);
    CHECK(amplitude_roots(folds[1] + 0.1, mid, v).roots.size() == 1);
    CHECK(fold_detunings(0.5 * cv.lambda_double, v).size() == 1);
    CHECK(fold_detunings(1.1 * cv.lambda_sep, v).empty());
  }
}

TEST_CASE("curve families follow the critical values") {
  CHECK(curve_family(0.3, VdpVariant::nonsmooth) == CurveFamily::I);
  CHECK(curve_family(3 * kPi / 16, VdpVariant::nonsmooth) == CurveFamily::II);
  CHECK(curve_family(0.7, VdpVariant::nonsmooth) == CurveFamily::III);
  CHECK(curve_family(9 * std::sqrt(3.0) * kPi / 64, VdpVariant::nonsmooth) == CurveFamily::IV);
  CHECK(curve_family(1.5, VdpVariant::nonsmooth) == CurveFamily::V);
}

TEST_CASE("strong forcing gives a single branch, stable only near resonance") {
  const auto curve = trace_curve(1.5, -2.0, 2.0, 201, VdpVariant::nonsmooth);
  REQUIRE(curve.slices.size() == 201);
  for (const auto& slice : curve.slices) {
    REQUIRE(slice.points.size() == 1);
    // trace = 2 (pi - 2A): small far-off-resonance responses are unstable.
    const double amp = slice.points[0].amplitude;
    CHECK(slice.points[0].stable == (amp > kPi / 2 && slice.points[0].det > 0));
  }
  const auto all = guaranteed_stable_exists(curve);
  CHECK_FALSE(all.holds);
  CHECK(all.witnesses[100].has_value());
  CHECK_FALSE(all.witnesses[0].has_value());
  CHECK(guaranteed_stable_exists(trace_curve(1.5, -0.75, 0.75, 31, VdpVariant::nonsmooth)).holds);
}

}  // TEST_SUITE
