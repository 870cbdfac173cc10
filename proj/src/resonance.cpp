#include "avgorbit/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

namespace avgorbit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBeta = 4.0 / (3.0 * kPi);
constexpr double kTieTolerance = 1e-7;
constexpr double kFamilyTolerance = 1e-9;

double shape(double amplitude, VdpVariant variant) {
  return variant == VdpVariant::nonsmooth ? 1.0 - kBeta * amplitude
                                          : 1.0 - 0.25 * amplitude * amplitude;
}

// df/dA / (2A) - a^2; the fold condition is a^2 = -fold_part(A).
double fold_part(double amplitude, VdpVariant variant) {
  if (variant == VdpVariant::nonsmooth) {
    return 1.0 - 3.0 * kBeta * amplitude + 2.0 * kBeta * kBeta * amplitude * amplitude;
  }
  const double x = amplitude * amplitude;
  return 1.0 - x + 3.0 * x * x / 16.0;
}

// Positive amplitudes where df/dA = 0, i.e. roots of a^2 + fold_part(A).
std::vector<double> critical_amplitudes(double a, VdpVariant variant) {
  std::vector<double> out;
  if (variant == VdpVariant::nonsmooth) {
    // 2 b^2 A^2 - 3 b A + (1 + a^2) = 0
    const double disc = 1.0 - 8.0 * a * a;
    if (disc >= 0.0) {
      const double root = std::sqrt(disc);
      out = {(3.0 - root) / (4.0 * kBeta), (3.0 + root) / (4.0 * kBeta)};
    }
  } else {
    // 3/16 x^2 - x + (1 + a^2) = 0 with x = A^2
    const double disc = 1.0 - 0.75 * (1.0 + a * a);
    if (disc >= 0.0) {
      const double root = std::sqrt(disc);
      out = {std::sqrt((1.0 - root) * 8.0 / 3.0), std::sqrt((1.0 + root) * 8.0 / 3.0)};
    }
  }
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

template <class F>
double solve_bracketed(F f, double lo, double hi, double f_lo, double f_hi) {
  boost::uintmax_t max_iter = 200;
  const auto bracket = boost::math::tools::toms748_solve(
      f, lo, hi, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(52), max_iter);
  const double mid = 0.5 * (bracket.first + bracket.second);
  // Return whichever candidate has the smallest residual.
  double best = mid;
  for (double c : {bracket.first, bracket.second}) {
    if (std::abs(f(c)) < std::abs(f(best))) {
      best = c;
    }
  }
  return best;
}

}  // namespace

double amplitude_residual(double amplitude, double a, double lambda, VdpVariant variant) {
  const double s = shape(amplitude, variant);
  return amplitude * amplitude * (a * a + s * s) - lambda * lambda;
}

double amplitude_residual_slope(double amplitude, double a, VdpVariant variant) {
  return 2.0 * amplitude * (a * a + fold_part(amplitude, variant));
}

AmplitudeRoots amplitude_roots(double a, double lambda, VdpVariant variant) {
  if (!(lambda >= 0.0) || !std::isfinite(a)) {
    throw Error(ErrorKind::invalid_argument, "amplitude roots need lambda >= 0 and finite a");
  }
  AmplitudeRoots out;
  if (lambda == 0.0) {
    out.zero_amplitude_branch = true;
    if (a == 0.0) {
      const double circle = variant == VdpVariant::nonsmooth ? 1.0 / kBeta : 2.0;
      out.roots.push_back({circle, 2});
    }
    return out;
  }

  auto f = [&](double amp) { return amplitude_residual(amp, a, lambda, variant); };
  const std::vector<double> crit = critical_amplitudes(a, variant);

  double upper = crit.empty() ? 2.0 : 2.0 * crit.back();
  while (f(upper) <= 0.0) {
    upper *= 2.0;
  }
  std::vector<double> knots{0.0};
  knots.insert(knots.end(), crit.begin(), crit.end());
  knots.push_back(upper);

  const double tangent_tol = 1e-15 * std::max(1.0, lambda * lambda);
  std::vector<double> values;
  std::vector<bool> tangent;
  for (std::size_t i = 0; i < knots.size(); ++i) {
    values.push_back(f(knots[i]));
    const bool interior = i > 0 && i + 1 < knots.size();
    tangent.push_back(interior && std::abs(values.back()) <= tangent_tol);
  }

  std::vector<AmplitudeRoot> roots;
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (tangent[i]) {
      roots.push_back({knots[i], 2});
    }
  }
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    if (tangent[i] || tangent[i + 1]) {
      continue;
    }
    if (values[i] * values[i + 1] < 0.0) {
      roots.push_back({solve_bracketed(f, knots[i], knots[i + 1], values[i], values[i + 1]), 1});
    }
  }
  std::sort(roots.begin(), roots.end(),
            [](const AmplitudeRoot& x, const AmplitudeRoot& y) { return x.amplitude < y.amplitude; });

  for (const auto& r : roots) {
    if (!out.roots.empty() && r.amplitude - out.roots.back().amplitude < kTieTolerance) {
      AmplitudeRoot& prev = out.roots.back();
      // Merge onto the critical point between the pair when there is one.
      double merged = 0.5 * (prev.amplitude + r.amplitude);
      for (double c : crit) {
        if (c >= prev.amplitude && c <= r.amplitude) {
          merged = c;
        }
      }
      prev.amplitude = merged;
      prev.multiplicity = 2;
      continue;
    }
    out.roots.push_back(r);
  }
  return out;
}

StabilityTag stability_tag(double amplitude, double a, VdpVariant variant) {
  StabilityTag tag;
  if (variant == VdpVariant::nonsmooth) {
    const DetTrace dt = det_trace_analytic(0.0, amplitude, a);
    tag.det = dt.det;
    tag.trace = dt.trace;
  } else {
    // The Jacobian of g0 does not depend on lambda.
    const AveragedField field = vdp_averaged_field(VdpParams{a, 0.0, VdpVariant::classical});
    Vec v(2);
    v << 0.0, amplitude;
    const Mat jac = g0_jacobian_numeric(field, v);
    tag.det = jac.determinant();
    tag.trace = jac.trace();
  }
  tag.stable = tag.det > 0.0 && tag.trace < 0.0;
  return tag;
}

DetFormCheck classical_det_form_check(double a, double amplitude) {
  DetFormCheck out;
  out.a = a;
  out.amplitude = amplitude;
  out.numeric = stability_tag(amplitude, a, VdpVariant::classical).det / (kPi * kPi);
  const double x = amplitude * amplitude;
  out.plus_a2 = 1.0 + a * a - x + 3.0 * x * x / 16.0;
  out.minus_a2 = 1.0 - a * a - x + 3.0 * x * x / 16.0;
  constexpr double kMatchTol = 1e-6;
  if (std::abs(out.numeric - out.plus_a2) <= kMatchTol) {
    out.matches = "plus_a2";
  } else if (std::abs(out.numeric - out.minus_a2) <= kMatchTol) {
    out.matches = "minus_a2";
  } else {
    out.matches = "neither";
  }
  return out;
}

Vec2 reconstruct_zero(double amplitude, double a, double lambda, VdpVariant variant) {
  if (lambda == 0.0) {
    return {0.0, amplitude};
  }
  // g0 = (c I + d K) v - pi lambda e1 with K v = (N, -M), so
  // v = pi lambda (c, d) / (c^2 + d^2).
  const double c = kPi * shape(amplitude, variant);
  const double d = kPi * a;
  const double scale = kPi * lambda / (c * c + d * d);
  return {scale * c, scale * d};
}

std::pair<double, double> fold_band(VdpVariant variant) {
  const std::vector<double> crit = critical_amplitudes(0.0, variant);
  return {crit.front(), crit.back()};
}

CriticalValues critical_values(VdpVariant variant) {
  CriticalValues cv;
  cv.variant = variant;
  auto fold = [&](double amp) { return fold_part(amp, variant); };

  // Fold detuning a^2 = -fold_part(A) vanishes at the band ends; find them by
  // scanning and bracketing.
  std::vector<double> band_ends;
  constexpr int kScan = 4000;
  constexpr double kScanMax = 8.0;
  double prev_amp = kScanMax / kScan;
  double prev_val = fold(prev_amp);
  for (int i = 2; i <= kScan; ++i) {
    const double amp = kScanMax * i / kScan;
    const double val = fold(amp);
    if (val == 0.0) {
      band_ends.push_back(amp);
    } else if (prev_val * val < 0.0) {
      band_ends.push_back(solve_bracketed(fold, prev_amp, amp, prev_val, val));
    }
    prev_amp = amp;
    prev_val = val;
  }
  if (band_ends.size() != 2) {
    throw Error(ErrorKind::nonconvergence, "fold band not bracketed");
  }

  // Double point at a = 0: the band end with the largest forcing.
  auto lambda_on_locus = [&](double amp) {
    const double a2 = std::max(0.0, -fold(amp));
    const double s = shape(amp, variant);
    return std::sqrt(amp * amp * (a2 + s * s));
  };
  cv.amplitude_double = band_ends[0];
  for (double end : band_ends) {
    if (lambda_on_locus(end) > lambda_on_locus(cv.amplitude_double)) {
      cv.amplitude_double = end;
    }
  }
  cv.lambda_double = lambda_on_locus(cv.amplitude_double);

  const auto [arg, neg_lambda] = boost::math::tools::brent_find_minima(
      [&](double amp) { return -lambda_on_locus(amp); }, band_ends[0], band_ends[1],
      std::numeric_limits<double>::digits / 2);
  cv.amplitude_sep = arg;
  cv.lambda_sep = -neg_lambda;
  cv.a_sep = std::sqrt(std::max(0.0, -fold(arg)));
  return cv;
}

CriticalValues critical_values_closed_form(VdpVariant variant) {
  CriticalValues cv;
  cv.variant = variant;
  if (variant == VdpVariant::nonsmooth) {
    cv.lambda_double = 3.0 * kPi / 16.0;
    cv.amplitude_double = 3.0 * kPi / 8.0;
    cv.lambda_sep = 9.0 * std::sqrt(3.0) * kPi / 64.0;
    cv.a_sep = 1.0 / (2.0 * std::sqrt(2.0));
    cv.amplitude_sep = 9.0 * kPi / 16.0;
  } else {
    cv.lambda_double = 4.0 * std::sqrt(3.0) / 9.0;
    cv.amplitude_double = 2.0 / std::sqrt(3.0);
    cv.lambda_sep = std::sqrt(32.0 / 27.0);
    cv.a_sep = 1.0 / std::sqrt(3.0);
    cv.amplitude_sep = std::sqrt(8.0 / 3.0);
  }
  return cv;
}

std::vector<FoldPoint> fold_locus(VdpVariant variant, const std::vector<double>& amplitudes) {
  constexpr double kBandSlack = 1e-12;
  std::vector<FoldPoint> out;
  out.reserve(amplitudes.size());
  for (double amp : amplitudes) {
    FoldPoint p;
    p.amplitude = amp;
    const double a2 = -fold_part(amp, variant);
    if (amp > 0.0 && a2 >= -kBandSlack) {
      p.exists = true;
      p.a = std::sqrt(std::max(0.0, a2));
      const double s = shape(amp, variant);
      p.lambda = std::sqrt(amp * amp * (p.a * p.a + s * s));
      p.residual = amplitude_residual(amp, p.a, p.lambda, variant);
      p.slope_residual = amplitude_residual_slope(amp, p.a, variant);
    }
    out.push_back(p);
  }
  return out;
}

std::vector<double> fold_detunings(double lambda, VdpVariant variant) {
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw Error(ErrorKind::invalid_argument, "forcing amplitude lambda must be >= 0");
  }
  const CriticalValues cv = critical_values(variant);
  const auto [lo, hi] = fold_band(variant);
  auto excess = [&](double amp) {
    const FoldPoint p = fold_locus(variant, {amp}).front();
    return p.lambda - lambda;
  };
  std::vector<double> out;
  // lambda along the locus rises from the double point to the separatrix
  // value, then falls towards the far band end.
  for (const auto& [from, to] : {std::pair{lo, cv.amplitude_sep}, std::pair{cv.amplitude_sep, hi}}) {
    const double f_from = excess(from);
    const double f_to = excess(to);
    if (f_from == 0.0 || f_to == 0.0 || f_from * f_to < 0.0) {
      const double amp = f_from == 0.0 ? from
                         : f_to == 0.0 ? to
                                       : solve_bracketed(excess, from, to, f_from, f_to);
      out.push_back(fold_locus(variant, {amp}).front().a);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](double x, double y) { return std::abs(x - y) <= kTieTolerance; }),
            out.end());
  return out;
}

const char* to_string(CurveFamily f) {
  switch (f) {
    case CurveFamily::I: return "I";
    case CurveFamily::II: return "II";
    case CurveFamily::III: return "III";
    case CurveFamily::IV: return "IV";
    case CurveFamily::V: return "V";
  }
  return "?";
}

CurveFamily curve_family(double lambda, VdpVariant variant) {
  static const CriticalValues nonsmooth = critical_values(VdpVariant::nonsmooth);
  static const CriticalValues classical = critical_values(VdpVariant::classical);
  const CriticalValues& cv = variant == VdpVariant::nonsmooth ? nonsmooth : classical;
  if (std::abs(lambda - cv.lambda_double) <= kFamilyTolerance) return CurveFamily::II;
  if (std::abs(lambda - cv.lambda_sep) <= kFamilyTolerance) return CurveFamily::IV;
  if (lambda < cv.lambda_double) return CurveFamily::I;
  if (lambda < cv.lambda_sep) return CurveFamily::III;
  return CurveFamily::V;
}

ResonanceCurve trace_curve(double lambda, double a_min, double a_max, int n,
                           VdpVariant variant) {
  if (n < 2 || !(a_min < a_max)) {
    throw Error(ErrorKind::invalid_argument, "curve grid needs n >= 2 and a_min < a_max");
  }
  ResonanceCurve curve;
  curve.lambda = lambda;
  curve.variant = variant;
  curve.family = curve_family(lambda, variant);
  curve.slices.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double a = a_min + (a_max - a_min) * i / (n - 1);
    ResonanceSlice slice;
    slice.a = a;
    for (const AmplitudeRoot& root : amplitude_roots(a, lambda, variant).roots) {
      const StabilityTag tag = stability_tag(root.amplitude, a, variant);
      slice.points.push_back(ResonancePoint{a, lambda, root.amplitude, tag.stable, tag.det,
                                            tag.trace, root.multiplicity});
    }
    curve.slices.push_back(std::move(slice));
  }
  return curve;
}

StableExistence guaranteed_stable_exists(const ResonanceCurve& curve) {
  StableExistence out;
  out.holds = !curve.slices.empty();
  for (const auto& slice : curve.slices) {
    std::optional<ResonancePoint> witness;
    for (const auto& p : slice.points) {
      if (p.stable && (!witness || p.amplitude > witness->amplitude)) {
        witness = p;
      }
    }
    out.holds = out.holds && witness.has_value();
    out.witnesses.push_back(witness);
  }
  return out;
}

}  // namespace avgorbit
