#pragma once

#include <optional>
#include <string>
#include <vector>

#include "avgorbit/models.hpp"

namespace avgorbit {

/// Residual f(A) of the amplitude equation A^2 (a^2 + s(A)^2) = lambda^2,
/// with s(A) = 1 - 4A/(3 pi) (nonsmooth) or 1 - A^2/4 (classical).
double amplitude_residual(double amplitude, double a, double lambda, VdpVariant variant);

/// df/dA; independent of lambda.
double amplitude_residual_slope(double amplitude, double a, VdpVariant variant);

struct AmplitudeRoot {
  double amplitude = 0.0;
  int multiplicity = 1;
};

struct AmplitudeRoots {
  std::vector<AmplitudeRoot> roots;  // ascending
  /// Set when lambda = 0: A = 0 is then a solution branch as well.
  bool zero_amplitude_branch = false;
};

/// All positive roots of the amplitude equation. Critical points of f are
/// found in closed form; each monotone segment is then bracketed and solved.
/// Roots closer than 1e-7 are merged into a single double root.
AmplitudeRoots amplitude_roots(double a, double lambda, VdpVariant variant);

struct StabilityTag {
  bool stable = false;
  double det = 0.0;
  double trace = 0.0;
};

/// Determinant and trace of g0' on the circle |(M, N)| = A. Closed form for the
/// nonsmooth variant; the classical one differentiates the quadrature field.
/// stable <=> det > 0 and trace < 0.
StabilityTag stability_tag(double amplitude, double a, VdpVariant variant);

/// The zero (M, N) of g0 with |(M, N)| = A for an amplitude root A.
Vec2 reconstruct_zero(double amplitude, double a, double lambda, VdpVariant variant);

/// Compares the quadrature determinant of the classical averaged field,
/// divided by pi^2, against the two candidate fold polynomials
/// 1 + a^2 - A^2 + 3A^4/16 and 1 - a^2 - A^2 + 3A^4/16.
struct DetFormCheck {
  double a = 0.0;
  double amplitude = 0.0;
  double numeric = 0.0;
  double plus_a2 = 0.0;
  double minus_a2 = 0.0;
  std::string matches;  // "plus_a2", "minus_a2" or "neither"
};

DetFormCheck classical_det_form_check(double a, double amplitude);

struct CriticalValues {
  VdpVariant variant = VdpVariant::nonsmooth;
  double lambda_double = 0.0;  // double root at a = 0
  double amplitude_double = 0.0;
  double lambda_sep = 0.0;     // largest lambda on the fold locus
  double a_sep = 0.0;          // positive detuning where it is attained
  double amplitude_sep = 0.0;
};

/// Numeric joint solution of f = 0 and df/dA = 0.
CriticalValues critical_values(VdpVariant variant);

/// Closed forms for comparison: nonsmooth lambda_double = 3 pi / 16,
/// lambda_sep = 9 sqrt(3) pi / 64, A_double = 3 pi / 8; classical
/// lambda_double = 4 sqrt(3) / 9, lambda_sep = sqrt(32 / 27), A_double = 2 / sqrt(3).
CriticalValues critical_values_closed_form(VdpVariant variant);

/// Amplitude band on which folds exist (a^2 >= 0 on the fold locus).
std::pair<double, double> fold_band(VdpVariant variant);

struct FoldPoint {
  double amplitude = 0.0;
  bool exists = false;
  double a = 0.0;  // >= 0; the locus is symmetric in a
  double lambda = 0.0;
  double residual = 0.0;
  double slope_residual = 0.0;
};

std::vector<FoldPoint> fold_locus(VdpVariant variant, const std::vector<double>& amplitudes);

/// Nonnegative detunings at which the amplitude equation with this lambda has
/// a double root, ascending. Two of them (a1 < a2) for lambda strictly between
/// lambda_double and lambda_sep, one below lambda_double, none above lambda_sep.
std::vector<double> fold_detunings(double lambda, VdpVariant variant);

enum class CurveFamily { I, II, III, IV, V };

const char* to_string(CurveFamily f);

/// Family tag from lambda relative to the critical values, with equality
/// tolerance 1e-9.
CurveFamily curve_family(double lambda, VdpVariant variant);

struct ResonancePoint {
  double a = 0.0;
  double lambda = 0.0;
  double amplitude = 0.0;
  bool stable = false;
  double det = 0.0;
  double trace = 0.0;
  int multiplicity = 1;
};

struct ResonanceSlice {
  double a = 0.0;
  std::vector<ResonancePoint> points;
};

struct ResonanceCurve {
  double lambda = 0.0;
  VdpVariant variant = VdpVariant::nonsmooth;
  CurveFamily family = CurveFamily::I;
  std::vector<ResonanceSlice> slices;
};

ResonanceCurve trace_curve(double lambda, double a_min, double a_max, int n,
                           VdpVariant variant);

struct StableExistence {
  bool holds = false;
  /// Largest-amplitude stable point per slice, if any.
  std::vector<std::optional<ResonancePoint>> witnesses;
};

StableExistence guaranteed_stable_exists(const ResonanceCurve& curve);

}  // namespace avgorbit
