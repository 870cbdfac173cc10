#include "avgorbit/serialize.hpp"

#include <cstdio>

namespace avgorbit {

namespace {

nlohmann::json vec_json(const Vec& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out.push_back(v(i));
  }
  return out;
}

nlohmann::json mat_json(const Mat& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out.push_back(vec_json(m.row(i).transpose()));
  }
  return out;
}

}  // namespace

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_curve_csv(std::ostream& os, const ResonanceCurve& curve) {
  os << "# family=" << to_string(curve.family) << '\n';
  os << "a,lambda,A,stable,det,trace,multiplicity\n";
  for (const auto& slice : curve.slices) {
    for (const auto& p : slice.points) {
      os << format_number(p.a) << ',' << format_number(p.lambda) << ','
         << format_number(p.amplitude) << ',' << (p.stable ? 1 : 0) << ','
         << format_number(p.det) << ',' << format_number(p.trace) << ',' << p.multiplicity
         << '\n';
    }
  }
}

nlohmann::json to_json(const ZeroReport& r) {
  nlohmann::json j;
  j["v0"] = vec_json(r.v0);
  j["residual"] = r.residual;
  j["jacobian"] = mat_json(r.jacobian);
  j["det"] = r.det;
  j["trace"] = r.trace;
  j["eigen_real_parts"] = r.eigen_real_parts;
  j["verdict"] = to_string(r.verdict);
  j["iterations"] = r.iterations;
  j["warning"] = r.warning ? nlohmann::json(*r.warning) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const ResonanceCurve& curve) {
  nlohmann::json j;
  j["lambda"] = curve.lambda;
  j["variant"] = to_string(curve.variant);
  j["family"] = to_string(curve.family);
  j["fold_detunings"] = fold_detunings(curve.lambda, curve.variant);
  nlohmann::json slices = nlohmann::json::array();
  for (const auto& slice : curve.slices) {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : slice.points) {
      points.push_back({{"A", p.amplitude},
                        {"stable", p.stable},
                        {"det", p.det},
                        {"trace", p.trace},
                        {"multiplicity", p.multiplicity}});
    }
    slices.push_back({{"a", slice.a}, {"points", points}});
  }
  j["slices"] = slices;
  return j;
}

nlohmann::json to_json(const CriticalValues& cv) {
  return {{"variant", to_string(cv.variant)},
          {"lambda_double", cv.lambda_double},
          {"amplitude_double", cv.amplitude_double},
          {"lambda_sep", cv.lambda_sep},
          {"a_sep", cv.a_sep},
          {"amplitude_sep", cv.amplitude_sep}};
}

nlohmann::json to_json(const VerificationReport& r) {
  nlohmann::json multipliers = nlohmann::json::array();
  for (const auto& z : r.floquet_multipliers) {
    multipliers.push_back({{"re", z.real()}, {"im", z.imag()}, {"modulus", std::abs(z)}});
  }
  return {{"eps", r.eps},
          {"v0", vec_json(r.v0)},
          {"v_eps", vec_json(r.v_eps)},
          {"distance", r.distance},
          {"simulated_amplitude", r.simulated_amplitude},
          {"predicted_amplitude", r.predicted_amplitude},
          {"floquet_multipliers", multipliers},
          {"stability_verdict", to_string(r.stability_verdict)},
          {"classification", to_string(r.classification)},
          {"agreement", r.agreement}};
}

nlohmann::json to_json(const EpsSweep& sweep) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : sweep.entries) {
    nlohmann::json j{{"eps", e.eps}};
    j["report"] = e.report ? to_json(*e.report) : nlohmann::json(nullptr);
    j["error"] = e.error ? nlohmann::json(*e.error) : nlohmann::json(nullptr);
    entries.push_back(j);
  }
  return {{"entries", entries},
          {"slope", sweep.slope ? nlohmann::json(*sweep.slope) : nlohmann::json(nullptr)}};
}

}  // namespace avgorbit
