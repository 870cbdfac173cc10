#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "avgorbit/averaging.hpp"
#include "avgorbit/resonance.hpp"
#include "avgorbit/verify.hpp"

namespace avgorbit {

/// 17 significant digits, '.' decimal separator.
std::string format_number(double x);

/// `# family=<tag>` comment line, then `a,lambda,A,stable,det,trace,multiplicity`
/// and one row per root, LF line endings.
void write_curve_csv(std::ostream& os, const ResonanceCurve& curve);

nlohmann::json to_json(const ZeroReport& report);
nlohmann::json to_json(const ResonanceCurve& curve);
nlohmann::json to_json(const CriticalValues& cv);
nlohmann::json to_json(const VerificationReport& report);
nlohmann::json to_json(const EpsSweep& sweep);

}  // namespace avgorbit
