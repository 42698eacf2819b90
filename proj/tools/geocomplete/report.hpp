#pragma once

#include <string>

#include "geocomplete/completeness.hpp"
#include "geocomplete/problem_spec.hpp"
#include "json.hpp"

namespace geocomplete::cli {

using ordered_json = nlohmann::ordered_json;

ordered_json vec3_json(const Vec3& v);
ordered_json mat3_json(const Mat3& m);
ordered_json classification_json(const Classification& c);
ordered_json field_json(const QuadraticField& f);
ordered_json planar_json(const PlanarVerdict& p);

/// The complete machine-readable analysis: classification, field, verdict,
/// certificates, and the quadratic first-integral basis. Deterministic for a
/// fixed problem and seed.
ordered_json analyze_json(const ProblemSpec& spec, const CompletenessReport& rep);

const char* planar_status_name(PlanarStatus s);
const char* planar_reason_name(PlanarReason r);

int verdict_exit(Verdict v);
int error_exit(ErrorCode c);

}  // namespace geocomplete::cli
