#include "report.hpp"

#include "geocomplete/flows.hpp"

namespace geocomplete::cli {

ordered_json vec3_json(const Vec3& v) {
  return ordered_json::array({v(0), v(1), v(2)});
}

ordered_json mat3_json(const Mat3& m) {
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < 3; ++i)
    rows.push_back(ordered_json::array({m(i, 0), m(i, 1), m(i, 2)}));
  return rows;
}

ordered_json classification_json(const Classification& c) {
  ordered_json out;
  out["type"] = algebra_type_name(c.type);
  out["unimodular"] = c.milnor.has_value();
  if (c.milnor) {
    ordered_json m;
    m["alphas"] = vec3_json(c.milnor->alphas);
    m["signs"] = ordered_json::array(
        {c.milnor->signs[0], c.milnor->signs[1], c.milnor->signs[2]});
    m["frame"] = mat3_json(c.milnor->frame);
    m["residual"] = c.milnor->residual;
    out["milnor"] = m;
  } else {
    out["trace_vector"] = vec3_json(c.trace_vector);
  }
  return out;
}

ordered_json field_json(const QuadraticField& f) {
  ordered_json out;
  out["dim"] = f.dim();
  ordered_json comps = ordered_json::array();
  for (int i = 0; i < 3; ++i) comps.push_back(mat3_json(f.coeff(i)));
  out["coefficients"] = comps;
  return out;
}

const char* planar_status_name(PlanarStatus s) {
  return s == PlanarStatus::Complete ? "Complete" : "Incomplete";
}

const char* planar_reason_name(PlanarReason r) {
  switch (r) {
    case PlanarReason::ZeroField: return "ZeroField";
    case PlanarReason::AffineQuadratic: return "AffineQuadratic";
    case PlanarReason::NegativeDiscriminant: return "NegativeDiscriminant";
    case PlanarReason::NonnegativeDiscriminant: return "NonnegativeDiscriminant";
    case PlanarReason::IdempotentRay: return "IdempotentRay";
  }
  return "Unknown";
}

ordered_json planar_json(const PlanarVerdict& p) {
  ordered_json out;
  out["status"] = planar_status_name(p.status);
  out["reason"] = planar_reason_name(p.reason);
  if (p.common_factor)
    out["common_factor"] =
        ordered_json::array({(*p.common_factor)(0), (*p.common_factor)(1)});
  if (p.linear_part) {
    const Mat2& m = *p.linear_part;
    out["linear_part"] = ordered_json::array(
        {ordered_json::array({m(0, 0), m(0, 1)}),
         ordered_json::array({m(1, 0), m(1, 1)})});
    out["discriminant"] = p.discriminant;
  }
  if (p.witness) out["witness"] = vec3_json(*p.witness);
  return out;
}

ordered_json analyze_json(const ProblemSpec& spec, const CompletenessReport& rep) {
  const QuadraticForm3 metric(spec.metric, FormSpace::Algebra);
  const QuadraticField field = euler_field_dual(spec.algebra, metric);
  const Signature sig = signature(metric);

  ordered_json out;
  out["name"] = spec.name;
  out["algebra"] = classification_json(rep.classification);
  {
    ordered_json m;
    m["matrix"] = mat3_json(spec.metric);
    m["signature"] = ordered_json::array({sig.positive, sig.negative, sig.zero});
    out["metric"] = m;
  }
  out["dual_field"] = field_json(field);

  out["verdict"] = verdict_name(rep.verdict);
  out["reason"] = reason_name(rep.reason);
  out["detail"] = rep.detail;
  if (rep.shape) out["spectral_shape"] = spectral_shape_name(*rep.shape);
  if (rep.criterion_value) out["criterion_value"] = *rep.criterion_value;

  ordered_json idems = ordered_json::array();
  for (const auto& id : rep.idempotents) {
    ordered_json e;
    e["point"] = vec3_json(id.point);
    e["residual"] = id.residual;
    idems.push_back(e);
  }
  out["idempotents"] = idems;

  if (rep.witness) {
    out["witness"] = vec3_json(*rep.witness);
    out["witness_residual"] = rep.witness_residual;
  }
  if (rep.definite_integral) out["definite_integral"] = mat3_json(*rep.definite_integral);
  if (rep.linearizable) {
    ordered_json l;
    l["transform"] = mat3_json(rep.linearizable->T);
    l["invariant_functionals"] = rep.linearizable->invariant_functionals;
    out["linearizable"] = l;
  }
  if (rep.planar) out["planar"] = planar_json(*rep.planar);

  {
    const FirstIntegralBasis basis = quadratic_first_integrals(field);
    ordered_json fi;
    fi["dimension"] = basis.dimension();
    ordered_json forms = ordered_json::array();
    for (const auto& q : basis.forms) forms.push_back(mat3_json(q.m));
    fi["forms"] = forms;
    fi["residuals"] = basis.residuals;
    out["first_integrals"] = fi;
  }
  out["warnings"] = spec.warnings;
  return out;
}

int verdict_exit(Verdict v) {
  switch (v) {
    case Verdict::Complete: return 0;
    case Verdict::Incomplete: return 10;
    case Verdict::Undecided: return 20;
  }
  return 20;
}

int error_exit(ErrorCode c) {
  switch (c) {
    case ErrorCode::ParseError:
      return 2;
    case ErrorCode::InvariantViolation:
    case ErrorCode::NotUnimodular:
    case ErrorCode::NotE11:
    case ErrorCode::NotSL2R:
    case ErrorCode::BadParams:
    case ErrorCode::BadOptions:
    case ErrorCode::DependentSpan:
      return 3;
    case ErrorCode::DegenerateMetric:
    case ErrorCode::DegenerateKilling:
    case ErrorCode::IllConditionedMetric:
    case ErrorCode::AmbiguousSpectrum:
    case ErrorCode::DegenerateInput:
      return 4;
    case ErrorCode::IntegratorError:
    case ErrorCode::InsufficientTail:
    case ErrorCode::ResidualTooHigh:
      return 5;
    case ErrorCode::InternalInconsistency:
      return 6;
  }
  return 6;
}

}  // namespace geocomplete::cli
