#pragma once

#include <optional>
#include <string>
#include <vector>

#include "geocomplete/flows.hpp"
#include "geocomplete/lie_algebra.hpp"
#include "geocomplete/metric_operator.hpp"
#include "geocomplete/quadratic_field.hpp"

namespace geocomplete {

enum class Verdict { Complete, Incomplete, Undecided };
const char* verdict_name(Verdict v);

enum class Reason {
  StructuralComplete,  // the algebra type forces completeness of every metric
  DefiniteIntegral,    // a positive definite conserved quadratic bounds orbits
  Linearizable,        // the geodesic field is affine in split coordinates
  SpectralCriterion,   // sign test on the metric operator spectrum
  IdempotentWitness,   // a strict idempotent certifies finite-time escape
  NecessaryOnly,       // no idempotent found, and no sufficient test applies
  BoundaryCase,        // the criterion value sits inside the tolerance band
};
const char* reason_name(Reason r);

struct CompletenessReport {
  Verdict verdict = Verdict::Undecided;
  Reason reason = Reason::NecessaryOnly;
  std::string detail;

  Classification classification;
  std::optional<SpectralShape> shape;       // when the metric operator exists
  std::optional<double> criterion_value;    // signed spectral/product test value

  // Witnesses and certificates, all in momentum coordinates of the given basis.
  std::vector<Idempotent> idempotents;          // strict idempotents of the flow
  std::optional<Vec3> witness;                  // the escape witness, when incomplete
  double witness_residual = 0.0;
  std::optional<Mat3> definite_integral;        // validated conserved definite form
  std::optional<AffineQuadraticCertificate> linearizable;
  std::optional<PlanarVerdict> planar;          // closed momentum subsystem analysis
};

struct DecideOptions {
  double crit_tol = 1e-9;    // tolerance band around criterion boundaries
  double eig_tol = 1e-8;     // eigenvalue clustering for the metric operator
  unsigned seed = 12345;     // seeding for definite-combination sampling
  DirectionSearchOptions search;
};

// Full decision procedure for the geodesic flow of a left-invariant metric.
CompletenessReport decide(const LieAlgebra3& alg, const QuadraticForm3& metric,
                          const DecideOptions& opts = {});

// Specialized criteria; `decide` dispatches to these by algebra type.
CompletenessReport solvable_e11_criterion(const LieAlgebra3& alg, const QuadraticForm3& metric,
                                          const DecideOptions& opts = {});
CompletenessReport sl2_criterion(const LieAlgebra3& alg, const QuadraticForm3& metric,
                                 const DecideOptions& opts = {});

// Necessary-condition helper: the first strict idempotent of the field, if any.
std::optional<Idempotent> idempotent_incompleteness(const QuadraticField& field,
                                                    const DirectionSearchOptions& opts = {});

}  // namespace geocomplete
