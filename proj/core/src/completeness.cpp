#include "geocomplete/completeness.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace geocomplete {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Complete: return "Complete";
    case Verdict::Incomplete: return "Incomplete";
    case Verdict::Undecided: return "Undecided";
  }
  return "Unknown";
}

const char* reason_name(Reason r) {
  switch (r) {
    case Reason::StructuralComplete: return "StructuralComplete";
    case Reason::DefiniteIntegral: return "DefiniteIntegral";
    case Reason::Linearizable: return "Linearizable";
    case Reason::SpectralCriterion: return "SpectralCriterion";
    case Reason::IdempotentWitness: return "IdempotentWitness";
    case Reason::NecessaryOnly: return "NecessaryOnly";
    case Reason::BoundaryCase: return "BoundaryCase";
  }
  return "Unknown";
}

namespace {

void require_nondegenerate(const QuadraticForm3& metric) {
  if (signature(metric).zero > 0)
    throw Error(ErrorCode::DegenerateMetric, "metric has a null eigenvalue");
}

void set_witness(CompletenessReport& rep) {
  if (!rep.idempotents.empty()) {
    rep.witness = rep.idempotents.front().point;
    rep.witness_residual = rep.idempotents.front().residual;
  }
}

// Lift a planar idempotent of the (xi2, xi3) subsystem to the full flow by
// solving the first component, which is affine in xi1 whenever the subsystem
// closes.  Returns false when that affine equation is singular.
bool lift_planar_idempotent(const QuadraticField& full, const Vec3& planar, Vec3& out) {
  double q1 = planar[0], q2 = planar[1];
  const Mat3& A0 = full.coeff(0);
  double c = 2.0 * (A0(0, 1) * q1 + A0(0, 2) * q2);
  double quad = A0(0, 0);
  Vec3 base(0.0, q1, q2);
  double d = full.evaluate(base)[0];
  if (std::abs(quad) > 1e-10 * full.coeff_scale() || std::abs(1.0 - c) < 1e-9) return false;
  out = Vec3(d / (1.0 - c), q1, q2);
  return true;
}

// Positive definite conserved quadratic assembled from the first-integral
// span of the flow; nullopt when the span has none.
std::optional<DefiniteWitness> conserved_definite_form(const QuadraticField& F, unsigned seed) {
  auto basis = quadratic_first_integrals(F);
  std::vector<Mat3> span;
  span.reserve(basis.forms.size());
  for (const auto& f : basis.forms) span.push_back(f.m);
  return definite_combination(span, 3, seed);
}

bool is_first_integral(const QuadraticField& F, const Mat3& Q) {
  auto basis = quadratic_first_integrals(F);
  return membership_residual(basis, QuadraticForm3(Q, FormSpace::Dual)) <= 1e-7;
}

CompletenessReport structural_branch(const LieAlgebra3& alg, const QuadraticForm3& metric,
                                     const Classification& cls, const QuadraticField& Fd,
                                     const DecideOptions& opts) {
  CompletenessReport rep;
  rep.classification = cls;
  rep.verdict = Verdict::Complete;
  rep.reason = Reason::StructuralComplete;
  rep.idempotents = find_idempotents(Fd, opts.search);
  if (!rep.idempotents.empty())
    throw Error(ErrorCode::InternalInconsistency,
                "found an escape idempotent on an algebra type that forces completeness");

  if (cls.type == AlgebraType::Abelian || cls.type == AlgebraType::Heisenberg) {
    auto aq = is_affine_quadratic(Fd);
    if (!aq)
      throw Error(ErrorCode::InternalInconsistency,
                  "nilpotent momentum flow did not split into an affine system");
    rep.linearizable = aq;
    rep.detail = cls.type == AlgebraType::Abelian
                     ? "abelian algebra: the momentum flow vanishes or is affine, so no orbit "
                       "escapes in finite time"
                     : "two-step nilpotent algebra: the central momentum is conserved and the "
                       "remaining flow is affine in split coordinates";
    return rep;
  }

  // Unimodular non-nilpotent types: look for a definite conserved quadratic.
  if (auto dw = conserved_definite_form(Fd, opts.seed)) {
    rep.definite_integral = dw->form;
    rep.detail = cls.type == AlgebraType::SU2
                     ? "compact type: the quadratic Casimir is definite, so momenta stay on "
                       "bounded level sets"
                     : "unimodular euclidean type: a definite combination of conserved "
                       "quadratics bounds every orbit";
    return rep;
  }

  if (cls.type != AlgebraType::E2)
    throw Error(ErrorCode::InternalInconsistency,
                "expected a definite conserved quadratic on the compact type");

  // Euclidean type with the metric degenerate on the derived algebra: the
  // derived momenta close into a planar system with an elliptic factor.
  const MilnorData& mil = *cls.milnor;
  double s = std::sqrt(mil.alphas[0] * mil.alphas[1]);
  Mat3 G;
  G.col(0) = mil.frame.col(2) / s;
  G.col(1) = mil.frame.col(0);
  G.col(2) = mil.frame.col(1) * std::sqrt(mil.alphas[1] / mil.alphas[0]);
  LieAlgebra3 adapted = alg.change_basis(G);
  QuadraticForm3 am(G.transpose() * metric.m * G, FormSpace::Algebra);
  QuadraticField Fa = euler_field_dual(adapted, am);
  auto sub = Fa.closed_planar_subsystem(1, 2, 1e-6);
  if (!sub)
    throw Error(ErrorCode::InternalInconsistency,
                "derived momenta of the euclidean type did not close into a subsystem");
  PlanarVerdict pv = planar_completeness(*sub);
  rep.planar = pv;
  if (pv.status != PlanarStatus::Complete)
    throw Error(ErrorCode::InternalInconsistency,
                "planar subsystem of the euclidean type classified as escaping");
  rep.detail =
      "unimodular euclidean type: the derived momenta close into a planar system whose "
      "factored linear part has negative discriminant";
  return rep;
}

}  // namespace

CompletenessReport solvable_e11_criterion(const LieAlgebra3& alg, const QuadraticForm3& metric,
                                          const DecideOptions& opts) {
  require_nondegenerate(metric);
  Classification cls = classify(alg);
  if (cls.type != AlgebraType::E11)
    throw Error(ErrorCode::NotE11, "criterion needs the solvable type with real eigenvalues");

  const MilnorData& mil = *cls.milnor;
  double a = mil.alphas[0];
  double b = -mil.alphas[1];
  double s = std::sqrt(a * b);
  Mat3 G;
  G.col(0) = mil.frame.col(2) / s;
  G.col(1) = mil.frame.col(0) - (s / a) * mil.frame.col(1);
  G.col(2) = mil.frame.col(0) + (s / a) * mil.frame.col(1);
  LieAlgebra3 adapted = alg.change_basis(G);
  {
    LieAlgebra3 target = standard_algebra(AlgebraType::E11);
    double res = 0.0;
    for (int k = 0; k < 3; ++k)
      res = std::max(res,
                     (adapted.structure_constants()[k] - target.structure_constants()[k])
                         .cwiseAbs()
                         .maxCoeff());
    if (res > 1e-8)
      throw Error(ErrorCode::InternalInconsistency, "adapted basis missed the split solvable form");
  }

  CompletenessReport rep;
  rep.classification = cls;
  QuadraticField Fd = euler_field_dual(alg, metric);
  rep.idempotents = find_idempotents(Fd, opts.search);

  Mat3 S1 = G.transpose() * metric.m * G;
  Mat3 W1 = QuadraticForm3(S1, FormSpace::Algebra).m.inverse();
  double wscale = W1.cwiseAbs().maxCoeff();

  if (std::abs(W1(0, 0)) <= opts.crit_tol * wscale) {
    // Metric degenerate on the derived algebra: the derived momenta close
    // into a planar subsystem that always escapes here.
    QuadraticField Fa = euler_field_dual(adapted, QuadraticForm3(S1, FormSpace::Algebra));
    auto sub = Fa.closed_planar_subsystem(1, 2, 1e-6);
    if (!sub)
      throw Error(ErrorCode::InternalInconsistency,
                  "degenerate restriction did not close the derived momenta");
    PlanarVerdict pv = planar_completeness(*sub);
    rep.planar = pv;
    if (pv.status != PlanarStatus::Incomplete)
      throw Error(ErrorCode::InternalInconsistency,
                  "degenerate-restriction subsystem classified as complete");
    rep.verdict = Verdict::Incomplete;
    rep.reason = Reason::IdempotentWitness;
    rep.detail =
        "metric degenerate on the derived algebra: the derived momenta close into a planar "
        "system with an escaping ray";
    if (rep.idempotents.empty() && pv.witness) {
      // The planar escape lifts to a full idempotent when the first
      // component's affine equation is regular.
      for (const auto& pi : find_idempotents(*sub)) {
        Vec3 lifted;
        if (lift_planar_idempotent(Fa, Vec3(pi.point[0], pi.point[1], 0.0), lifted)) {
          Vec3 xi = G.transpose().fullPivLu().solve(lifted);
          double res = 0.0;
          Vec3 X = xi;
          if (polish_idempotent(Fd, X, res)) {
            rep.idempotents.push_back({X, res});
            break;
          }
        }
      }
    }
    set_witness(rep);
    return rep;
  }

  // Nondegenerate restriction: orthogonalize the complement direction.
  Mat2 Sdd = S1.bottomRightCorner<2, 2>();
  Vec2 sc(S1(1, 0), S1(2, 0));
  Vec2 p = Sdd.fullPivLu().solve(sc);
  Mat3 G2 = Mat3::Identity();
  G2(1, 0) = -p[0];
  G2(2, 0) = -p[1];
  Mat3 Gt = G * G2;
  Mat3 S2 = Gt.transpose() * metric.m * Gt;
  double lambda = 1.0 / S2(0, 0);
  Mat2 Wdd = Sdd.inverse();
  double mu = Wdd(0, 0), nu = Wdd(1, 1);

  double pscale = std::max(1.0, std::max({std::abs(lambda), std::abs(mu), std::abs(nu)}));
  double tolp = opts.crit_tol * pscale * pscale;
  double pm = lambda * mu, pn = lambda * nu;
  rep.criterion_value = std::min(pm, pn);

  if (pm > tolp && pn > tolp) {
    // lambda, mu, nu share a sign: a definite conserved quadratic exists.
    Mat3 D = Mat3::Zero();
    D(0, 0) = lambda;
    D(1, 1) = mu;
    D(2, 2) = nu;
    if (lambda < 0) D = -D;
    Mat3 Q = Gt * D * Gt.transpose();
    if (!is_first_integral(Fd, Q))
      throw Error(ErrorCode::InternalInconsistency,
                  "adapted definite quadratic failed the conservation check");
    rep.verdict = Verdict::Complete;
    rep.reason = Reason::DefiniteIntegral;
    rep.definite_integral = Q;
    rep.detail =
        "split solvable type: the adapted inverse metric is definite after removing the "
        "conserved cross term, bounding every orbit";
    if (!rep.idempotents.empty())
      throw Error(ErrorCode::InternalInconsistency,
                  "definite conserved quadratic coexists with an escape idempotent");
  } else if (pm < -tolp || pn < -tolp) {
    rep.verdict = Verdict::Incomplete;
    rep.reason = Reason::IdempotentWitness;
    rep.detail =
        "split solvable type: an invariant momentum plane carries a strict idempotent ray";
    // Closed-form witness in the adapted momenta, mapped back and polished.
    Vec3 eta = pm < -tolp ? Vec3(1.0 / lambda, std::sqrt(-1.0 / pm), 0.0)
                          : Vec3(-1.0 / lambda, 0.0, std::sqrt(-1.0 / pn));
    Vec3 xi = Gt.transpose().fullPivLu().solve(eta);
    double res = 0.0;
    Vec3 X = xi;
    if (polish_idempotent(Fd, X, res)) {
      bool dup = false;
      for (const auto& e : rep.idempotents)
        if ((X - e.point).norm() <= 1e-7 * (1.0 + X.norm())) dup = true;
      if (!dup) rep.idempotents.push_back({X, res});
      std::sort(rep.idempotents.begin(), rep.idempotents.end(),
                [](const Idempotent& l, const Idempotent& r) {
                  return std::lexicographical_compare(l.point.data(), l.point.data() + 3,
                                                      r.point.data(), r.point.data() + 3);
                });
    }
    if (rep.idempotents.empty())
      throw Error(ErrorCode::InternalInconsistency,
                  "negative product case must produce an idempotent witness");
    set_witness(rep);
  } else {
    rep.verdict = Verdict::Undecided;
    rep.reason = Reason::BoundaryCase;
    rep.detail =
        "split solvable type: a diagonal product of the adapted inverse metric sits inside "
        "the tolerance band, so the sign test is inconclusive";
  }
  return rep;
}

CompletenessReport sl2_criterion(const LieAlgebra3& alg, const QuadraticForm3& metric,
                                 const DecideOptions& opts) {
  require_nondegenerate(metric);
  Classification cls = classify(alg);
  if (cls.type != AlgebraType::SL2R)
    throw Error(ErrorCode::NotSL2R, "criterion needs the simple noncompact type");

  MetricOperatorU U = u_from_metric(alg, metric, opts.eig_tol);
  QuadraticField Fd = euler_field_dual(alg, metric);

  CompletenessReport rep;
  rep.classification = cls;
  rep.shape = U.shape;
  rep.idempotents = find_idempotents(Fd, opts.search);

  auto guard_complete = [&]() {
    if (!rep.idempotents.empty())
      throw Error(ErrorCode::InternalInconsistency,
                  "spectral test says complete but an escape idempotent exists");
  };
  auto require_witness = [&]() {
    if (rep.idempotents.empty())
      throw Error(ErrorCode::InternalInconsistency,
                  "spectral test says incomplete but no idempotent was found");
    set_witness(rep);
  };

  switch (U.shape) {
    case SpectralShape::TripleDegenerate:
    case SpectralShape::DegreeLE2:
    case SpectralShape::OneDoubleOneSimple_Diagonalizable: {
      auto aq = is_affine_quadratic(Fd);
      if (!aq)
        throw Error(ErrorCode::InternalInconsistency,
                    "operator with minimal degree <= 2 must linearize the momentum flow");
      rep.verdict = Verdict::Complete;
      rep.reason = Reason::Linearizable;
      rep.linearizable = aq;
      rep.detail =
          "metric operator satisfies a degree <= 2 polynomial: the momentum flow is affine "
          "in split coordinates";
      guard_complete();
      break;
    }
    case SpectralShape::ThreeDistinct: {
      int neg = -1;
      int negatives = 0;
      for (int i = 0; i < 3; ++i) {
        double kv = U.killing(U.eigenvectors[i]);
        if (kv < 0) {
          neg = i;
          ++negatives;
        }
      }
      if (negatives != 1)
        throw Error(ErrorCode::InternalInconsistency,
                    "eigenbasis must contain exactly one timelike direction");
      double a3 = U.real_eigenvalues[neg];
      double a1 = U.real_eigenvalues[(neg + 1) % 3];
      double a2 = U.real_eigenvalues[(neg + 2) % 3];
      double value = (1.0 / a3 - 1.0 / a2) * (1.0 / a3 - 1.0 / a1);
      double sc = std::abs(1.0 / a1) + std::abs(1.0 / a2) + std::abs(1.0 / a3);
      double tolv = opts.crit_tol * std::max(1.0, sc * sc);
      rep.criterion_value = value;
      if (value > tolv) {
        auto dw = conserved_definite_form(Fd, opts.seed);
        if (!dw)
          throw Error(ErrorCode::InternalInconsistency,
                      "positive spectral gap product must yield a definite conserved quadratic");
        rep.verdict = Verdict::Complete;
        rep.reason = Reason::SpectralCriterion;
        rep.definite_integral = dw->form;
        rep.detail =
            "three distinct eigenvalues with the timelike one outside the reciprocal gap: a "
            "definite conserved quadratic bounds the orbits";
        guard_complete();
      } else if (value < -tolv) {
        rep.verdict = Verdict::Incomplete;
        rep.reason = Reason::IdempotentWitness;
        rep.detail =
            "three distinct eigenvalues with the timelike one inside the reciprocal gap: an "
            "idempotent ray escapes in finite time";
        require_witness();
      } else {
        rep.verdict = Verdict::Undecided;
        rep.reason = Reason::BoundaryCase;
        rep.detail = "reciprocal gap product sits inside the tolerance band";
      }
      break;
    }
    case SpectralShape::OneDoubleOneSimple_Cyclic: {
      int dbl = U.multiplicities[0] == 2 ? 0 : 1;
      int simple = 1 - dbl;
      double a2 = U.real_eigenvalues[dbl];
      double a1 = U.real_eigenvalues[simple];
      Vec3 E2 = U.eigenvectors[dbl];
      double kscale = U.killing.m.cwiseAbs().maxCoeff();
      if (std::abs(U.killing(E2)) > 1e-6 * kscale)
        throw Error(ErrorCode::InternalInconsistency,
                    "double eigenvector of a cyclic block must be null");
      Mat3 N = U.matrix - a2 * Mat3::Identity();
      Eigen::JacobiSVD<Mat3> svd(N * N, Eigen::ComputeFullV);
      Vec3 cand[2] = {svd.matrixV().col(2), svd.matrixV().col(1)};
      Vec3 w = std::abs(U.killing.bilinear(E2, cand[0])) >=
                       std::abs(U.killing.bilinear(E2, cand[1]))
                   ? cand[0]
                   : cand[1];
      double pair = U.killing.bilinear(E2, w);
      if (std::abs(pair) <= 1e-9 * kscale)
        throw Error(ErrorCode::InternalInconsistency,
                    "cyclic vector does not pair with the null eigenvector");
      w /= pair;
      Vec3 E3 = w - 0.5 * U.killing(w) * E2;
      double gamma = metric(E3);
      double value = gamma * (1.0 / a2 - 1.0 / a1);
      double tolv = opts.crit_tol *
                    std::max(1.0, std::abs(gamma) * (std::abs(1.0 / a1) + std::abs(1.0 / a2)));
      rep.criterion_value = value;
      if (value > tolv) {
        rep.verdict = Verdict::Complete;
        rep.reason = Reason::SpectralCriterion;
        rep.detail =
            "cyclic double eigenvalue: the paired null direction has the metric sign that "
            "confines the orbits";
        guard_complete();
      } else if (value < -tolv) {
        rep.verdict = Verdict::Incomplete;
        rep.reason = Reason::IdempotentWitness;
        rep.detail =
            "cyclic double eigenvalue: the paired null direction has the escaping metric sign";
        require_witness();
      } else {
        rep.verdict = Verdict::Undecided;
        rep.reason = Reason::BoundaryCase;
        rep.detail = "cyclic pairing value sits inside the tolerance band";
      }
      break;
    }
    case SpectralShape::SingleEigendirection: {
      rep.verdict = Verdict::Incomplete;
      rep.reason = Reason::IdempotentWitness;
      rep.detail =
          "metric operator has a single real eigendirection: the momentum flow carries an "
          "escaping idempotent ray";
      require_witness();
      break;
    }
  }
  return rep;
}

std::optional<Idempotent> idempotent_incompleteness(const QuadraticField& field,
                                                    const DirectionSearchOptions& opts) {
  auto ids = find_idempotents(field, opts);
  if (ids.empty()) return std::nullopt;
  return ids.front();
}

CompletenessReport decide(const LieAlgebra3& alg, const QuadraticForm3& metric,
                          const DecideOptions& opts) {
  require_nondegenerate(metric);
  Classification cls = classify(alg);
  switch (cls.type) {
    case AlgebraType::Abelian:
    case AlgebraType::Heisenberg:
    case AlgebraType::SU2:
    case AlgebraType::E2: {
      QuadraticField Fd = euler_field_dual(alg, metric);
      return structural_branch(alg, metric, cls, Fd, opts);
    }
    case AlgebraType::E11:
      return solvable_e11_criterion(alg, metric, opts);
    case AlgebraType::SL2R:
      return sl2_criterion(alg, metric, opts);
    case AlgebraType::NonUnimodular: {
      CompletenessReport rep;
      rep.classification = cls;
      QuadraticField Fd = euler_field_dual(alg, metric);
      rep.idempotents = find_idempotents(Fd, opts.search);
      if (!rep.idempotents.empty()) {
        rep.verdict = Verdict::Incomplete;
        rep.reason = Reason::IdempotentWitness;
        rep.detail = "strict idempotent of the momentum flow: its ray escapes in finite time";
        set_witness(rep);
      } else if (auto dw = conserved_definite_form(Fd, opts.seed)) {
        rep.verdict = Verdict::Complete;
        rep.reason = Reason::DefiniteIntegral;
        rep.definite_integral = dw->form;
        rep.detail =
            "a positive definite conserved quadratic bounds every momentum orbit, so no "
            "geodesic escapes in finite time";
      } else {
        rep.verdict = Verdict::Undecided;
        rep.reason = Reason::NecessaryOnly;
        rep.detail =
            "no strict idempotent found; the idempotent test is necessary but not sufficient "
            "for this type, so the flow stays undecided";
      }
      return rep;
    }
  }
  throw Error(ErrorCode::InternalInconsistency, "unhandled algebra type");
}

}  // namespace geocomplete
