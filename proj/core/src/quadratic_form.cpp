#include "geocomplete/quadratic_form.hpp"

#include <cmath>

namespace geocomplete {

QuadraticForm3::QuadraticForm3(const Mat3& mat, FormSpace s) : space(s) {
  const double scale = std::max(1.0, mat.cwiseAbs().maxCoeff());
  if ((mat - mat.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw Error(ErrorCode::InvariantViolation, "form matrix is not symmetric");
  m = 0.5 * (mat + mat.transpose());  // absorb roundoff from conjugations
}

QuadraticForm3 QuadraticForm3::change_basis(const Mat3& B) const {
  if (space == FormSpace::Algebra) return QuadraticForm3(B.transpose() * m * B, space);
  // Covectors transform by B^{-T}: xi' = B^T xi, so the dual form matrix
  // becomes B^{-1} m B^{-T}.
  Eigen::FullPivLU<Mat3> lu(B);
  if (!lu.isInvertible()) throw Error(ErrorCode::BadParams, "change_basis: singular matrix");
  Mat3 Bi = lu.inverse();
  return QuadraticForm3(Bi * m * Bi.transpose(), space);
}

Signature signature(const QuadraticForm3& q, double sig_tol) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(q.m, Eigen::EigenvaluesOnly);
  Vec3 ev = es.eigenvalues();
  double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  Signature s{0, 0, 0};
  for (int i = 0; i < 3; ++i) {
    if (std::abs(ev[i]) <= sig_tol * scale) ++s.zero;
    else if (ev[i] > 0) ++s.positive;
    else ++s.negative;
  }
  return s;
}

Mat3 inverse_form_matrix(const QuadraticForm3& metric) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(metric.m);
  Vec3 ev = es.eigenvalues();
  double scale = ev.cwiseAbs().maxCoeff();
  if (scale == 0.0 || ev.cwiseAbs().minCoeff() <= 1e-12 * scale)
    throw Error(ErrorCode::DegenerateMetric, "form is singular; cannot invert");
  return es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

Vec3 musical_flat(const QuadraticForm3& metric, const Vec3& x) { return metric.m * x; }

Vec3 musical_sharp(const QuadraticForm3& metric, const Vec3& xi) {
  return inverse_form_matrix(metric) * xi;
}

QuadraticForm3 killing_form(const LieAlgebra3& alg) {
  Mat3 K;
  Mat3 ads[3];
  for (int i = 0; i < 3; ++i) ads[i] = alg.ad(Vec3::Unit(i));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) K(i, j) = (ads[i] * ads[j]).trace();
  return QuadraticForm3(K, FormSpace::Algebra);
}

QuadraticForm3 normalized_killing(const LieAlgebra3& alg) {
  QuadraticForm3 k = killing_form(alg);
  return QuadraticForm3(0.5 * k.m, FormSpace::Algebra);
}

Mat2 restrict_form(const QuadraticForm3& q, const Vec3& v1, const Vec3& v2, double tol) {
  double n1 = v1.norm(), n2 = v2.norm();
  if (n1 == 0.0 || n2 == 0.0 || v1.cross(v2).norm() <= tol * n1 * n2)
    throw Error(ErrorCode::DependentSpan, "restrict_form: vectors are linearly dependent");
  Mat2 g;
  g(0, 0) = q.bilinear(v1, v1);
  g(0, 1) = g(1, 0) = q.bilinear(v1, v2);
  g(1, 1) = q.bilinear(v2, v2);
  return g;
}

}  // namespace geocomplete
