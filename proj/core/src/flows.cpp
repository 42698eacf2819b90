#include "geocomplete/flows.hpp"

#include <cmath>

#include <Eigen/LU>
#include <Eigen/SVD>

namespace geocomplete {

namespace {

Eigen::FullPivLU<Mat3> metric_solver(const QuadraticForm3& metric) {
  Eigen::JacobiSVD<Mat3> svd(metric.m);
  double smin = svd.singularValues()[2];
  double smax = svd.singularValues()[0];
  if (smin <= 0.0 || smax / smin > 1e12)
    throw Error(ErrorCode::IllConditionedMetric, "metric condition number exceeds 1e12");
  return Eigen::FullPivLU<Mat3>(metric.m);
}

Vec3 connection_rhs(const LieAlgebra3& alg, const QuadraticForm3& metric, const Vec3& x,
                    const Vec3& y) {
  Vec3 rhs;
  Vec3 bxy = alg.bracket(x, y);
  for (int k = 0; k < 3; ++k) {
    Vec3 ek = Vec3::Unit(k);
    rhs[k] = 0.5 * (metric.bilinear(bxy, ek) - metric.bilinear(alg.bracket(y, ek), x) +
                    metric.bilinear(alg.bracket(ek, x), y));
  }
  return rhs;
}

}  // namespace

Vec3 connection_product(const LieAlgebra3& alg, const QuadraticForm3& metric, const Vec3& x,
                        const Vec3& y) {
  auto lu = metric_solver(metric);
  return lu.solve(connection_rhs(alg, metric, x, y));
}

QuadraticField euler_field_algebra(const LieAlgebra3& alg, const QuadraticForm3& metric) {
  auto lu = metric_solver(metric);
  std::array<Mat3, 3> A{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) {
      Vec3 prod = lu.solve(connection_rhs(alg, metric, Vec3::Unit(p), Vec3::Unit(q)));
      for (int i = 0; i < 3; ++i) A[i](p, q) = -prod[i];
    }
  return QuadraticField(3, A);
}

QuadraticField euler_field_dual(const LieAlgebra3& alg, const QuadraticForm3& metric) {
  auto lu = metric_solver(metric);
  Mat3 Sinv = lu.inverse();
  const auto& c = alg.structure_constants();
  std::array<Mat3, 3> A{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
  // xi_j' = sum_{k,i} c^k_{ij} x_i xi_k with x = S^{-1} xi.
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i) {
        double cc = c[k](i, j);
        if (cc == 0.0) continue;
        for (int a = 0; a < 3; ++a) A[j](a, k) += cc * Sinv(i, a);
      }
  return QuadraticField(3, A);
}

QuadraticField lax_field(const LieAlgebra3& alg, const MetricOperatorU& u) {
  Eigen::FullPivLU<Mat3> lu(u.matrix);
  if (!lu.isInvertible())
    throw Error(ErrorCode::DegenerateMetric, "metric operator is not invertible");
  Mat3 Uinv = lu.inverse();
  std::array<Mat3, 3> A{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) {
      Vec3 b = alg.bracket(Vec3::Unit(p), Uinv * Vec3::Unit(q));
      for (int i = 0; i < 3; ++i) A[i](p, q) = b[i];
    }
  return QuadraticField(3, A);
}

QuadraticForm3 dual_energy(const QuadraticForm3& metric) {
  return QuadraticForm3(inverse_form_matrix(metric), FormSpace::Dual);
}

bool is_bi_invariant(const LieAlgebra3& alg, const QuadraticForm3& metric, double tol) {
  double scale = std::max(1.0, metric.m.cwiseAbs().maxCoeff());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        Vec3 ei = Vec3::Unit(i), ej = Vec3::Unit(j), ek = Vec3::Unit(k);
        double v = metric.bilinear(alg.bracket(ei, ej), ek) +
                   metric.bilinear(ej, alg.bracket(ei, ek));
        if (std::abs(v) > tol * scale) return false;
      }
  return true;
}

}  // namespace geocomplete
