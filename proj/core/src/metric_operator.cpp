#include "geocomplete/metric_operator.hpp"

#include <algorithm>
#include <cmath>

namespace geocomplete {

const char* spectral_shape_name(SpectralShape s) {
  switch (s) {
    case SpectralShape::TripleDegenerate: return "TripleDegenerate";
    case SpectralShape::DegreeLE2: return "DegreeLE2";
    case SpectralShape::OneDoubleOneSimple_Diagonalizable:
      return "OneDoubleOneSimple_Diagonalizable";
    case SpectralShape::OneDoubleOneSimple_Cyclic: return "OneDoubleOneSimple_Cyclic";
    case SpectralShape::ThreeDistinct: return "ThreeDistinct";
    case SpectralShape::SingleEigendirection: return "SingleEigendirection";
  }
  return "Unknown";
}

namespace {

Vec3 unit_kernel_vector(const Mat3& M, double tol_abs) {
  Eigen::JacobiSVD<Mat3> svd(M, Eigen::ComputeFullV);
  if (svd.singularValues()[2] > tol_abs)
    throw Error(ErrorCode::InternalInconsistency, "expected a kernel vector, smallest sv too large");
  Vec3 v = svd.matrixV().col(2);
  for (int i = 0; i < 3; ++i) {
    if (std::abs(v[i]) > 1e-8) {
      if (v[i] < 0) v = -v;
      break;
    }
  }
  return v;
}

int rank_with_tol(const Mat3& M, double tol_abs) {
  Eigen::JacobiSVD<Mat3> svd(M);
  int r = 0;
  for (int i = 0; i < 3; ++i)
    if (svd.singularValues()[i] > tol_abs) ++r;
  return r;
}

}  // namespace

MetricOperatorU u_from_metric(const LieAlgebra3& alg, const QuadraticForm3& metric,
                              double eig_tol) {
  QuadraticForm3 k = normalized_killing(alg);
  {
    Eigen::SelfAdjointEigenSolver<Mat3> es(k.m, Eigen::EigenvaluesOnly);
    double kmax = es.eigenvalues().cwiseAbs().maxCoeff();
    if (kmax == 0.0 || es.eigenvalues().cwiseAbs().minCoeff() <= 1e-10 * kmax)
      throw Error(ErrorCode::DegenerateKilling, "Killing form is degenerate");
  }
  Mat3 Kinv = inverse_form_matrix(k);
  {
    Eigen::SelfAdjointEigenSolver<Mat3> es(metric.m, Eigen::EigenvaluesOnly);
    double smax = es.eigenvalues().cwiseAbs().maxCoeff();
    if (smax == 0.0 || es.eigenvalues().cwiseAbs().minCoeff() <= 1e-12 * smax)
      throw Error(ErrorCode::DegenerateMetric, "metric is degenerate");
  }

  MetricOperatorU u;
  u.matrix = Kinv * metric.m;
  u.killing = k;
  u.metric = metric;

  Eigen::EigenSolver<Mat3> es(u.matrix);
  Eigen::Vector3cd ev = es.eigenvalues();
  double scale = 0.0;
  for (int i = 0; i < 3; ++i) scale = std::max(scale, std::abs(ev[i]));
  scale = std::max(1.0, scale);
  double band = eig_tol * scale;

  // Complex pair? Imaginary parts inside the undecidable band are ambiguous.
  int complex_count = 0;
  for (int i = 0; i < 3; ++i) {
    double im = std::abs(ev[i].imag());
    if (im > band) ++complex_count;
    else if (im > 0.1 * band)
      throw Error(ErrorCode::AmbiguousSpectrum, "imaginary part at the clustering tolerance");
  }

  double rank_tol = 10.0 * band;
  if (complex_count > 0) {
    u.has_complex_pair = true;
    int real_idx = 0;
    for (int i = 0; i < 3; ++i)
      if (std::abs(ev[i].imag()) <= band) real_idx = i;
      else u.complex_eigenvalue = ev[i];
    double lam = ev[real_idx].real();
    u.shape = SpectralShape::SingleEigendirection;
    u.real_eigenvalues = {lam};
    u.multiplicities = {1};
    u.eigenvectors = {unit_kernel_vector(u.matrix - lam * Mat3::Identity(), rank_tol)};
    return u;
  }

  std::array<double, 3> lam{ev[0].real(), ev[1].real(), ev[2].real()};
  std::sort(lam.begin(), lam.end());
  // Cluster neighbours closer than the band; a gap just above it is unstable.
  auto gap_ambiguous = [&](double g) { return g > band && g < 10.0 * band; };
  bool eq01 = lam[1] - lam[0] <= band;
  bool eq12 = lam[2] - lam[1] <= band;
  if (gap_ambiguous(lam[1] - lam[0]) || gap_ambiguous(lam[2] - lam[1]) ||
      (eq01 && eq12 && lam[2] - lam[0] > band))
    throw Error(ErrorCode::AmbiguousSpectrum, "eigenvalue gap at the clustering tolerance");

  auto eigvec = [&](double l) {
    return unit_kernel_vector(u.matrix - l * Mat3::Identity(), 1e-6 * scale);
  };

  if (eq01 && eq12) {
    double a = (lam[0] + lam[1] + lam[2]) / 3.0;
    u.real_eigenvalues = {a};
    u.multiplicities = {3};
    int geo = 3 - rank_with_tol(u.matrix - a * Mat3::Identity(), rank_tol);
    if (geo == 3) u.shape = SpectralShape::TripleDegenerate;
    else if (geo == 2) u.shape = SpectralShape::DegreeLE2;
    else u.shape = SpectralShape::SingleEigendirection;
    u.eigenvectors = {eigvec(a)};
  } else if (eq01 || eq12) {
    double dbl = eq01 ? 0.5 * (lam[0] + lam[1]) : 0.5 * (lam[1] + lam[2]);
    double simple = eq01 ? lam[2] : lam[0];
    u.real_eigenvalues = {std::min(dbl, simple), std::max(dbl, simple)};
    u.multiplicities = {u.real_eigenvalues[0] == simple ? 1 : 2,
                        u.real_eigenvalues[1] == simple ? 1 : 2};
    int geo = 3 - rank_with_tol(u.matrix - dbl * Mat3::Identity(), rank_tol);
    u.shape = geo >= 2 ? SpectralShape::OneDoubleOneSimple_Diagonalizable
                       : SpectralShape::OneDoubleOneSimple_Cyclic;
    u.eigenvectors = {eigvec(u.real_eigenvalues[0]), eigvec(u.real_eigenvalues[1])};
  } else {
    u.shape = SpectralShape::ThreeDistinct;
    u.real_eigenvalues = {lam[0], lam[1], lam[2]};
    u.multiplicities = {1, 1, 1};
    u.eigenvectors = {eigvec(lam[0]), eigvec(lam[1]), eigvec(lam[2])};
  }
  return u;
}

}  // namespace geocomplete
