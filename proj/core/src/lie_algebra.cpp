#include "geocomplete/lie_algebra.hpp"

#include <cmath>

namespace geocomplete {

LieAlgebra3::LieAlgebra3() {
  for (auto& m : c_) m.setZero();
}

LieAlgebra3::LieAlgebra3(const std::array<Mat3, 3>& c, double jacobi_tol) {
  double scale = 0.0;
  for (const auto& m : c) scale = std::max(scale, m.cwiseAbs().maxCoeff());
  double asym = 0.0;
  for (int k = 0; k < 3; ++k) {
    Mat3 a = 0.5 * (c[k] - c[k].transpose());
    asym = std::max(asym, (c[k] - a).cwiseAbs().maxCoeff());
    c_[k] = a;
  }
  if (asym > 1e-12 * std::max(1.0, scale))
    throw Error(ErrorCode::InvariantViolation, "structure constants not antisymmetric in (i,j)");
  double jr = jacobi_residual();
  if (jr > jacobi_tol * std::max(1.0, scale * scale))
    throw Error(ErrorCode::InvariantViolation,
                "Jacobi identity fails: residual " + std::to_string(jr));
}

Vec3 LieAlgebra3::bracket(const Vec3& x, const Vec3& y) const {
  Vec3 r;
  for (int k = 0; k < 3; ++k) r[k] = x.dot(c_[k] * y);
  return r;
}

Mat3 LieAlgebra3::ad(const Vec3& x) const {
  Mat3 m;
  for (int k = 0; k < 3; ++k) m.row(k) = x.transpose() * c_[k];
  return m;
}

Vec3 LieAlgebra3::trace_vector() const {
  Vec3 t;
  for (int i = 0; i < 3; ++i) t[i] = ad(Vec3::Unit(i)).trace();
  return t;
}

bool LieAlgebra3::is_unimodular(double tol) const {
  double scale = 0.0;
  for (const auto& m : c_) scale = std::max(scale, m.cwiseAbs().maxCoeff());
  return trace_vector().cwiseAbs().maxCoeff() <= tol * std::max(1.0, scale);
}

LieAlgebra3 LieAlgebra3::change_basis(const Mat3& B) const {
  Eigen::FullPivLU<Mat3> lu(B);
  if (!lu.isInvertible())
    throw Error(ErrorCode::BadParams, "change_basis: singular matrix");
  Mat3 Binv = lu.inverse();
  // [f_i, f_j] = sum_{a,b} B_ai B_bj [e_a, e_b]; re-express in the f-basis.
  std::array<Mat3, 3> nc;
  for (int k = 0; k < 3; ++k) nc[k].setZero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Vec3 br = bracket(B.col(i), B.col(j));
      Vec3 coeffs = Binv * br;
      for (int k = 0; k < 3; ++k) nc[k](i, j) = coeffs[k];
    }
  return LieAlgebra3(nc, 1e-6);  // loose: numerically conjugated tables carry roundoff
}

double LieAlgebra3::jacobi_residual() const {
  double r = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      for (int k = j + 1; k < 3; ++k) {
        Vec3 ei = Vec3::Unit(i), ej = Vec3::Unit(j), ek = Vec3::Unit(k);
        Vec3 s = bracket(bracket(ei, ej), ek) + bracket(bracket(ej, ek), ei) +
                 bracket(bracket(ek, ei), ej);
        r = std::max(r, s.cwiseAbs().maxCoeff());
      }
  return r;
}

Eigen::Matrix<double, 3, Eigen::Dynamic> LieAlgebra3::derived_algebra(double tol) const {
  Mat3 gen;
  gen.col(0) = bracket(Vec3::Unit(0), Vec3::Unit(1));
  gen.col(1) = bracket(Vec3::Unit(0), Vec3::Unit(2));
  gen.col(2) = bracket(Vec3::Unit(1), Vec3::Unit(2));
  Eigen::JacobiSVD<Mat3> svd(gen, Eigen::ComputeFullU);
  double smax = svd.singularValues()[0];
  int rank = 0;
  for (int i = 0; i < 3; ++i)
    if (svd.singularValues()[i] > tol * std::max(1.0, smax)) ++rank;
  return svd.matrixU().leftCols(rank);
}

const char* algebra_type_name(AlgebraType t) {
  switch (t) {
    case AlgebraType::Abelian: return "Abelian";
    case AlgebraType::Heisenberg: return "Heisenberg";
    case AlgebraType::SU2: return "SU2";
    case AlgebraType::E2: return "E2";
    case AlgebraType::E11: return "E11";
    case AlgebraType::SL2R: return "SL2R";
    case AlgebraType::NonUnimodular: return "NonUnimodular";
  }
  return "Unknown";
}

namespace {

int sign_of(double a, double zero_tol) {
  if (std::abs(a) <= zero_tol) return 0;
  return a > 0 ? 1 : -1;
}

// Canonical presentation order: pluses, then minuses, then zeros.
int sign_rank(int s) { return s > 0 ? 0 : (s < 0 ? 1 : 2); }

}  // namespace

MilnorData milnor_normal_form(const LieAlgebra3& alg, double tol) {
  // In three dimensions every antisymmetric bilinear bracket factors through
  // the cross product of the input basis: [x,y] = L(x cross y), with
  //   L(e1) = [e2,e3],  L(e2) = [e3,e1],  L(e3) = [e1,e2].
  // L is symmetric exactly when the algebra is unimodular.
  Mat3 L;
  L.col(0) = alg.bracket(Vec3::Unit(1), Vec3::Unit(2));
  L.col(1) = alg.bracket(Vec3::Unit(2), Vec3::Unit(0));
  L.col(2) = alg.bracket(Vec3::Unit(0), Vec3::Unit(1));
  double scale = std::max(1.0, L.cwiseAbs().maxCoeff());
  double asym = (L - L.transpose()).cwiseAbs().maxCoeff();
  if (asym > tol * scale)
    throw Error(ErrorCode::NotUnimodular, "bracket operator is not symmetric (algebra not unimodular)");

  Eigen::SelfAdjointEigenSolver<Mat3> es(0.5 * (L + L.transpose()));
  Vec3 a = es.eigenvalues();
  Mat3 F = es.eigenvectors();

  std::array<int, 3> signs{};
  double zero_tol = tol * scale;
  for (int i = 0; i < 3; ++i) signs[i] = sign_of(a[i], zero_tol);

  // Global flip so pluses dominate. Negating all alphas corresponds to
  // reversing the orientation of the eigenframe, handled below.
  int plus = 0, minus = 0;
  for (int s : signs) { plus += s > 0; minus += s < 0; }
  bool flipped = minus > plus;
  if (flipped) {
    a = -a;
    for (int i = 0; i < 3; ++i) signs[i] = -signs[i];
  }

  // Sort eigenpairs into the canonical sign order; ties by descending alpha.
  std::array<int, 3> idx{0, 1, 2};
  std::sort(idx.begin(), idx.end(), [&](int p, int q) {
    if (sign_rank(signs[p]) != sign_rank(signs[q])) return sign_rank(signs[p]) < sign_rank(signs[q]);
    return a[p] > a[q];
  });
  Vec3 as;
  Mat3 Fs;
  std::array<int, 3> ss{};
  for (int i = 0; i < 3; ++i) {
    as[i] = a[idx[i]];
    Fs.col(i) = F.col(idx[i]);
    ss[i] = signs[idx[i]];
  }
  // [E2,E3] = L(E2 x E3) = det(F) * L(E1), so the frame must be right-handed
  // for the true eigenvalues and left-handed for the flipped ones.
  double want = flipped ? -1.0 : 1.0;
  if (Fs.determinant() * want < 0) Fs.col(2) = -Fs.col(2);

  double residual = 0.0;
  for (int i = 0; i < 3; ++i) {
    int j = (i + 1) % 3, k = (i + 2) % 3;
    Vec3 r = alg.bracket(Fs.col(j), Fs.col(k)) - as[i] * Fs.col(i);
    residual = std::max(residual, r.cwiseAbs().maxCoeff());
  }
  if (residual > 1e-9 * scale)
    throw Error(ErrorCode::InternalInconsistency,
                "eigenframe fails bracket relations: residual " + std::to_string(residual));
  return MilnorData{Fs, as, ss, residual};
}

Classification classify(const LieAlgebra3& alg, double tol) {
  Vec3 tv = alg.trace_vector();
  if (!alg.is_unimodular(tol)) return Classification{AlgebraType::NonUnimodular, std::nullopt, tv};
  MilnorData md = milnor_normal_form(alg, tol);
  int plus = 0, minus = 0, zero = 0;
  for (int s : md.signs) { plus += s > 0; minus += s < 0; zero += s == 0; }
  AlgebraType t;
  if (zero == 3) t = AlgebraType::Abelian;
  else if (plus == 1 && zero == 2) t = AlgebraType::Heisenberg;
  else if (plus == 3) t = AlgebraType::SU2;
  else if (plus == 2 && zero == 1) t = AlgebraType::E2;
  else if (plus == 1 && minus == 1) t = AlgebraType::E11;
  else t = AlgebraType::SL2R;  // (+,+,-)
  return Classification{t, md, tv};
}

namespace {

std::array<Mat3, 3> zero_table() {
  std::array<Mat3, 3> c;
  for (auto& m : c) m.setZero();
  return c;
}

void set_bracket(std::array<Mat3, 3>& c, int i, int j, const Vec3& v) {
  for (int k = 0; k < 3; ++k) {
    c[k](i, j) = v[k];
    c[k](j, i) = -v[k];
  }
}

}  // namespace

LieAlgebra3 standard_algebra(AlgebraType t, std::optional<NonUnimodularParams> params) {
  auto c = zero_table();
  switch (t) {
    case AlgebraType::Abelian:
      break;
    case AlgebraType::Heisenberg:
      set_bracket(c, 1, 2, Vec3::Unit(0));
      break;
    case AlgebraType::SU2:
      set_bracket(c, 1, 2, Vec3::Unit(0));
      set_bracket(c, 2, 0, Vec3::Unit(1));
      set_bracket(c, 0, 1, Vec3::Unit(2));
      break;
    case AlgebraType::E2:
      set_bracket(c, 2, 0, Vec3::Unit(1));
      set_bracket(c, 0, 1, Vec3::Unit(2));
      break;
    case AlgebraType::E11:
      set_bracket(c, 0, 1, Vec3::Unit(1));
      set_bracket(c, 0, 2, -Vec3::Unit(2));
      break;
    case AlgebraType::SL2R:
      set_bracket(c, 0, 1, -Vec3::Unit(2));
      set_bracket(c, 0, 2, -Vec3::Unit(1));
      set_bracket(c, 1, 2, Vec3::Unit(0));
      break;
    case AlgebraType::NonUnimodular: {
      if (!params)
        throw Error(ErrorCode::BadParams, "NonUnimodular table requires (alpha,beta,gamma,delta)");
      auto [al, be, ga, de] = *params;
      if (std::abs(al + de - 2.0) > 1e-12)
        throw Error(ErrorCode::BadParams, "NonUnimodular table requires alpha + delta = 2");
      set_bracket(c, 0, 1, Vec3(0.0, al, be));
      set_bracket(c, 0, 2, Vec3(0.0, ga, de));
      break;
    }
  }
  return LieAlgebra3(c);
}

LieAlgebra3 sl2_hyperbolic_algebra() {
  auto c = zero_table();
  set_bracket(c, 0, 1, Vec3::Unit(1));
  set_bracket(c, 0, 2, -Vec3::Unit(2));
  set_bracket(c, 1, 2, Vec3::Unit(0));
  return LieAlgebra3(c);
}

}  // namespace geocomplete
