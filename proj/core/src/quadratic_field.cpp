#include "geocomplete/quadratic_field.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace geocomplete {

namespace {

// --- polynomial helpers -----------------------------------------------------

// Real roots of c[0] t^3 + c[1] t^2 + c[2] t + c[3], aware of degree drops.
std::vector<double> real_poly_roots(std::array<double, 4> c) {
  double scale = std::max({std::abs(c[0]), std::abs(c[1]), std::abs(c[2]), std::abs(c[3])});
  std::vector<double> roots;
  if (scale == 0.0) return roots;
  int lead = 0;
  while (lead < 3 && std::abs(c[lead]) <= 1e-13 * scale) ++lead;
  int deg = 3 - lead;
  if (deg == 0) return roots;
  if (deg == 1) {
    roots.push_back(-c[3] / c[2]);
  } else if (deg == 2) {
    double a = c[1], b = c[2], cc = c[3];
    double disc = b * b - 4.0 * a * cc;
    double dscale = std::max(b * b, std::abs(4.0 * a * cc));
    if (disc < -1e-14 * dscale) return roots;
    if (disc < 0) disc = 0;
    double sq = std::sqrt(disc);
    // Citardauq for the cancellation-prone root.
    double r1 = (b >= 0) ? (-b - sq) / (2 * a) : (2 * cc) / (-b + sq);
    double r2 = (b >= 0) ? (2 * cc) / (-b - sq) : (-b + sq) / (2 * a);
    roots.push_back(r1);
    roots.push_back(r2);
  } else {
    Mat3 comp = Mat3::Zero();
    comp(0, 1) = 1;
    comp(1, 2) = 1;
    comp(2, 0) = -c[3] / c[0];
    comp(2, 1) = -c[2] / c[0];
    comp(2, 2) = -c[1] / c[0];
    Eigen::EigenSolver<Mat3> es(comp);
    for (int i = 0; i < 3; ++i) {
      std::complex<double> z = es.eigenvalues()[i];
      if (std::abs(z.imag()) <= 1e-8 * std::max(1.0, std::abs(z))) roots.push_back(z.real());
    }
  }
  // A couple of Newton steps sharpen companion/quadratic roots.
  for (double& r : roots) {
    for (int it = 0; it < 2; ++it) {
      double p = ((c[0] * r + c[1]) * r + c[2]) * r + c[3];
      double dp = (3 * c[0] * r + 2 * c[1]) * r + c[2];
      if (std::abs(dp) > 1e-300) r -= p / dp;
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

// Projective root of a binary quadratic, |x|^2 + |y|^2 = 1.
struct ProjRoot {
  std::complex<double> x, y;
};

ProjRoot normalize_root(std::complex<double> x, std::complex<double> y) {
  double n = std::sqrt(std::norm(x) + std::norm(y));
  return {x / n, y / n};
}

// Roots of a x^2 + b xy + c y^2 in P^1(C); empty only for the zero polynomial.
std::vector<ProjRoot> binary_quadratic_roots(double a, double b, double c) {
  double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
  std::vector<ProjRoot> roots;
  if (scale == 0.0) return roots;
  if (std::abs(a) <= 1e-13 * scale) {
    roots.push_back(normalize_root(1.0, 0.0));
    if (std::abs(b) <= 1e-13 * scale)
      roots.push_back(normalize_root(1.0, 0.0));
    else
      roots.push_back(normalize_root(-c / b, 1.0));
    return roots;
  }
  std::complex<double> disc(b * b - 4.0 * a * c, 0.0);
  std::complex<double> sq = std::sqrt(disc);
  roots.push_back(normalize_root((-b + sq) / (2.0 * a), 1.0));
  roots.push_back(normalize_root((-b - sq) / (2.0 * a), 1.0));
  return roots;
}

double chordal_distance(const ProjRoot& r, const ProjRoot& s) {
  return std::abs(r.x * s.y - s.x * r.y);
}

bool projectively_real(const ProjRoot& r, double tol = 1e-7) {
  return std::abs(std::imag(r.x * std::conj(r.y))) <= tol;
}

Vec2 to_real_direction(const ProjRoot& r) {
  std::complex<double> phase =
      std::abs(r.y) >= std::abs(r.x) ? std::conj(r.y) / std::abs(r.y) : std::conj(r.x) / std::abs(r.x);
  Vec2 v(std::real(r.x * phase), std::real(r.y * phase));
  return v.normalized();
}

double sylvester_resultant(const Eigen::Vector3d& p, const Eigen::Vector3d& q) {
  Eigen::Matrix4d S = Eigen::Matrix4d::Zero();
  S.row(0) << p[0], p[1], p[2], 0;
  S.row(1) << 0, p[0], p[1], p[2];
  S.row(2) << q[0], q[1], q[2], 0;
  S.row(3) << 0, q[0], q[1], q[2];
  return S.determinant();
}

void canonicalize_sign(Vec3& v) {
  for (int i = 0; i < 3; ++i) {
    if (std::abs(v[i]) > 1e-8) {
      if (v[i] < 0) v = -v;
      return;
    }
  }
}

double angular_distance(const Vec3& a, const Vec3& b) {
  double c = std::min(1.0, std::abs(a.dot(b)));
  return std::acos(c);
}

std::vector<Vec3> fibonacci_sphere(int n) {
  std::vector<Vec3> pts;
  pts.reserve(n);
  const double ga = M_PI * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < n; ++k) {
    double z = 1.0 - 2.0 * (k + 0.5) / n;
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    double phi = ga * k;
    pts.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  return pts;
}

// Gauss-Newton for invariant directions: zeros of (X x F(X), (|X|^2-1)/2).
bool polish_direction(const QuadraticField& F, Vec3& X) {
  auto residual = [&](const Vec3& v) {
    Eigen::Vector4d R;
    R.head<3>() = v.cross(F.evaluate(v));
    R[3] = 0.5 * (v.squaredNorm() - 1.0);
    return R;
  };
  auto cross_mat = [](const Vec3& v) {
    Mat3 m;
    m << 0, -v[2], v[1], v[2], 0, -v[0], -v[1], v[0], 0;
    return m;
  };
  Eigen::Vector4d R = residual(X);
  for (int it = 0; it < 60; ++it) {
    Eigen::Matrix<double, 4, 3> J;
    Vec3 FX = F.evaluate(X);
    J.topRows<3>() = cross_mat(X) * F.jacobian(X) - cross_mat(FX);
    J.row(3) = X.transpose();
    Vec3 step = J.colPivHouseholderQr().solve(-R);
    if (step.norm() < 1e-16) break;
    double lambda = 1.0;
    bool improved = false;
    for (int h = 0; h < 10; ++h) {
      Vec3 Xn = X + lambda * step;
      Eigen::Vector4d Rn = residual(Xn);
      if (Rn.norm() < R.norm()) {
        X = Xn;
        R = Rn;
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved) break;
    if (R.norm() <= 1e-15 * F.coeff_scale()) break;
  }
  double cross_res = X.cross(F.evaluate(X)).norm();
  if (cross_res > 1e-9 * F.coeff_scale() || std::abs(X.norm() - 1.0) > 1e-6) return false;
  X.normalize();
  return true;
}

}  // namespace

bool polish_idempotent(const QuadraticField& F, Vec3& X, double& res) {
  // Scale of a full-precision evaluation of F(X) - X.  Gauss-Newton reaches
  // a residual a few ulps above this at a genuine root; a stalled local
  // minimum near an equilibrium ray (where X = d/rho with rho -> 0 blows the
  // seed up) sits orders of magnitude higher and must be rejected, however
  // large 1 + |X|^2 happens to be.
  auto eval_scale = [&](const Vec3& v) {
    return F.coeff_scale() * v.squaredNorm() + v.norm() + 1.0;
  };
  auto G = [&](const Vec3& v) { return (F.evaluate(v) - v).eval(); };
  Vec3 g = G(X);
  for (int it = 0; it < 40; ++it) {
    double target = 2e-15 * eval_scale(X);
    if (g.norm() <= target) break;
    Mat3 J = F.jacobian(X) - Mat3::Identity();
    Eigen::FullPivLU<Mat3> lu(J);
    Vec3 step = lu.isInvertible() ? Vec3(lu.solve(-g))
                                  : Vec3(J.colPivHouseholderQr().solve(-g));
    double lambda = 1.0;
    bool improved = false;
    for (int h = 0; h < 10; ++h) {
      Vec3 Xn = X + lambda * step;
      Vec3 gn = G(Xn);
      if (gn.norm() < g.norm()) {
        X = Xn;
        g = gn;
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved) break;
  }
  res = g.norm();
  return res <= 1e-14 * eval_scale(X);
}

// --- QuadraticField ---------------------------------------------------------

QuadraticField::QuadraticField(int dim, std::array<Mat3, 3> coeffs) : dim_(dim), A_(coeffs) {
  if (dim != 2 && dim != 3) throw Error(ErrorCode::BadParams, "field dimension must be 2 or 3");
  double raw = 0.0;
  for (auto& a : A_) {
    a = 0.5 * (a + a.transpose()).eval();
    raw = std::max(raw, a.cwiseAbs().maxCoeff());
  }
  if (dim == 2) {
    double pad = A_[2].cwiseAbs().maxCoeff();
    for (int c = 0; c < 2; ++c)
      pad = std::max({pad, A_[c].row(2).cwiseAbs().maxCoeff(), A_[c].col(2).cwiseAbs().maxCoeff()});
    if (pad > 1e-12 * std::max(1.0, raw))
      throw Error(ErrorCode::InvariantViolation, "planar field must not involve the third coordinate");
    A_[2].setZero();
    for (int c = 0; c < 2; ++c) {
      A_[c].row(2).setZero();
      A_[c].col(2).setZero();
    }
  }
  scale_ = std::max(1.0, raw);
}

Vec3 QuadraticField::evaluate(const Vec3& x) const {
  return Vec3(x.dot(A_[0] * x), x.dot(A_[1] * x), x.dot(A_[2] * x));
}

Mat3 QuadraticField::jacobian(const Vec3& x) const {
  Mat3 J;
  for (int i = 0; i < 3; ++i) J.row(i) = 2.0 * (A_[i] * x).transpose();
  return J;
}

QuadraticField QuadraticField::conjugate(const Mat3& T) const {
  Eigen::FullPivLU<Mat3> lu(T);
  if (!lu.isInvertible()) throw Error(ErrorCode::BadParams, "conjugating map is singular");
  Mat3 Tinv = lu.inverse();
  std::array<Mat3, 3> B;
  for (int j = 0; j < 3; ++j) {
    B[j].setZero();
    for (int i = 0; i < 3; ++i) B[j] += T(j, i) * (Tinv.transpose() * A_[i] * Tinv);
  }
  return QuadraticField(dim_, B);
}

std::optional<QuadraticField> QuadraticField::closed_planar_subsystem(int i, int j,
                                                                      double tol) const {
  if (dim_ != 3 || i < 0 || j < 0 || i > 2 || j > 2 || i == j)
    throw Error(ErrorCode::BadParams, "subsystem indices must be distinct in 0..2");
  int k = 3 - i - j;
  for (int c : {i, j}) {
    double dep = std::max(A_[c].row(k).cwiseAbs().maxCoeff(), A_[c].col(k).cwiseAbs().maxCoeff());
    if (dep > tol * scale_) return std::nullopt;
  }
  std::array<Mat3, 3> B{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
  int idx[2] = {i, j};
  for (int c = 0; c < 2; ++c)
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q) B[c](p, q) = A_[idx[c]](idx[p], idx[q]);
  return QuadraticField(2, B);
}

// --- invariant directions ----------------------------------------------------

namespace {

std::vector<InvariantDirection> planar_directions(const QuadraticField& F,
                                                  const DirectionSearchOptions& opts) {
  std::vector<InvariantDirection> out;
  double p0 = F.coeff(0)(0, 0), p1 = 2 * F.coeff(0)(0, 1), p2 = F.coeff(0)(1, 1);
  double q0 = F.coeff(1)(0, 0), q1 = 2 * F.coeff(1)(0, 1), q2 = F.coeff(1)(1, 1);
  // x F2 - y F1, the cubic whose projective roots are the invariant rays.
  std::array<double, 4> g{q0, q1 - p0, q2 - p1, -p2};
  double gs = std::max({std::abs(g[0]), std::abs(g[1]), std::abs(g[2]), std::abs(g[3])});

  std::vector<Vec3> dirs;
  if (gs <= 1e-13) {
    // Radial field F = l(x) x: every ray is invariant.  Report the extreme
    // ray of l and the kernel ray, which carry the dynamics.
    Vec2 l(p0, q2);
    if (l.norm() <= 1e-13) return out;  // zero field
    l.normalize();
    dirs.emplace_back(l[0], l[1], 0.0);
    dirs.emplace_back(-l[1], l[0], 0.0);
  } else {
    if (std::abs(g[0]) <= 1e-12 * gs) dirs.emplace_back(1.0, 0.0, 0.0);
    for (double r : real_poly_roots(g)) {
      Vec2 d = Vec2(r, 1.0).normalized();
      dirs.emplace_back(d[0], d[1], 0.0);
    }
  }
  for (Vec3 d : dirs) {
    canonicalize_sign(d);
    bool dup = false;
    for (const auto& e : out)
      if (angular_distance(d, e.direction) < opts.dedup_tol) dup = true;
    if (dup) continue;
    Vec3 Fd = F.evaluate(d);
    double rho = d.dot(Fd);
    bool zero = Fd.norm() <= opts.zero_cutoff * F.coeff_scale();
    out.push_back({d, zero ? 0.0 : rho, zero, (Fd - rho * d).norm() / F.coeff_scale()});
  }
  std::sort(out.begin(), out.end(), [](const InvariantDirection& a, const InvariantDirection& b) {
    return std::lexicographical_compare(a.direction.data(), a.direction.data() + 3,
                                        b.direction.data(), b.direction.data() + 3);
  });
  return out;
}

}  // namespace

std::vector<InvariantDirection> invariant_directions(const QuadraticField& F,
                                                     const DirectionSearchOptions& opts) {
  if (F.dim() == 2) return planar_directions(F, opts);

  std::vector<InvariantDirection> out;
  std::vector<Vec3> grid = fibonacci_sphere(opts.sphere_samples);
  std::vector<std::pair<double, int>> scored;
  scored.reserve(grid.size());
  for (int i = 0; i < static_cast<int>(grid.size()); ++i)
    scored.emplace_back(grid[i].cross(F.evaluate(grid[i])).norm(), i);
  std::sort(scored.begin(), scored.end());

  std::vector<Vec3> seeds;
  for (const auto& [score, idx] : scored) {
    if (static_cast<int>(seeds.size()) >= opts.max_seeds) break;
    bool crowded = false;
    for (const auto& s : seeds)
      if (angular_distance(grid[idx], s) < 0.06) {
        crowded = true;
        break;
      }
    if (!crowded) seeds.push_back(grid[idx]);
  }

  for (Vec3 X : seeds) {
    if (!polish_direction(F, X)) continue;
    canonicalize_sign(X);
    bool dup = false;
    for (const auto& e : out)
      if (angular_distance(X, e.direction) < opts.dedup_tol) dup = true;
    if (dup) continue;
    Vec3 FX = F.evaluate(X);
    double rho = X.dot(FX);
    bool zero = FX.norm() <= opts.zero_cutoff * F.coeff_scale();
    out.push_back({X, zero ? 0.0 : rho, zero, (FX - rho * X).norm() / F.coeff_scale()});
  }
  std::sort(out.begin(), out.end(), [](const InvariantDirection& a, const InvariantDirection& b) {
    return std::lexicographical_compare(a.direction.data(), a.direction.data() + 3,
                                        b.direction.data(), b.direction.data() + 3);
  });
  return out;
}

std::vector<Idempotent> find_idempotents(const QuadraticField& F,
                                         const DirectionSearchOptions& opts) {
  std::vector<Idempotent> out;
  for (const auto& d : invariant_directions(F, opts)) {
    if (d.is_zero_direction || d.rho == 0.0) continue;
    Vec3 X = d.direction / d.rho;
    double res = 0.0;
    if (!polish_idempotent(F, X, res)) continue;
    bool dup = false;
    for (const auto& e : out)
      if ((X - e.point).norm() <= 1e-7 * (1.0 + X.norm())) dup = true;
    if (dup) continue;
    out.push_back({X, res});
  }
  std::sort(out.begin(), out.end(), [](const Idempotent& a, const Idempotent& b) {
    return std::lexicographical_compare(a.point.data(), a.point.data() + 3, b.point.data(),
                                        b.point.data() + 3);
  });
  return out;
}

// --- quadratic first integrals -----------------------------------------------

namespace {

int monomial_index3(int a, int b, int c) {
  int t[3] = {a, b, c};
  std::sort(t, t + 3);
  static const int table[3][3][3] = {{{0, 1, 2}, {1, 3, 4}, {2, 4, 5}},
                                     {{1, 3, 4}, {3, 6, 7}, {4, 7, 8}},
                                     {{2, 4, 5}, {4, 7, 8}, {5, 8, 9}}};
  return table[t[0]][t[1]][t[2]];
}

Mat3 form_from_vector(const Eigen::VectorXd& s, int dim) {
  Mat3 m = Mat3::Zero();
  if (dim == 3) {
    m(0, 0) = s[0];
    m(1, 1) = s[1];
    m(2, 2) = s[2];
    m(0, 1) = m(1, 0) = s[3];
    m(0, 2) = m(2, 0) = s[4];
    m(1, 2) = m(2, 1) = s[5];
  } else {
    m(0, 0) = s[0];
    m(1, 1) = s[1];
    m(0, 1) = m(1, 0) = s[2];
  }
  return m;
}

Eigen::VectorXd vector_from_form(const Mat3& m) {
  Eigen::VectorXd s(6);
  s << m(0, 0), m(1, 1), m(2, 2), m(0, 1), m(0, 2), m(1, 2);
  return s;
}

// Coefficient map s -> cubic X^T S F(X); columns indexed by the s-basis.
Eigen::MatrixXd derivative_coefficient_matrix(const QuadraticField& F) {
  int n = F.dim();
  int ncols = n == 3 ? 6 : 3;
  int nrows = n == 3 ? 10 : 4;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nrows, ncols);
  for (int k = 0; k < ncols; ++k) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(ncols);
    e[k] = 1.0;
    Mat3 S = form_from_vector(e, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (S(i, j) == 0.0) continue;
        for (int p = 0; p < n; ++p)
          for (int q = 0; q < n; ++q) {
            double c = S(i, j) * F.coeff(j)(p, q);
            if (c == 0.0) continue;
            int row;
            if (n == 3) {
              row = monomial_index3(i, p, q);
            } else {
              int t[3] = {i, p, q};
              std::sort(t, t + 3);
              row = t[0] + t[1] + t[2];  // y-degree of the monomial
            }
            M(row, k) += c;
          }
      }
  }
  return M;
}

}  // namespace

FirstIntegralBasis quadratic_first_integrals(const QuadraticField& F, double svd_tol) {
  Eigen::MatrixXd M = derivative_coefficient_matrix(F);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  FirstIntegralBasis basis;
  int ncols = M.cols();
  double smax = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
  for (int k = 0; k < ncols; ++k) basis.singular_values.push_back(k < svd.singularValues().size() ? svd.singularValues()[k] : 0.0);
  for (int k = ncols - 1; k >= 0; --k) {
    double sv = k < svd.singularValues().size() ? svd.singularValues()[k] : 0.0;
    if (smax > 0.0 && sv > svd_tol * smax) break;
    Eigen::VectorXd v = svd.matrixV().col(k);
    for (int i = 0; i < v.size(); ++i) {
      if (std::abs(v[i]) > 1e-8) {
        if (v[i] < 0) v = -v;
        break;
      }
    }
    basis.forms.emplace_back(form_from_vector(v, F.dim()), FormSpace::Dual);
    basis.residuals.push_back((M * v).norm());
  }
  return basis;
}

double membership_residual(const FirstIntegralBasis& basis, const QuadraticForm3& q) {
  Eigen::VectorXd s = vector_from_form(q.m);
  double n = s.norm();
  if (n == 0.0) return 0.0;
  s /= n;
  for (const auto& f : basis.forms) {
    Eigen::VectorXd b = vector_from_form(f.m);
    b /= b.norm();
    s -= s.dot(b) * b;
  }
  return s.norm();
}

// --- definite combinations ----------------------------------------------------

namespace {

double min_eig_block(const Mat3& M, int dim) {
  if (dim == 3) {
    Eigen::SelfAdjointEigenSolver<Mat3> es(M, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }
  Mat2 B = M.topLeftCorner<2, 2>();
  Eigen::SelfAdjointEigenSolver<Mat2> es(B, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

std::optional<DefiniteWitness> definite_combination(const std::vector<Mat3>& span, int dim,
                                                    unsigned seed) {
  int n = static_cast<int>(span.size());
  if (n == 0) return std::nullopt;
  double scale = 1.0;
  for (const auto& m : span) scale = std::max(scale, m.cwiseAbs().maxCoeff());
  double tol = 1e-9 * scale;

  auto combo = [&](const std::vector<double>& c) {
    Mat3 M = Mat3::Zero();
    for (int k = 0; k < n; ++k) M += c[k] * span[k];
    return M;
  };
  auto try_coeffs = [&](std::vector<double> c) -> std::optional<DefiniteWitness> {
    Mat3 M = combo(c);
    double lo = min_eig_block(M, dim);
    if (lo > tol) return DefiniteWitness{c, M, lo};
    lo = min_eig_block(-M, dim);
    if (lo > tol) {
      for (double& x : c) x = -x;
      return DefiniteWitness{c, -M, lo};
    }
    return std::nullopt;
  };

  if (n == 1) return try_coeffs({1.0});

  if (n == 2) {
    // Pencil Q0 + t Q1: definiteness can only change where det vanishes.
    int deg = dim;
    Eigen::MatrixXd V(deg + 1, deg + 1);
    Eigen::VectorXd rhs(deg + 1);
    std::vector<double> pts = deg == 3 ? std::vector<double>{-2, -1, 0, 1}
                                       : std::vector<double>{-1, 0, 1};
    for (int r = 0; r <= deg; ++r) {
      double t = pts[r];
      for (int cdeg = 0; cdeg <= deg; ++cdeg) V(r, cdeg) = std::pow(t, deg - cdeg);
      Mat3 M = span[0] + t * span[1];
      rhs[r] = dim == 3 ? M.determinant() : M.topLeftCorner<2, 2>().determinant();
    }
    Eigen::VectorXd coef = V.fullPivLu().solve(rhs);
    std::array<double, 4> c{0, 0, 0, 0};
    for (int i = 0; i <= deg; ++i) c[3 - deg + i] = coef[i];
    std::vector<double> roots = real_poly_roots(c);
    std::vector<double> cand{0.0};
    if (roots.empty()) {
      cand.insert(cand.end(), {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0});
    } else {
      cand.push_back(roots.front() - 1.0);
      cand.push_back(roots.back() + 1.0);
      for (size_t i = 0; i + 1 < roots.size(); ++i) cand.push_back(0.5 * (roots[i] + roots[i + 1]));
    }
    for (double t : cand)
      if (auto w = try_coeffs({1.0, t})) return w;
    return try_coeffs({0.0, 1.0});
  }

  // General span: seeded sampling on the coefficient sphere, then a
  // supergradient ascent on the smallest eigenvalue.
  std::mt19937 gen(seed);
  std::normal_distribution<double> nd;
  std::vector<double> best_c;
  double best_val = -1e300;
  double best_sign = 1.0;
  auto eval_signed = [&](const std::vector<double>& c, double sgn) {
    Mat3 M = combo(c);
    return min_eig_block(sgn * M, dim);
  };
  for (int s = 0; s < 500; ++s) {
    Eigen::VectorXd c(n);
    for (int k = 0; k < n; ++k) c[k] = nd(gen);
    c.normalize();
    std::vector<double> cv(c.data(), c.data() + n);
    for (double sgn : {1.0, -1.0}) {
      double v = eval_signed(cv, sgn);
      if (v > best_val) {
        best_val = v;
        best_c = cv;
        best_sign = sgn;
      }
    }
  }
  double eta = 0.1;
  for (int it = 0; it < 200 && !best_c.empty(); ++it) {
    Mat3 M = best_sign * combo(best_c);
    Eigen::SelfAdjointEigenSolver<Mat3> es;
    Vec3 v3;
    if (dim == 3) {
      es.compute(M);
      v3 = es.eigenvectors().col(0);
    } else {
      Eigen::SelfAdjointEigenSolver<Mat2> es2(M.topLeftCorner<2, 2>());
      v3 = Vec3(es2.eigenvectors()(0, 0), es2.eigenvectors()(1, 0), 0.0);
    }
    Eigen::VectorXd g(n), c(n);
    for (int k = 0; k < n; ++k) {
      g[k] = best_sign * v3.dot(span[k] * v3);
      c[k] = best_c[k];
    }
    g -= g.dot(c) * c;
    if (g.norm() < 1e-14) break;
    Eigen::VectorXd cn = (c + eta * g).normalized();
    std::vector<double> cv(cn.data(), cn.data() + n);
    double val = eval_signed(cv, best_sign);
    if (val > best_val) {
      best_val = val;
      best_c = cv;
      eta = std::min(1.0, eta * 1.2);
    } else {
      eta *= 0.5;
      if (eta < 1e-12) break;
    }
  }
  if (best_val > tol) {
    std::vector<double> c = best_c;
    for (double& x : c) x *= best_sign;
    return DefiniteWitness{c, combo(c), best_val};
  }
  return std::nullopt;
}

// --- affine-quadratic certificate ---------------------------------------------

std::optional<AffineQuadraticCertificate> is_affine_quadratic(const QuadraticField& F,
                                                              double tol) {
  int d = F.dim();
  int rows = d == 3 ? 6 : 3;
  Eigen::MatrixXd L(rows, d);
  for (int i = 0; i < d; ++i) {
    const Mat3& A = F.coeff(i);
    if (d == 3)
      L.col(i) << A(0, 0), A(1, 1), A(2, 2), A(0, 1), A(0, 2), A(1, 2);
    else
      L.col(i) << A(0, 0), A(1, 1), A(0, 1);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(L, Eigen::ComputeFullV);
  double smax = svd.singularValues()[0];
  Mat3 T = Mat3::Identity();
  if (smax <= 1e-14 * F.coeff_scale())
    return AffineQuadraticCertificate{T, d};  // zero field
  int m = 0;
  for (int k = 0; k < d; ++k)
    if (svd.singularValues()[k] <= tol * smax) ++m;
  if (m == 0) return std::nullopt;
  // Rows of T: complement functionals first, then the kernel of l -> l o F.
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) T(r, c) = svd.matrixV()(c, r);
  QuadraticField G = F.conjugate(T);
  double thresh = 10.0 * tol * F.coeff_scale();
  for (int j = 0; j < d - m; ++j) {
    const Mat3& B = G.coeff(j);
    for (int p = 0; p < d - m; ++p)
      for (int q = 0; q < d - m; ++q)
        if (std::abs(B(p, q)) > thresh) return std::nullopt;
  }
  for (int j = d - m; j < d; ++j)
    if (G.coeff(j).cwiseAbs().maxCoeff() > thresh) return std::nullopt;
  return AffineQuadraticCertificate{T, m};
}

// --- planar completeness -------------------------------------------------------

PlanarVerdict planar_completeness(const QuadraticField& F, double tol) {
  if (F.dim() != 2) throw Error(ErrorCode::BadParams, "planar decision needs a planar field");
  double mc = 0.0;
  for (int i = 0; i < 2; ++i) mc = std::max(mc, F.coeff(i).cwiseAbs().maxCoeff());
  if (mc <= 1e-300) return {PlanarStatus::Complete, PlanarReason::ZeroField, {}, {}, 0.0, {}};

  std::array<Mat3, 3> An{F.coeff(0) / mc, F.coeff(1) / mc, Mat3::Zero()};
  QuadraticField Fn(2, An);

  if (is_affine_quadratic(Fn, tol))
    return {PlanarStatus::Complete, PlanarReason::AffineQuadratic, {}, {}, 0.0, {}};

  Eigen::Vector3d p(Fn.coeff(0)(0, 0), 2 * Fn.coeff(0)(0, 1), Fn.coeff(0)(1, 1));
  Eigen::Vector3d q(Fn.coeff(1)(0, 0), 2 * Fn.coeff(1)(0, 1), Fn.coeff(1)(1, 1));
  bool pzero = p.norm() <= 1e-13;
  bool qzero = q.norm() <= 1e-13;

  std::optional<Vec2> shared;  // real projective root common to p and q
  if (pzero || qzero) {
    const Eigen::Vector3d& g = pzero ? q : p;
    for (const auto& r : binary_quadratic_roots(g[0], g[1], g[2]))
      if (projectively_real(r)) {
        shared = to_real_direction(r);
        break;
      }
  } else {
    Eigen::Vector3d ph = p / p.norm(), qh = q / q.norm();
    if (std::abs(sylvester_resultant(ph, qh)) <= 1e-10) {
      auto rp = binary_quadratic_roots(ph[0], ph[1], ph[2]);
      auto rq = binary_quadratic_roots(qh[0], qh[1], qh[2]);
      double best = 1e300;
      ProjRoot bestr{};
      for (const auto& a : rp)
        for (const auto& b : rq)
          if (chordal_distance(a, b) < best) {
            best = chordal_distance(a, b);
            bestr = a;
          }
      if (best <= 1e-5 && projectively_real(bestr)) shared = to_real_direction(bestr);
    }
  }

  if (shared) {
    // F = l(x) M x with l vanishing on the shared root direction.
    Vec2 r = *shared;
    Vec2 l(r[1], -r[0]);
    Mat2 M;
    bool ok = true;
    Eigen::Vector3d comps[2] = {p, q};
    for (int c = 0; c < 2 && ok; ++c) {
      // (l0 x + l1 y)(m0 x + m1 y) matched against the component coefficients.
      Eigen::Matrix<double, 3, 2> D;
      D << l[0], 0, l[1], l[0], 0, l[1];
      Vec2 mrow = D.colPivHouseholderQr().solve(comps[c]);
      if ((D * mrow - comps[c]).norm() > 1e-7) ok = false;
      M.row(c) = mrow.transpose();
    }
    if (ok) {
      double disc = (M(0, 0) + M(1, 1)) * (M(0, 0) + M(1, 1)) -
                    4.0 * (M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0));
      PlanarVerdict v;
      v.common_factor = l;
      v.linear_part = (mc * M).eval();
      v.discriminant = disc;
      if (disc < 0.0) {
        v.status = PlanarStatus::Complete;
        v.reason = PlanarReason::NegativeDiscriminant;
        return v;
      }
      v.status = PlanarStatus::Incomplete;
      v.reason = PlanarReason::NonnegativeDiscriminant;
      // Search eigenrays of M for a strict idempotent witness.
      double tr = M(0, 0) + M(1, 1);
      for (double lam : {0.5 * (tr + std::sqrt(std::max(0.0, disc))),
                         0.5 * (tr - std::sqrt(std::max(0.0, disc)))}) {
        Mat2 E = M - lam * Mat2::Identity();
        Vec2 ev = std::abs(E(0, 1)) + std::abs(E(0, 0)) >= std::abs(E(1, 0)) + std::abs(E(1, 1))
                      ? Vec2(E(0, 1), -E(0, 0))
                      : Vec2(E(1, 1), -E(1, 0));
        if (ev.norm() <= 1e-12) ev = Vec2(1, 0);  // M is a multiple of I
        ev.normalize();
        double s = lam * l.dot(ev);
        if (std::abs(s) > 1e-10) {
          Vec3 X(ev[0] / s, ev[1] / s, 0.0);
          X /= mc;  // undo the normalization
          double res = 0.0;
          if (polish_idempotent(F, X, res)) {
            v.witness = X;
            break;
          }
        }
      }
      return v;
    }
  }

  // No real common factor: every invariant ray is strict and certifies escape.
  auto dirs = invariant_directions(Fn);
  const InvariantDirection* pick = nullptr;
  for (const auto& d : dirs)
    if (!d.is_zero_direction && (!pick || std::abs(d.rho) > std::abs(pick->rho))) pick = &d;
  if (!pick)
    throw Error(ErrorCode::InternalInconsistency,
                "planar field with neither a common factor nor a strict invariant ray");
  Vec3 X = pick->direction / (pick->rho * mc);
  double res = 0.0;
  PlanarVerdict v;
  v.status = PlanarStatus::Incomplete;
  v.reason = PlanarReason::IdempotentRay;
  if (polish_idempotent(F, X, res)) v.witness = X;
  return v;
}

}  // namespace geocomplete
