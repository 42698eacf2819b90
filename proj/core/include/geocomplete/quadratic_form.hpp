#pragma once

#include <array>

#include "geocomplete/lie_algebra.hpp"
#include "geocomplete/types.hpp"

namespace geocomplete {

/// Which vector space a symmetric bilinear form lives on. An `Algebra` form
/// eats algebra vectors x; a `Dual` form eats covectors xi.
enum class FormSpace { Algebra, Dual };

/// Symmetric bilinear form on R^3, stored as its exact symmetric matrix.
struct QuadraticForm3 {
  Mat3 m;
  FormSpace space = FormSpace::Algebra;

  QuadraticForm3() : m(Mat3::Zero()) {}
  QuadraticForm3(const Mat3& mat, FormSpace s = FormSpace::Algebra);

  double operator()(const Vec3& x) const { return x.dot(m * x); }
  double bilinear(const Vec3& x, const Vec3& y) const { return x.dot(m * y); }

  /// Form matrix after the basis change with columns of B as the new basis.
  QuadraticForm3 change_basis(const Mat3& B) const;
};

/// Signature (p, n, z) = (#positive, #negative, #zero) eigenvalues, counting
/// |lambda| <= sig_tol * max(1, spectral radius) as zero.
struct Signature {
  int positive, negative, zero;
  bool operator==(const Signature&) const = default;
};
Signature signature(const QuadraticForm3& q, double sig_tol = 1e-9);

/// Musical isomorphism of a nondegenerate metric: flat(x) = S x and its
/// inverse sharp(xi) = S^{-1} xi. Errors: DegenerateMetric.
Vec3 musical_flat(const QuadraticForm3& metric, const Vec3& x);
Vec3 musical_sharp(const QuadraticForm3& metric, const Vec3& xi);

/// Inverse matrix of a nondegenerate form (the induced form on the dual).
Mat3 inverse_form_matrix(const QuadraticForm3& metric);

/// Killing trace form K(x,y) = tr(ad_x ad_y).
QuadraticForm3 killing_form(const LieAlgebra3& alg);

/// Killing form scaled by 1/2, the normalization under which the standard
/// sl(2,R) frames satisfy k(E1,E1) = 1. Frame-independent.
QuadraticForm3 normalized_killing(const LieAlgebra3& alg);

/// Gram matrix of `q` restricted to span{v1, v2}.
/// Errors: DependentSpan if v1, v2 are (nearly) linearly dependent.
Mat2 restrict_form(const QuadraticForm3& q, const Vec3& v1, const Vec3& v2,
                   double tol = 1e-10);

}  // namespace geocomplete
