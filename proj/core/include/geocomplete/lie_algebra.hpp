#pragma once

#include <array>
#include <optional>
#include <string>

#include "geocomplete/types.hpp"

namespace geocomplete {

/// Three-dimensional real Lie algebra given by structure constants on a fixed
/// basis (e1, e2, e3):  [e_i, e_j] = sum_k c[k](i,j) e_k.
///
/// Construction validates antisymmetry exactly (the table is stored
/// antisymmetrized) and the Jacobi identity up to `jacobi_tol`.
class LieAlgebra3 {
 public:
  /// Abelian algebra (all brackets zero).
  LieAlgebra3();

  /// c[k] is the 3x3 matrix of e_k-coefficients, indexed (i,j).
  explicit LieAlgebra3(const std::array<Mat3, 3>& c, double jacobi_tol = 1e-10);

  Vec3 bracket(const Vec3& x, const Vec3& y) const;

  /// Matrix of ad_x: y -> [x, y].
  Mat3 ad(const Vec3& x) const;

  /// Trace of ad_{e_i} for i = 0,1,2; identically zero iff unimodular.
  Vec3 trace_vector() const;

  bool is_unimodular(double tol = 1e-10) const;

  /// Structure constants in the basis with columns of B as the new basis
  /// vectors (expressed in the current basis).
  LieAlgebra3 change_basis(const Mat3& B) const;

  /// Largest Jacobi residual over basis triples (diagnostic).
  double jacobi_residual() const;

  const std::array<Mat3, 3>& structure_constants() const { return c_; }

  /// Basis of the derived algebra [g, g] as columns (rank r <= 3).
  Eigen::Matrix<double, 3, Eigen::Dynamic> derived_algebra(double tol = 1e-10) const;

 private:
  std::array<Mat3, 3> c_;
};

enum class AlgebraType { Abelian, Heisenberg, SU2, E2, E11, SL2R, NonUnimodular };

const char* algebra_type_name(AlgebraType t);

/// Result of bringing a unimodular algebra to the bracket-vs-cross-product
/// normal form [x, y] = L(x cross y) with L symmetric.
///
/// `frame` is an orthonormal basis (columns, input coordinates) of
/// eigenvectors of L satisfying [E2,E3] = a1 E1, [E3,E1] = a2 E2,
/// [E1,E2] = a3 E3 with alphas = (a1,a2,a3). Signs are canonicalized: after
/// an optional global flip (orientation reversal, which makes the frame
/// left-handed), pluses come first, then minuses, then zeros.
struct MilnorData {
  Mat3 frame;
  Vec3 alphas;
  std::array<int, 3> signs;   // entries in {+1, 0, -1}, canonical order
  double residual;            // max bracket-relation mismatch
};

/// Errors: NotUnimodular if L fails symmetry at `tol`.
MilnorData milnor_normal_form(const LieAlgebra3& alg, double tol = 1e-9);

struct Classification {
  AlgebraType type;
  std::optional<MilnorData> milnor;  // present iff unimodular
  Vec3 trace_vector;                 // nonzero only in the non-unimodular case
};

Classification classify(const LieAlgebra3& alg, double tol = 1e-9);

/// The standard bracket tables, one per classification row:
///   Abelian      all brackets zero
///   Heisenberg   [e2,e3] = e1
///   SU2          [e2,e3] = e1, [e3,e1] = e2, [e1,e2] = e3
///   E2           [e2,e3] = 0,  [e3,e1] = e2, [e1,e2] = e3
///   E11          [e1,e2] = e2, [e1,e3] = -e3, [e2,e3] = 0
///   SL2R         orthonormal frame: [e1,e2] = -e3, [e1,e3] = -e2, [e2,e3] = e1
/// NonUnimodular requires params (alpha, beta, gamma, delta) with
/// alpha + delta = 2: [e1,e2] = alpha e2 + beta e3, [e1,e3] = gamma e2 + delta e3.
struct NonUnimodularParams {
  double alpha, beta, gamma, delta;
};
LieAlgebra3 standard_algebra(AlgebraType t,
                             std::optional<NonUnimodularParams> params = std::nullopt);

/// sl(2,R) in the hyperbolic frame: [e1,e2] = e2, [e1,e3] = -e3, [e2,e3] = e1.
LieAlgebra3 sl2_hyperbolic_algebra();

}  // namespace geocomplete
