#pragma once

#include <optional>
#include <vector>

#include "geocomplete/quadratic_form.hpp"
#include "geocomplete/types.hpp"

namespace geocomplete {

// Homogeneous quadratic vector field F_i(X) = X^T A_i X on R^dim, dim in {2,3}.
// Planar fields are stored padded: A[2] = 0 and the third row/column of
// A[0], A[1] vanish, so Vec3/Mat3 machinery applies throughout.
class QuadraticField {
 public:
  QuadraticField(int dim, std::array<Mat3, 3> coeffs);

  int dim() const { return dim_; }
  const Mat3& coeff(int i) const { return A_[i]; }
  double coeff_scale() const { return scale_; }  // max(1, largest |entry|)

  Vec3 evaluate(const Vec3& x) const;
  Mat3 jacobian(const Vec3& x) const;  // row i = 2 x^T A_i

  // Pushforward by the invertible linear map T: G = T o F o T^{-1},
  // i.e. if xdot = F(x) and y = Tx then ydot = G(y).
  QuadraticField conjugate(const Mat3& T) const;

  // If components i and j depend only on x_i, x_j the pair closes into a
  // planar subsystem; returns it in coordinates (x_i, x_j).
  std::optional<QuadraticField> closed_planar_subsystem(int i, int j,
                                                        double tol = 1e-12) const;

 private:
  int dim_;
  std::array<Mat3, 3> A_;
  double scale_;
};

// A direction d (unit) with F(d) = rho * d.  rho == 0 means the whole ray is
// an equilibrium line; rho != 0 rescales to the strict idempotent d / rho.
struct InvariantDirection {
  Vec3 direction;
  double rho;
  bool is_zero_direction;
  double residual;  // |F(d) - rho d| relative to coeff scale
};

struct DirectionSearchOptions {
  int sphere_samples = 20000;
  int max_seeds = 48;
  int newton_iterations = 60;
  double dedup_tol = 1e-6;      // angular, antipodes identified
  double zero_cutoff = 1e-7;    // |F(d)| / coeff scale below which rho ~ 0
};

// All invariant directions of F.  Exact (resultant-free cubic roots) in the
// planar case; seeded Gauss-Newton sphere search in dimension 3.
std::vector<InvariantDirection> invariant_directions(
    const QuadraticField& F, const DirectionSearchOptions& opts = {});

// Points X* with F(X*) = X*, polished to residual <= 1e-8 (1 + |X*|^2).
// Derived from the non-zero invariant directions.
struct Idempotent {
  Vec3 point;
  double residual;
};
std::vector<Idempotent> find_idempotents(const QuadraticField& F,
                                         const DirectionSearchOptions& opts = {});

// Newton-polish a candidate toward F(X) = X; true once the residual meets
// |F(X) - X| <= 1e-8 (1 + |X|^2).  X is updated in place.
bool polish_idempotent(const QuadraticField& F, Vec3& X, double& residual);

// Basis of the space { S symmetric : X^T S F(X) == 0 }, i.e. quadratic forms
// Q(X) = X^T S X constant along trajectories of F.
struct FirstIntegralBasis {
  std::vector<QuadraticForm3> forms;        // orthonormal coefficient vectors
  std::vector<double> residuals;            // cubic-coefficient residual per form
  std::vector<double> singular_values;      // of the derivative-coefficient map
  int dimension() const { return static_cast<int>(forms.size()); }
};
FirstIntegralBasis quadratic_first_integrals(const QuadraticField& F,
                                             double svd_tol = 1e-10);

// Distance (relative, coefficient space) from Q to span(basis).
double membership_residual(const FirstIntegralBasis& basis, const QuadraticForm3& q);

// Search for a definite linear combination of the given forms.  coeffs gives
// the combination, form the resulting positive definite matrix.
struct DefiniteWitness {
  std::vector<double> coeffs;
  Mat3 form;
  double min_eigenvalue;
};
std::optional<DefiniteWitness> definite_combination(const std::vector<Mat3>& span,
                                                    int dim = 3,
                                                    unsigned seed = 12345);

// Certificate that F is affine-quadratic: in coordinates y = T x the first
// m components y' = (u) have fields with no uu-terms, the remaining ones
// vanish identically.  Those systems never blow up in finite time.
struct AffineQuadraticCertificate {
  Mat3 T;
  int invariant_functionals;  // dim of { l : l o F == 0 }
};
std::optional<AffineQuadraticCertificate> is_affine_quadratic(const QuadraticField& F,
                                                              double tol = 1e-10);

// Planar decision for a homogeneous quadratic system.
enum class PlanarStatus { Complete, Incomplete };
enum class PlanarReason {
  ZeroField,
  AffineQuadratic,          // complete: linearizable structure
  NegativeDiscriminant,     // complete: common factor with elliptic linear part
  NonnegativeDiscriminant,  // incomplete: common factor, hyperbolic or parabolic
  IdempotentRay,            // incomplete: invariant ray with finite escape
};
struct PlanarVerdict {
  PlanarStatus status;
  PlanarReason reason;
  // Filled in the common-factor branch: F = l(x) * (linear map M x).
  std::optional<Vec2> common_factor;
  std::optional<Mat2> linear_part;
  double discriminant = 0.0;
  std::optional<Vec3> witness;  // idempotent (padded) when incomplete
};
PlanarVerdict planar_completeness(const QuadraticField& F, double tol = 1e-10);

}  // namespace geocomplete
