#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "geocomplete/flows.hpp"
#include "geocomplete/presets.hpp"
#include "geocomplete/quadratic_field.hpp"

using namespace geocomplete;

namespace {

QuadraticField field_of(const std::string& preset) {
  Preset p = get_preset(preset);
  return euler_field_dual(p.algebra, QuadraticForm3(p.metric));
}

// Planar field from component coefficient triples (x^2, xy, y^2).
QuadraticField planar(double a0, double a1, double a2, double b0, double b1,
                      double b2) {
  std::array<Mat3, 3> c;
  for (auto& m : c) m.setZero();
  c[0](0, 0) = a0; c[0](0, 1) = c[0](1, 0) = a1 / 2; c[0](1, 1) = a2;
  c[1](0, 0) = b0; c[1](0, 1) = c[1](1, 0) = b1 / 2; c[1](1, 1) = b2;
  return QuadraticField(2, c);
}

double angular_gap(const Vec3& a, const Vec3& b) {
  const Vec3 u = a.normalized(), v = b.normalized();
  return std::min((u - v).norm(), (u + v).norm());
}

}  // namespace

TEST_SUITE("field") {

TEST_CASE("evaluate matches the coefficient matrices") {
  QuadraticField F = field_of("example4");
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int trial = 0; trial < 20; ++trial) {
    Vec3 x(u(rng), u(rng), u(rng));
    Vec3 want(-0.5 * x(1) * x(2), -1.5 * x(0) * x(2), -2.0 * x(0) * x(1));
    CHECK((F.evaluate(x) - want).norm() < 1e-12 * (1 + want.norm()));
  }
}

TEST_CASE("jacobian matches finite differences") {
  QuadraticField F = field_of("example2");
  Vec3 x(0.4, -1.3, 0.8);
  Mat3 J = F.jacobian(x);
  const double h = 1e-6;
  for (int j = 0; j < 3; ++j) {
    Vec3 dx = Vec3::Zero();
    dx(j) = h;
    Vec3 col = (F.evaluate(x + dx) - F.evaluate(x - dx)) / (2 * h);
    CHECK((J.col(j) - col).norm() < 1e-8);
  }
}

TEST_CASE("conjugation is the pushforward") {
  QuadraticField F = field_of("example3");
  Mat3 T;
  T << 1, 0.5, 0,
       0, 1, -0.3,
       0.2, 0, 1;
  QuadraticField G = F.conjugate(T);
  Vec3 x(0.9, -0.4, 1.2);
  CHECK((G.evaluate(T * x) - T * F.evaluate(x)).norm() < 1e-12);
}

TEST_CASE("closed planar subsystem extraction") {
  // Components 2,3 of the example1 field depend only on (x2, x3).
  QuadraticField F = field_of("example1");
  auto sub = F.closed_planar_subsystem(1, 2);
  REQUIRE(sub.has_value());
  CHECK(sub->dim() == 2);
  // Subsystem is (y^2, -x y) in plane coordinates (x, y) = (x2, x3).
  Vec3 p(0.7, -1.1, 0);
  Vec3 v = sub->evaluate(p);
  CHECK(v(0) == doctest::Approx(p(1) * p(1)).epsilon(1e-12));
  CHECK(v(1) == doctest::Approx(-p(0) * p(1)).epsilon(1e-12));

  // The first component depends on x1, so (0,1) does not close.
  CHECK_FALSE(F.closed_planar_subsystem(0, 1).has_value());
}

TEST_CASE("invariant directions of the example4 field") {
  QuadraticField F = field_of("example4");
  auto dirs = invariant_directions(F);
  // Three coordinate-axis equilibrium rays plus four strict directions.
  int zeros = 0, strict = 0;
  for (const auto& d : dirs) {
    CHECK(d.residual < 1e-9);
    if (d.is_zero_direction) {
      ++zeros;
      int axis = 0;
      d.direction.cwiseAbs().maxCoeff(&axis);
      CHECK(std::abs(std::abs(d.direction(axis)) - 1.0) < 1e-7);
    } else {
      ++strict;
      // Strict rays rescale to idempotents of norm sqrt(8/3).
      CHECK(std::abs(d.rho) == doctest::Approx(std::sqrt(3.0 / 8.0)).epsilon(1e-8));
    }
  }
  CHECK(zeros == 3);
  CHECK(strict == 4);
}

TEST_CASE("idempotents of the example4 field") {
  QuadraticField F = field_of("example4");
  auto idems = find_idempotents(F);
  REQUIRE(idems.size() == 4);
  const double s = 1.0 / std::sqrt(3.0);
  const std::array<Vec3, 4> expected = {
      Vec3(-s, 1, 2 * s), Vec3(s, -1, 2 * s), Vec3(s, 1, -2 * s),
      Vec3(-s, -1, -2 * s)};
  for (const Vec3& e : expected) {
    double best = 1e9;
    for (const auto& id : idems) best = std::min(best, (id.point - e).norm());
    CHECK(best < 1e-9);
  }
  for (const auto& id : idems) {
    CHECK(id.residual <= 1e-8 * (1 + id.point.squaredNorm()));
    CHECK((F.evaluate(id.point) - id.point).norm() < 1e-10);
  }
}

TEST_CASE("example5 field has equilibrium axes only") {
  QuadraticField F = field_of("example5");
  CHECK(find_idempotents(F).empty());
  auto dirs = invariant_directions(F);
  CHECK(dirs.size() == 3);
  for (const auto& d : dirs) CHECK(d.is_zero_direction);
}

TEST_CASE("polish converges from a perturbed idempotent") {
  QuadraticField F = field_of("example4");
  const double s = 1.0 / std::sqrt(3.0);
  Vec3 x = Vec3(-s, 1, 2 * s) + Vec3(1e-3, -2e-3, 1e-3);
  double res = 0;
  CHECK(polish_idempotent(F, x, res));
  CHECK((x - Vec3(-s, 1, 2 * s)).norm() < 1e-10);
}

TEST_CASE("quadratic first integrals of the example3 field") {
  Preset p = get_preset("example3");
  QuadraticForm3 metric(p.metric);
  QuadraticField F = euler_field_dual(p.algebra, metric);
  FirstIntegralBasis basis = quadratic_first_integrals(F);
  CHECK(basis.dimension() == 2);
  for (double r : basis.residuals) CHECK(r < 1e-12);

  // The dual energy and the dual Killing form both lie in the span.
  CHECK(membership_residual(basis, dual_energy(metric)) < 1e-10);
  QuadraticForm3 dual_killing(
      inverse_form_matrix(normalized_killing(p.algebra)), FormSpace::Dual);
  CHECK(membership_residual(basis, dual_killing) < 1e-10);

  // A generic form does not.
  Mat3 generic = Mat3::Zero();
  generic(0, 1) = generic(1, 0) = 1;
  generic(2, 2) = 3;
  CHECK(membership_residual(basis, QuadraticForm3(generic, FormSpace::Dual)) > 0.1);
}

TEST_CASE("su2 casimir is always conserved") {
  Mat3 s;
  s << 1.0, 0.2, 0.0,
       0.2, 2.0, -0.1,
       0.0, -0.1, 3.0;
  QuadraticField F = euler_field_dual(standard_algebra(AlgebraType::SU2),
                                      QuadraticForm3(s));
  FirstIntegralBasis basis = quadratic_first_integrals(F);
  CHECK(basis.dimension() >= 2);
  CHECK(membership_residual(basis, QuadraticForm3(Mat3::Identity(), FormSpace::Dual)) <
        1e-10);
}

TEST_CASE("definite combination search") {
  // The identity hides in the span.
  std::vector<Mat3> span = {Vec3(1, -1, 0).asDiagonal(), Vec3(0, 1, -1).asDiagonal(),
                            Vec3(1, 1, 1).asDiagonal()};
  auto w = definite_combination(span);
  REQUIRE(w.has_value());
  CHECK(w->min_eigenvalue > 0);
  Mat3 combo = Mat3::Zero();
  for (std::size_t i = 0; i < span.size(); ++i) combo += w->coeffs[i] * span[i];
  CHECK((combo - w->form).cwiseAbs().maxCoeff() < 1e-12);

  // Two-form pencil: Q0 + Q1 is definite.
  std::vector<Mat3> pencil = {Vec3(1, -1, 1).asDiagonal(), Vec3(0, 2, 0).asDiagonal()};
  CHECK(definite_combination(pencil).has_value());

  // A single indefinite form has no definite multiple.
  std::vector<Mat3> lone = {Vec3(1, -1, 0).asDiagonal()};
  CHECK_FALSE(definite_combination(lone).has_value());

  // Traceless span: every combination is traceless, never definite.
  std::vector<Mat3> traceless = {Vec3(1, -1, 0).asDiagonal(),
                                 Vec3(0, 1, -1).asDiagonal()};
  CHECK_FALSE(definite_combination(traceless).has_value());
}

TEST_CASE("affine-quadratic certificates") {
  // Heisenberg: (0, -x1 x3, x1 x2) with x1 conserved.
  QuadraticField F = field_of("heisenberg");
  auto cert = is_affine_quadratic(F);
  REQUIRE(cert.has_value());
  CHECK(cert->invariant_functionals >= 1);

  CHECK(is_affine_quadratic(field_of("abelian")).has_value());
  CHECK_FALSE(is_affine_quadratic(field_of("example4")).has_value());
  CHECK_FALSE(is_affine_quadratic(field_of("example5")).has_value());
}

TEST_CASE("planar: zero and affine-quadratic fields are complete") {
  CHECK(planar_completeness(planar(0, 0, 0, 0, 0, 0)).status == PlanarStatus::Complete);
  CHECK(planar_completeness(planar(0, 0, 0, 0, 0, 0)).reason == PlanarReason::ZeroField);

  // (xy, 0): y is conserved, x satisfies a linear equation.
  auto aq = planar_completeness(planar(0, 1, 0, 0, 0, 0));
  CHECK(aq.status == PlanarStatus::Complete);
  CHECK(aq.reason == PlanarReason::AffineQuadratic);
}

TEST_CASE("planar: rotation factor is complete") {
  // (y^2, -xy) = y * (y, -x): common factor with elliptic linear part.
  auto v = planar_completeness(planar(0, 0, 1, 0, -1, 0));
  CHECK(v.status == PlanarStatus::Complete);
  CHECK(v.reason == PlanarReason::NegativeDiscriminant);
  CHECK(v.discriminant == doctest::Approx(-4.0).epsilon(1e-9));
}

TEST_CASE("planar: hyperbolic and parabolic factors are incomplete") {
  // (x^2, xy) = x * I x: discriminant 0.
  auto par = planar_completeness(planar(1, 0, 0, 0, 1, 0));
  CHECK(par.status == PlanarStatus::Incomplete);
  CHECK(par.reason == PlanarReason::NonnegativeDiscriminant);
  REQUIRE(par.witness.has_value());
  QuadraticField F = planar(1, 0, 0, 0, 1, 0);
  CHECK((F.evaluate(*par.witness) - *par.witness).norm() < 1e-8);

  // (x^2 + xy, xy): factor x, linear part [[1,1],[0,1]], not affine-quadratic.
  auto jor = planar_completeness(planar(1, 1, 0, 0, 1, 0));
  CHECK(jor.status == PlanarStatus::Incomplete);
  CHECK(jor.discriminant == doctest::Approx(0.0));
}

TEST_CASE("planar: no real factor falls to an idempotent ray") {
  // (x^2 - y^2, 2xy) is z^2 in disguise; the ray through (1,0) escapes.
  auto v = planar_completeness(planar(1, 0, -1, 0, 2, 0));
  CHECK(v.status == PlanarStatus::Incomplete);
  CHECK(v.reason == PlanarReason::IdempotentRay);
  REQUIRE(v.witness.has_value());
  QuadraticField F = planar(1, 0, -1, 0, 2, 0);
  CHECK((F.evaluate(*v.witness) - *v.witness).norm() < 1e-8);
}

TEST_CASE("planar: definite first component escapes") {
  auto v = planar_completeness(planar(1, 0, 1, 0, 0, 0));
  CHECK(v.status == PlanarStatus::Incomplete);
  REQUIRE(v.witness.has_value());
}

TEST_CASE("planar: randomized factored fields classify by discriminant") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(-2, 2);
  int complete = 0, incomplete = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const double l0 = u(rng), l1 = u(rng);
    Mat2 M;
    M << u(rng), u(rng), u(rng), u(rng);
    if (std::abs(M.determinant()) < 1e-3 || std::hypot(l0, l1) < 1e-3) continue;
    // F = (l . x) M x, written out per component.
    const double a0 = l0 * M(0, 0), a1 = l1 * M(0, 0) + l0 * M(0, 1),
                 a2 = l1 * M(0, 1);
    const double b0 = l0 * M(1, 0), b1 = l1 * M(1, 0) + l0 * M(1, 1),
                 b2 = l1 * M(1, 1);
    QuadraticField F = planar(a0, a1, a2, b0, b1, b2);
    if (is_affine_quadratic(F)) continue;
    const double disc = M.trace() * M.trace() - 4 * M.determinant();
    if (std::abs(disc) < 1e-6) continue;
    auto v = planar_completeness(F);
    if (disc < 0) {
      CHECK(v.status == PlanarStatus::Complete);
      ++complete;
    } else {
      CHECK(v.status == PlanarStatus::Incomplete);
      if (v.witness) CHECK((F.evaluate(*v.witness) - *v.witness).norm() < 1e-6);
      ++incomplete;
    }
    CHECK(v.discriminant * disc > 0);
  }
  // Both branches exercised.
  CHECK(complete > 20);
  CHECK(incomplete > 20);
}

}  // TEST_SUITE
