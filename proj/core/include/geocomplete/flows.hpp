#pragma once

#include "geocomplete/lie_algebra.hpp"
#include "geocomplete/metric_operator.hpp"
#include "geocomplete/quadratic_field.hpp"
#include "geocomplete/quadratic_form.hpp"

namespace geocomplete {

// Left-invariant connection product x.y determined by the metric:
//   2<x.y, z> = <[x,y], z> - <[y,z], x> + <[z,x], y>.
// Throws IllConditionedMetric when the metric solve is numerically hopeless.
Vec3 connection_product(const LieAlgebra3& alg, const QuadraticForm3& metric, const Vec3& x,
                        const Vec3& y);

// Geodesic equation in body coordinates, xdot = -x.x, as a quadratic field.
QuadraticField euler_field_algebra(const LieAlgebra3& alg, const QuadraticForm3& metric);

// The same flow on momenta xi = S x (S the metric matrix).  This is the form
// the integrator and the direction search consume.
QuadraticField euler_field_dual(const LieAlgebra3& alg, const QuadraticForm3& metric);

// Isospectral form ydot = [y, u^{-1} y] for y = u(x); conjugate of the body
// field by u.matrix.
QuadraticField lax_field(const LieAlgebra3& alg, const MetricOperatorU& u);

// Conserved energy of the dual field: xi^T S^{-1} xi.
QuadraticForm3 dual_energy(const QuadraticForm3& metric);

// True when <[x,y],z> = -<y,[x,z]> holds on the basis; such metrics have
// vanishing geodesic field in the body frame.
bool is_bi_invariant(const LieAlgebra3& alg, const QuadraticForm3& metric, double tol = 1e-10);

}  // namespace geocomplete
