#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "geocomplete/quadratic_form.hpp"

namespace geocomplete {

/// Spectral shape of the metric operator u, the decisive invariant for the
/// simple-algebra completeness criterion.
enum class SpectralShape {
  TripleDegenerate,                 // u = alpha * Id
  DegreeLE2,                        // minimal polynomial (x-a)^2 with 2-dim eigenspace
  OneDoubleOneSimple_Diagonalizable,
  OneDoubleOneSimple_Cyclic,        // (x-a1)(x-a2)^2, one eigendirection for a2
  ThreeDistinct,
  SingleEigendirection,             // Jordan 3-block or a complex pair
};

const char* spectral_shape_name(SpectralShape s);

/// The k-symmetric operator u with <x,y> = k(u x, y), where k is the
/// normalized Killing form. Carries its spectral analysis.
struct MetricOperatorU {
  Mat3 matrix;                       // input-basis matrix, columns are images
  QuadraticForm3 killing;            // normalized Killing form k
  QuadraticForm3 metric;
  SpectralShape shape;
  std::vector<double> real_eigenvalues;         // distinct, clustered
  std::vector<int> multiplicities;              // algebraic, parallel to above
  std::vector<Vec3> eigenvectors;               // one per real eigenvalue (unit)
  bool has_complex_pair = false;
  std::complex<double> complex_eigenvalue{0.0, 0.0};
};

/// Build u = k^{-1} S for a metric S on an algebra with nondegenerate Killing
/// form. Errors: DegenerateKilling, DegenerateMetric, AmbiguousSpectrum (an
/// eigenvalue gap falls inside the undecidable band around eig_tol).
MetricOperatorU u_from_metric(const LieAlgebra3& alg, const QuadraticForm3& metric,
                              double eig_tol = 1e-8);

}  // namespace geocomplete
