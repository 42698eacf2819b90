#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "geocomplete/quadratic_field.hpp"
#include "geocomplete/quadratic_form.hpp"
#include "geocomplete/types.hpp"

namespace geocomplete {

struct IntegrateOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double norm_cap = 1e8;     // stop once |y| crosses this
  double h_min = 1e-14;      // relative to |horizon|
  double h_init = 0.0;       // 0 selects the starting step automatically
  std::size_t max_steps = 10000000;
  bool dense = true;         // keep accepted knots for interpolation
  double growth_min = 1e-6;  // superlinearity threshold, x coefficient scale
};

// ReachedHorizon: integrated to t_end.
// BlowUp: stopped early with certified superlinear growth |y|' ~ |y|^2.
// StepUnderflow: any other early stop (step collapse, step budget, or a norm
// cap crossing whose growth is subquadratic, e.g. exponential orbits).
enum class IntegrateStatus { ReachedHorizon, BlowUp, StepUnderflow };
const char* integrate_status_name(IntegrateStatus s);

struct Trajectory {
  IntegrateStatus status = IntegrateStatus::ReachedHorizon;
  double t_final = 0.0;
  Vec3 y_final = Vec3::Zero();
  double max_norm = 0.0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;

  // Knots (only when options.dense); f holds derivatives for Hermite eval.
  std::vector<double> t;
  std::vector<Vec3> y;
  std::vector<Vec3> f;

  std::optional<double> blowup_time;  // least-squares escape time on BlowUp
  std::vector<double> drift;          // max |Q(y(t)) - Q(y0)| per monitor

  Vec3 at(double time) const;  // cubic Hermite between knots; needs dense
};

// Dormand-Prince 5(4) with PI step control.  Integrates y' = F(y) from y0 at
// t = 0 to t = horizon (sign gives the direction).
Trajectory integrate(const QuadraticField& F, const Vec3& y0, double horizon,
                     const IntegrateOptions& options = {},
                     const std::vector<QuadraticForm3>& monitors = {});

// Fit 1/|y| ~ a + b t over the final decade of growth (|y| >= max/10) and
// return the extrapolated root.  Throws InsufficientTail below 10 samples.
double estimate_blowup_time(const std::vector<double>& t, const std::vector<Vec3>& y);

// Largest relative deviation |y(t_k) - exact(t_k)| / max(1, |exact(t_k)|)
// over the stored knots.
double max_relative_deviation(const Trajectory& tr, const std::function<Vec3(double)>& exact);

}  // namespace geocomplete
