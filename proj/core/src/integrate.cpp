#include "geocomplete/integrate.hpp"

#include <algorithm>
#include <cmath>

namespace geocomplete {

const char* integrate_status_name(IntegrateStatus s) {
  switch (s) {
    case IntegrateStatus::ReachedHorizon: return "ReachedHorizon";
    case IntegrateStatus::BlowUp: return "BlowUp";
    case IntegrateStatus::StepUnderflow: return "StepUnderflow";
  }
  return "Unknown";
}

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

double error_norm(const Vec3& err, const Vec3& y0, const Vec3& y1, double atol, double rtol) {
  double acc = 0.0;
  for (int i = 0; i < 3; ++i) {
    double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    double q = err[i] / sc;
    acc += q * q;
  }
  return std::sqrt(acc / 3.0);
}

double initial_step(const QuadraticField& F, const Vec3& y0, const Vec3& f0, double dir,
                    double atol, double rtol) {
  auto scnorm = [&](const Vec3& v, const Vec3& ref) {
    double acc = 0.0;
    for (int i = 0; i < 3; ++i) {
      double sc = atol + rtol * std::abs(ref[i]);
      acc += (v[i] / sc) * (v[i] / sc);
    }
    return std::sqrt(acc / 3.0);
  };
  double d0 = scnorm(y0, y0);
  double d1 = scnorm(f0, y0);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  Vec3 y1 = y0 + dir * h0 * f0;
  Vec3 f1 = F.evaluate(y1);
  double d2 = scnorm(f1 - f0, y0) / h0;
  double h1 = std::max(d1, d2) <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                        : std::pow(0.01 / std::max(d1, d2), 0.2);
  return std::min(100.0 * h0, h1);
}

bool superlinear(const QuadraticField& F, const Vec3& y, double dir, double growth_min) {
  double n = y.norm();
  if (n <= 0.0) return false;
  double g = dir * y.dot(F.evaluate(y)) / (n * n * n);
  return g > growth_min * F.coeff_scale();
}

}  // namespace

Vec3 Trajectory::at(double time) const {
  if (t.size() < 2) throw Error(ErrorCode::BadOptions, "dense output was not stored");
  auto it = std::upper_bound(t.begin(), t.end(), time,
                             [asc = t.back() > t.front()](double a, double b) {
                               return asc ? a < b : a > b;
                             });
  std::size_t hi = std::min<std::size_t>(std::max<std::ptrdiff_t>(1, it - t.begin()), t.size() - 1);
  std::size_t lo = hi - 1;
  double h = t[hi] - t[lo];
  if (h == 0.0) return y[lo];
  double s = (time - t[lo]) / h;
  double s2 = s * s, s3 = s2 * s;
  double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
  double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  return h00 * y[lo] + h10 * h * f[lo] + h01 * y[hi] + h11 * h * f[hi];
}

Trajectory integrate(const QuadraticField& F, const Vec3& y0, double horizon,
                     const IntegrateOptions& options,
                     const std::vector<QuadraticForm3>& monitors) {
  if (!(horizon != 0.0) || !std::isfinite(horizon))
    throw Error(ErrorCode::BadOptions, "horizon must be finite and nonzero");
  if (options.rtol <= 0 || options.atol <= 0)
    throw Error(ErrorCode::BadOptions, "tolerances must be positive");

  double dir = horizon > 0 ? 1.0 : -1.0;
  double T = std::abs(horizon);
  double h_floor = options.h_min * std::max(1.0, T);

  Trajectory tr;
  tr.drift.assign(monitors.size(), 0.0);
  std::vector<double> q0(monitors.size());
  for (std::size_t m = 0; m < monitors.size(); ++m) q0[m] = monitors[m](y0);

  double t = 0.0;
  Vec3 y = y0;
  Vec3 k1 = F.evaluate(y);
  double h = options.h_init > 0 ? options.h_init
                                : initial_step(F, y, k1, dir, options.atol, options.rtol);
  h = std::min(h, T);

  auto record = [&](double tt, const Vec3& yy, const Vec3& ff) {
    if (options.dense) {
      tr.t.push_back(dir * tt);
      tr.y.push_back(yy);
      tr.f.push_back(ff);  // dy/dt in real time, independent of direction
    }
    tr.max_norm = std::max(tr.max_norm, yy.norm());
    for (std::size_t m = 0; m < monitors.size(); ++m)
      tr.drift[m] = std::max(tr.drift[m], std::abs(monitors[m](yy) - q0[m]));
  };
  record(0.0, y, k1);

  auto finish = [&](IntegrateStatus st) {
    tr.status = st;
    tr.t_final = dir * t;
    tr.y_final = y;
    if (st == IntegrateStatus::BlowUp && options.dense) {
      try {
        tr.blowup_time = estimate_blowup_time(tr.t, tr.y);
      } catch (const Error&) {
      }
    }
    return tr;
  };

  while (t < T) {
    if (tr.accepted + tr.rejected >= options.max_steps)
      return finish(IntegrateStatus::StepUnderflow);
    h = std::min(h, T - t);
    if (h < h_floor) {
      return finish(superlinear(F, y, dir, options.growth_min) ? IntegrateStatus::BlowUp
                                                               : IntegrateStatus::StepUnderflow);
    }
    double hs = dir * h;  // signed step

    Vec3 k2 = F.evaluate(y + hs * (a21 * k1));
    Vec3 k3 = F.evaluate(y + hs * (a31 * k1 + a32 * k2));
    Vec3 k4 = F.evaluate(y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
    Vec3 k5 = F.evaluate(y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    Vec3 k6 = F.evaluate(y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    Vec3 ynew = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    Vec3 k7 = F.evaluate(ynew);
    Vec3 err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double en = error_norm(err, y, ynew, options.atol, options.rtol);
    if (!std::isfinite(en) || !ynew.allFinite()) {
      ++tr.rejected;
      h *= 0.2;
      continue;
    }
    if (en <= 1.0) {
      t += h;
      y = ynew;
      k1 = k7;  // FSAL
      ++tr.accepted;
      record(t, y, k1);
      if (y.norm() >= options.norm_cap) {
        return finish(superlinear(F, y, dir, options.growth_min)
                          ? IntegrateStatus::BlowUp
                          : IntegrateStatus::StepUnderflow);
      }
      double fac = en == 0.0 ? 5.0 : 0.9 * std::pow(en, -0.2);
      h *= std::clamp(fac, 0.2, 5.0);
    } else {
      ++tr.rejected;
      h *= std::clamp(0.9 * std::pow(en, -0.2), 0.1, 1.0);
    }
  }
  return finish(IntegrateStatus::ReachedHorizon);
}

double estimate_blowup_time(const std::vector<double>& t, const std::vector<Vec3>& y) {
  if (t.size() != y.size() || t.empty())
    throw Error(ErrorCode::BadParams, "mismatched trajectory arrays");
  double nmax = 0.0;
  for (const auto& v : y) nmax = std::max(nmax, v.norm());
  if (nmax <= 0.0) throw Error(ErrorCode::InsufficientTail, "trajectory never grew");
  // Final decade: 1/|y| is asymptotically affine in t near an escape.
  double s_t = 0, s_tt = 0, s_v = 0, s_tv = 0;
  int n = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    double nm = y[i].norm();
    if (nm < nmax / 10.0) continue;
    double v = 1.0 / nm;
    s_t += t[i];
    s_tt += t[i] * t[i];
    s_v += v;
    s_tv += t[i] * v;
    ++n;
  }
  if (n < 10) throw Error(ErrorCode::InsufficientTail, "fewer than 10 tail samples");
  double det = n * s_tt - s_t * s_t;
  if (std::abs(det) < 1e-300) throw Error(ErrorCode::InsufficientTail, "degenerate tail fit");
  double b = (n * s_tv - s_t * s_v) / det;
  double a = (s_v - b * s_t) / n;
  if (b == 0.0) throw Error(ErrorCode::InsufficientTail, "tail norm is not growing");
  return -a / b;
}

double max_relative_deviation(const Trajectory& tr, const std::function<Vec3(double)>& exact) {
  double worst = 0.0;
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    Vec3 ex = exact(tr.t[i]);
    worst = std::max(worst, (tr.y[i] - ex).norm() / std::max(1.0, ex.norm()));
  }
  return worst;
}

}  // namespace geocomplete
