// Acceptance harness: one line per criterion, exit code = number of failures.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "geocomplete/completeness.hpp"
#include "geocomplete/flows.hpp"
#include "geocomplete/integrate.hpp"
#include "geocomplete/presets.hpp"

using namespace geocomplete;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

QuadraticField preset_field(const std::string& name) {
  Preset p = get_preset(name);
  return euler_field_dual(p.algebra, QuadraticForm3(p.metric));
}

// Recover the symmetric coefficient matrix of component i from a closed-form
// field by polarization; exact for homogeneous quadratics.
Mat3 coeff_from_closed_form(int i, const std::function<Vec3(const Vec3&)>& f) {
  Mat3 A;
  std::array<Vec3, 3> e = {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
  for (int a = 0; a < 3; ++a) A(a, a) = f(e[a])(i);
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) {
      A(a, b) = A(b, a) = (f(e[a] + e[b])(i) - f(e[a])(i) - f(e[b])(i)) / 2.0;
    }
  return A;
}

bool criterion_field_tables(std::string& why) {
  const auto t0 = Clock::now();
  struct Row {
    const char* preset;
    std::function<Vec3(const Vec3&)> f;
  };
  const std::vector<Row> rows = {
      {"example1", [](const Vec3& x) { return Vec3(x(0) * x(1), x(2) * x(2), -x(1) * x(2)); }},
      {"example2", [](const Vec3& x) {
         return Vec3(4 * x(1) * x(1), -x(0) * x(1), x(0) * x(2) - 4 * x(0) * x(1));
       }},
      {"example3", [](const Vec3& x) { return Vec3(2 * x(1) * x(2), -x(0) * x(2), x(0) * x(1)); }},
      {"example4", [](const Vec3& x) {
         return Vec3(-0.5 * x(1) * x(2), -1.5 * x(0) * x(2), -2.0 * x(0) * x(1));
       }},
      {"example5", [](const Vec3& x) { return Vec3(x(1) * x(2), x(0) * x(1), 3 * x(0) * x(2)); }},
      {"heisenberg", [](const Vec3& x) { return Vec3(0, -x(0) * x(2), x(0) * x(1)); }},
      {"e11-standard", [](const Vec3& x) {
         return Vec3(x(2) * x(2) - x(1) * x(1), x(0) * x(1), -x(0) * x(2));
       }},
      {"sl2-orthonormal", [](const Vec3& x) { return Vec3(2 * x(1) * x(2), -2 * x(0) * x(2), 0); }},
      {"su2", [](const Vec3&) { return Vec3(0, 0, 0); }},
      {"abelian", [](const Vec3&) { return Vec3(0, 0, 0); }},
  };
  double worst = 0;
  for (const auto& row : rows) {
    QuadraticField F = preset_field(row.preset);
    for (int i = 0; i < 3; ++i) {
      const Mat3 want = coeff_from_closed_form(i, row.f);
      worst = std::max(worst, (F.coeff(i) - want).cwiseAbs().maxCoeff());
    }
  }
  const double wall = seconds_since(t0);
  if (worst > 1e-12) {
    why = "coefficient error " + std::to_string(worst);
    return false;
  }
  if (wall > 1.0) {
    why = "took " + std::to_string(wall) + "s (budget 1s)";
    return false;
  }
  return true;
}

bool criterion_example4(std::string& why) {
  QuadraticField F = preset_field("example4");
  const auto idems = find_idempotents(F);
  if (idems.size() != 4) {
    why = "expected 4 idempotents, found " + std::to_string(idems.size());
    return false;
  }
  const double s = 1.0 / std::sqrt(3.0);
  const std::array<Vec3, 4> frozen = {Vec3(-s, 1, 2 * s), Vec3(s, -1, 2 * s),
                                      Vec3(s, 1, -2 * s), Vec3(-s, -1, -2 * s)};
  for (const Vec3& want : frozen) {
    double best_angle = 1e9, best_dist = 1e9;
    for (const auto& id : idems) {
      best_angle = std::min(
          best_angle, (id.point.normalized() - want.normalized()).norm());
      best_dist = std::min(best_dist, (id.point - want).norm() / want.norm());
    }
    if (best_angle > 1e-9 || best_dist > 1e-9) {
      why = "idempotent mismatch (angular " + std::to_string(best_angle) + ")";
      return false;
    }
  }

  Preset p = get_preset("example4");
  Trajectory tr = integrate(preset_field("example4"), p.start, p.suggested_horizon);
  if (tr.status != IntegrateStatus::BlowUp || !tr.blowup_time) {
    why = "expected a certified blow-up from the canonical start";
    return false;
  }
  if (std::abs(*tr.blowup_time - 1.0) > 1e-3) {
    why = "escape time " + std::to_string(*tr.blowup_time) + " (expected 1.0)";
    return false;
  }
  return true;
}

bool criterion_example5(std::string& why) {
  Preset p = get_preset("example5");
  QuadraticField F = preset_field("example5");
  if (!find_idempotents(F).empty()) {
    why = "field must have no idempotents";
    return false;
  }

  const double r2 = std::sqrt(2.0);
  Trajectory tr = integrate(F, p.start, 1.0);
  if (tr.status != IntegrateStatus::BlowUp || !tr.blowup_time) {
    why = "expected a certified blow-up";
    return false;
  }
  if (std::abs(*tr.blowup_time - 1.0 / r2) > 1e-3) {
    why = "escape time " + std::to_string(*tr.blowup_time) + " (expected 0.70711)";
    return false;
  }

  Trajectory arc = integrate(F, p.start, 0.6);
  const double err = max_relative_deviation(arc, [&](double t) {
    const double m = 1.0 - r2 * t;
    return Vec3((1.0 / r2) / m, std::pow(m, -0.5), std::pow(m, -1.5));
  });
  if (arc.status != IntegrateStatus::ReachedHorizon || err > 1e-6) {
    why = "closed-form deviation " + std::to_string(err) + " on [0, 0.6]";
    return false;
  }

  CompletenessReport rep = decide(p.algebra, QuadraticForm3(p.metric));
  if (rep.verdict != Verdict::Undecided || rep.reason != Reason::NecessaryOnly) {
    why = std::string("verdict ") + verdict_name(rep.verdict);
    return false;
  }
  return true;
}

bool criterion_example3_conservation(std::string& why) {
  Preset p = get_preset("example3");
  QuadraticForm3 metric(p.metric);
  QuadraticField F = euler_field_dual(p.algebra, metric);
  FirstIntegralBasis basis = quadratic_first_integrals(F);
  if (basis.dimension() != 2) {
    why = "first-integral dimension " + std::to_string(basis.dimension());
    return false;
  }
  std::vector<Mat3> span;
  for (const auto& q : basis.forms) span.push_back(q.m);
  auto witness = definite_combination(span);
  if (!witness || witness->min_eigenvalue <= 0) {
    why = "no definite conserved combination found";
    return false;
  }

  std::vector<QuadraticForm3> monitors;
  for (const auto& q : basis.forms) monitors.push_back(q);
  IntegrateOptions opt;
  opt.dense = false;
  opt.rtol = 1e-12;
  opt.atol = 1e-14;
  std::mt19937 rng(2026);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 20; ++k) {
    Vec3 y0(u(rng), u(rng), u(rng));
    if (y0.norm() < 0.1) y0 += Vec3(0.5, 0.5, 0.5);
    Trajectory tr = integrate(F, y0, 1000.0, opt, monitors);
    if (tr.status == IntegrateStatus::BlowUp) {
      why = "bounded orbit flagged as blow-up";
      return false;
    }
    for (std::size_t m = 0; m < monitors.size(); ++m) {
      const double rel = tr.drift[m] / (1.0 + std::abs(monitors[m](y0)));
      if (rel > 1e-8) {
        why = "drift " + std::to_string(rel) + " on start " + std::to_string(k);
        return false;
      }
    }
  }
  return true;
}

bool criterion_cyclic_and_planar(std::string& why) {
  Preset p2 = get_preset("example2");
  CompletenessReport r2 = decide(p2.algebra, QuadraticForm3(p2.metric));
  if (r2.verdict != Verdict::Complete || !r2.shape ||
      *r2.shape != SpectralShape::OneDoubleOneSimple_Cyclic) {
    why = "example2 must be complete via the cyclic branch";
    return false;
  }
  if (!r2.criterion_value || std::abs(*r2.criterion_value - 1.0) > 1e-9) {
    why = "example2 criterion value off";
    return false;
  }

  Preset p1 = get_preset("example1");
  CompletenessReport r1 = decide(p1.algebra, QuadraticForm3(p1.metric));
  if (r1.verdict != Verdict::Complete || !r1.planar) {
    why = "example1 must be complete with a planar certificate";
    return false;
  }
  if (std::abs(r1.planar->discriminant + 4.0) > 1e-9) {
    why = "planar discriminant " + std::to_string(r1.planar->discriminant);
    return false;
  }
  return true;
}

bool criterion_cross_validation(std::string& why) {
  const auto t0 = Clock::now();
  std::mt19937 rng(424242);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const std::array<LieAlgebra3, 2> frames = {standard_algebra(AlgebraType::SL2R),
                                             sl2_hyperbolic_algebra()};
  int checked = 0;
  for (const auto& alg : frames) {
    int done = 0;
    while (done < 200) {
      Mat3 m;
      for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) m(i, j) = m(j, i) = u(rng);
      QuadraticForm3 metric(m);
      if (signature(metric).zero > 0) continue;
      CompletenessReport rep;
      try {
        rep = decide(alg, metric);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::AmbiguousSpectrum) continue;
        why = std::string("decide failed: ") + e.what();
        return false;
      }
      if (rep.verdict == Verdict::Undecided) continue;  // tolerance-band case

      const QuadraticField F = euler_field_dual(alg, metric);
      const bool has_idem = !find_idempotents(F).empty();
      const bool incomplete = rep.verdict == Verdict::Incomplete;
      if (has_idem != incomplete) {
        why = "criterion/search disagreement after " + std::to_string(checked) +
              " agreements";
        return false;
      }
      ++done;
      ++checked;
    }
  }
  const double wall = seconds_since(t0);
  if (wall > 60.0) {
    why = "took " + std::to_string(wall) + "s (budget 60s)";
    return false;
  }
  return checked == 400;
}

bool criterion_random_idempotents(std::string& why) {
  std::mt19937 rng(777);
  std::uniform_real_distribution<double> u(-1, 1);
  auto random_field = [&](int dim) {
    std::array<Mat3, 3> c;
    for (auto& m : c) m.setZero();
    const int n = dim;
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) c[i](a, b) = c[i](b, a) = u(rng);
    return QuadraticField(dim, c);
  };

  for (int dim : {3, 2}) {
    int with_idempotents = 0, attempts = 0;
    while (with_idempotents < 500) {
      if (++attempts > 2000) {
        why = "dim " + std::to_string(dim) + ": only " +
              std::to_string(with_idempotents) + " fields with idempotents in " +
              std::to_string(attempts) + " attempts";
        return false;
      }
      QuadraticField F = random_field(dim);
      const auto idems = find_idempotents(F);
      if (idems.empty()) continue;
      for (const auto& id : idems) {
        const double bound = 1e-8 * (1 + id.point.squaredNorm());
        const double res = (F.evaluate(id.point) - id.point).norm();
        if (res > bound) {
          why = "residual " + std::to_string(res) + " above " + std::to_string(bound);
          return false;
        }
      }
      ++with_idempotents;
    }
  }
  return true;
}

bool criterion_structural_survival(std::string& why) {
  std::mt19937 rng(1313);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  IntegrateOptions opt;
  opt.dense = false;
  const std::array<AlgebraType, 4> types = {AlgebraType::Abelian,
                                            AlgebraType::Heisenberg,
                                            AlgebraType::SU2, AlgebraType::E2};
  for (AlgebraType t : types) {
    LieAlgebra3 alg = standard_algebra(t);
    int metrics_done = 0;
    while (metrics_done < 50) {
      Mat3 m;
      for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) m(i, j) = m(j, i) = u(rng);
      QuadraticForm3 metric(m);
      if (signature(metric).zero > 0) continue;
      try {
        QuadraticField F = euler_field_dual(alg, metric);
        for (int s = 0; s < 5; ++s) {
          Vec3 y0(u(rng), u(rng), u(rng));
          Trajectory tr = integrate(F, y0, 100.0, opt);
          if (tr.status == IntegrateStatus::BlowUp) {
            why = std::string(algebra_type_name(t)) +
                  " metric produced a blow-up verdict on a complete flow";
            return false;
          }
        }
      } catch (const Error& e) {
        if (e.code() == ErrorCode::IllConditionedMetric) continue;
        throw;
      }
      ++metrics_done;
    }
  }
  return true;
}

std::string capture(const std::string& cmd, int& exit_code) {
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) {
    exit_code = -1;
    return {};
  }
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  const int st = pclose(p);
  exit_code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return out;
}

bool criterion_deterministic_analysis(std::string& why) {
  const std::string cmd = std::string(GEOCOMPLETE_BIN) +
                          " analyze --preset example3 --json --seed 12345 2>/dev/null";
  int rc1 = 0, rc2 = 0;
  const std::string a = capture(cmd, rc1);
  const std::string b = capture(cmd, rc2);
  if (rc1 != 0 || rc2 != 0) {
    why = "analyze exited with " + std::to_string(rc1) + "/" + std::to_string(rc2);
    return false;
  }
  if (a.empty() || a != b) {
    why = "reruns differ (" + std::to_string(a.size()) + " vs " +
          std::to_string(b.size()) + " bytes)";
    return false;
  }
  return true;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    bool (*fn)(std::string&);
  };
  const std::vector<Criterion> criteria = {
      {"dual-field coefficients match the frozen closed forms", criterion_field_tables},
      {"example4 idempotent catalog and unit escape time", criterion_example4},
      {"example5 idempotent-free blow-up and closed form", criterion_example5},
      {"example3 conserved pair bounds long integrations", criterion_example3_conservation},
      {"example2 cyclic branch and example1 planar discriminant", criterion_cyclic_and_planar},
      {"spectral criterion agrees with idempotent search on 400 random metrics",
       criterion_cross_validation},
      {"random fields: every reported idempotent validates", criterion_random_idempotents},
      {"structurally complete types survive 1000 integrations", criterion_structural_survival},
      {"analyze --json reruns are byte-identical", criterion_deterministic_analysis},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    std::string why;
    const auto t0 = Clock::now();
    bool ok = false;
    try {
      ok = criteria[i].fn(why);
    } catch (const std::exception& e) {
      why = std::string("exception: ") + e.what();
    }
    const double wall = seconds_since(t0);
    if (ok) {
      std::printf("[%zu/9] PASS  %s (%.2fs)\n", i + 1, criteria[i].name, wall);
    } else {
      std::printf("[%zu/9] FAIL  %s: %s (%.2fs)\n", i + 1, criteria[i].name,
                  why.c_str(), wall);
      ++failures;
    }
    std::fflush(stdout);
  }
  if (failures == 0)
    std::printf("all acceptance criteria hold\n");
  else
    std::printf("%d criterion(s) failing\n", failures);
  return failures;
}
