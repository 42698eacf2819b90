#include "geocomplete/presets.hpp"

#include <cmath>

namespace geocomplete {
namespace {

Preset make(const std::string& name, const std::string& summary,
            LieAlgebra3 alg, const Mat3& s, const Vec3& start, double horizon) {
  return Preset{name, summary, std::move(alg), s, start, horizon};
}

std::vector<Preset> build_table() {
  const double r3 = std::sqrt(3.0);
  const double r2 = std::sqrt(2.0);
  std::vector<Preset> t;

  {
    Mat3 s;
    s << -1, 0, 1,
          0, 1, 0,
          1, 0, 0;
    t.push_back(make("example1",
                     "euclidean-motion algebra, metric degenerate on the derived ideal; "
                     "reduces to a planar rotation subsystem (complete)",
                     standard_algebra(AlgebraType::E2), s, Vec3(1, 1, 1), 10.0));
  }
  {
    Mat3 s;
    s << 1, 0, 0,
         0, 0, 0.5,
         0, 0.5, 1;
    t.push_back(make("example2",
                     "sl(2,R) in the hyperbolic frame, non-diagonalizable momentum "
                     "operator with a cyclic block (complete)",
                     sl2_hyperbolic_algebra(), s, Vec3(1, 1, 1), 10.0));
  }
  {
    Mat3 s = Vec3(0.5, 1.0 / 3.0, -1.0).asDiagonal();
    t.push_back(make("example3",
                     "sl(2,R) orthonormal frame, three distinct eigenvalues with a "
                     "positive spectral criterion (complete)",
                     standard_algebra(AlgebraType::SL2R), s, Vec3(1, 1, 1), 10.0));
  }
  {
    Mat3 s = Vec3(1, -1, 2).asDiagonal();
    t.push_back(make("example4",
                     "sl(2,R) orthonormal frame, indefinite diagonal metric whose dual "
                     "field has idempotents; the canonical start blows up at t = 1",
                     standard_algebra(AlgebraType::SL2R), s,
                     Vec3(-1.0 / r3, 1.0, 2.0 / r3), 2.0));
  }
  {
    Mat3 s;
    s << 0.5, 0, 0,
         0, 0, -2,
         0, -2, 0;
    t.push_back(make("example5",
                     "non-unimodular solvable algebra (diagonal ad with weights 1/2 and "
                     "3/2); no idempotents yet the canonical start blows up at 1/sqrt(2)",
                     standard_algebra(AlgebraType::NonUnimodular,
                                      NonUnimodularParams{0.5, 0.0, 0.0, 1.5}),
                     s, Vec3(1.0 / r2, 1.0, 1.0), 1.0));
  }

  t.push_back(make("abelian", "abelian algebra, identity metric (flows are constant)",
                   standard_algebra(AlgebraType::Abelian), Mat3::Identity(),
                   Vec3(1, 1, 1), 10.0));
  t.push_back(make("heisenberg", "Heisenberg algebra, identity metric",
                   standard_algebra(AlgebraType::Heisenberg), Mat3::Identity(),
                   Vec3(1, 1, 1), 10.0));
  t.push_back(make("su2", "su(2), identity metric (bi-invariant)",
                   standard_algebra(AlgebraType::SU2), Mat3::Identity(),
                   Vec3(1, 1, 1), 10.0));
  t.push_back(make("e2-standard", "euclidean-motion algebra, identity metric",
                   standard_algebra(AlgebraType::E2), Mat3::Identity(),
                   Vec3(1, 1, 1), 10.0));
  t.push_back(make("e11-standard", "solvable e(1,1), identity metric",
                   standard_algebra(AlgebraType::E11), Mat3::Identity(),
                   Vec3(1, 1, 1), 10.0));
  t.push_back(make("sl2-orthonormal", "sl(2,R) orthonormal frame, identity metric",
                   standard_algebra(AlgebraType::SL2R), Mat3::Identity(),
                   Vec3(1, 1, 1), 10.0));
  t.push_back(make("sl2-hyperbolic", "sl(2,R) hyperbolic frame, identity metric",
                   sl2_hyperbolic_algebra(), Mat3::Identity(),
                   Vec3(1, 1, 1), 10.0));
  return t;
}

const std::vector<Preset>& table() {
  static const std::vector<Preset> t = build_table();
  return t;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& p : table()) out.push_back(p.name);
  return out;
}

Preset get_preset(const std::string& name) {
  for (const auto& p : table())
    if (p.name == name) return p;
  throw Error(ErrorCode::BadParams, "unknown preset '" + name + "'");
}

}  // namespace geocomplete
