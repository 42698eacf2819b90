#pragma once

#include <string>
#include <vector>

#include "geocomplete/lie_algebra.hpp"
#include "geocomplete/types.hpp"

namespace geocomplete {

/// A named (algebra, metric) pair with a canonical starting momentum for the
/// dual flow and a horizon that comfortably covers the interesting dynamics
/// (past the blow-up time for the incomplete ones).
struct Preset {
  std::string name;
  std::string summary;
  LieAlgebra3 algebra;
  Mat3 metric;  // on the algebra, basis of `algebra`
  Vec3 start;
  double suggested_horizon;
};

std::vector<std::string> preset_names();

/// Throws Error(ErrorCode::BadParams) for an unknown name.
Preset get_preset(const std::string& name);

}  // namespace geocomplete
