#include "geocomplete/problem_spec.hpp"

#include <cmath>
#include <set>
#include <utility>

#include "json.hpp"

namespace geocomplete {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) {
  throw Error(ErrorCode::ParseError, what);
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) { known = true; break; }
    if (!known) fail("unknown key '" + it.key() + "' in " + where);
  }
}

double get_number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where + " must be a number");
  return v.get<double>();
}

Vec3 get_vec3(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 3) fail(where + " must be an array of 3 numbers");
  Vec3 out;
  for (int i = 0; i < 3; ++i) out(i) = get_number(v[i], where);
  return out;
}

Mat3 get_mat3(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 3) fail(where + " must be a 3x3 array");
  Mat3 out;
  for (int i = 0; i < 3; ++i) out.row(i) = get_vec3(v[i], where + " row").transpose();
  return out;
}

LieAlgebra3 algebra_from_preset(const json& obj) {
  check_keys(obj, "algebra", {"preset", "params"});
  const std::string name = obj.at("preset").get<std::string>();
  if (name == "nonunimodular") {
    if (!obj.contains("params")) fail("algebra preset 'nonunimodular' needs \"params\"");
    if (!obj["params"].is_array() || obj["params"].size() != 4)
      fail("algebra params must be [alpha, beta, gamma, delta]");
    NonUnimodularParams p{get_number(obj["params"][0], "params"),
                          get_number(obj["params"][1], "params"),
                          get_number(obj["params"][2], "params"),
                          get_number(obj["params"][3], "params")};
    return standard_algebra(AlgebraType::NonUnimodular, p);
  }
  if (obj.contains("params")) fail("algebra params only apply to 'nonunimodular'");
  if (name == "abelian") return standard_algebra(AlgebraType::Abelian);
  if (name == "heisenberg") return standard_algebra(AlgebraType::Heisenberg);
  if (name == "su2") return standard_algebra(AlgebraType::SU2);
  if (name == "e2") return standard_algebra(AlgebraType::E2);
  if (name == "e11") return standard_algebra(AlgebraType::E11);
  if (name == "sl2-orthonormal") return standard_algebra(AlgebraType::SL2R);
  if (name == "sl2-hyperbolic") return sl2_hyperbolic_algebra();
  fail("unknown algebra preset '" + name + "'");
}

LieAlgebra3 algebra_from_brackets(const json& list) {
  if (!list.is_array()) fail("algebra brackets must be an array");
  std::array<Mat3, 3> c;
  for (auto& m : c) m.setZero();
  std::set<std::pair<int, int>> seen;
  for (const auto& entry : list) {
    if (!entry.is_object()) fail("each bracket must be an object");
    check_keys(entry, "bracket", {"i", "j", "result"});
    if (!entry.contains("i") || !entry.contains("j") || !entry.contains("result"))
      fail("bracket needs keys i, j, result");
    if (!entry["i"].is_number_integer() || !entry["j"].is_number_integer())
      fail("bracket indices must be integers");
    const int i = entry["i"].get<int>(), j = entry["j"].get<int>();
    if (i < 1 || i > 3 || j < 1 || j > 3) fail("bracket indices must be in 1..3");
    if (i == j) fail("bracket indices must differ");
    auto key = std::minmax(i, j);
    if (!seen.insert(key).second)
      fail("duplicate bracket for pair (" + std::to_string(key.first) + "," +
           std::to_string(key.second) + ")");
    const Vec3 r = get_vec3(entry["result"], "bracket result");
    for (int k = 0; k < 3; ++k) {
      c[k](i - 1, j - 1) = r(k);
      c[k](j - 1, i - 1) = -r(k);
    }
  }
  return LieAlgebra3(c);
}

void apply_options(const json& obj, ProblemSpec& spec) {
  check_keys(obj, "options",
             {"rtol", "atol", "norm_cap", "h_min", "h_init", "max_steps", "dense",
              "growth_min", "horizon", "start", "seed", "crit_tol", "eig_tol",
              "sphere_samples", "max_seeds"});
  auto num = [&](const char* k, double& slot) {
    if (obj.contains(k)) {
      slot = get_number(obj[k], std::string("options.") + k);
      if (!std::isfinite(slot)) fail(std::string("options.") + k + " must be finite");
    }
  };
  num("rtol", spec.integrate.rtol);
  num("atol", spec.integrate.atol);
  num("norm_cap", spec.integrate.norm_cap);
  num("h_min", spec.integrate.h_min);
  num("h_init", spec.integrate.h_init);
  num("growth_min", spec.integrate.growth_min);
  num("horizon", spec.horizon);
  num("crit_tol", spec.decide.crit_tol);
  num("eig_tol", spec.decide.eig_tol);
  if (obj.contains("max_steps")) {
    if (!obj["max_steps"].is_number_integer() || obj["max_steps"].get<long long>() <= 0)
      fail("options.max_steps must be a positive integer");
    spec.integrate.max_steps = obj["max_steps"].get<std::size_t>();
  }
  if (obj.contains("dense")) {
    if (!obj["dense"].is_boolean()) fail("options.dense must be a boolean");
    spec.integrate.dense = obj["dense"].get<bool>();
  }
  if (obj.contains("start")) spec.start = get_vec3(obj["start"], "options.start");
  if (obj.contains("seed")) {
    if (!obj["seed"].is_number_integer()) fail("options.seed must be an integer");
    spec.decide.seed = obj["seed"].get<unsigned>();
  }
  if (obj.contains("sphere_samples")) {
    if (!obj["sphere_samples"].is_number_integer() ||
        obj["sphere_samples"].get<long long>() < 8)
      fail("options.sphere_samples must be an integer >= 8");
    spec.decide.search.sphere_samples = obj["sphere_samples"].get<std::size_t>();
  }
  if (obj.contains("max_seeds")) {
    if (!obj["max_seeds"].is_number_integer() || obj["max_seeds"].get<long long>() < 1)
      fail("options.max_seeds must be a positive integer");
    spec.decide.search.max_seeds = obj["max_seeds"].get<std::size_t>();
  }
  if (spec.horizon <= 0) fail("options.horizon must be positive");
}

}  // namespace

ProblemSpec parse_problem(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) fail("top level must be an object");
  check_keys(root, "top level", {"name", "algebra", "metric", "options"});
  if (!root.contains("algebra")) fail("missing \"algebra\"");
  if (!root.contains("metric")) fail("missing \"metric\"");

  ProblemSpec spec;
  if (root.contains("name")) {
    if (!root["name"].is_string()) fail("name must be a string");
    spec.name = root["name"].get<std::string>();
  }

  const json& alg = root["algebra"];
  if (!alg.is_object()) fail("algebra must be an object");
  if (alg.contains("preset") && alg.contains("brackets"))
    fail("algebra takes either \"preset\" or \"brackets\", not both");
  if (alg.contains("preset")) {
    if (!alg["preset"].is_string()) fail("algebra preset must be a string");
    spec.algebra = algebra_from_preset(alg);
  } else if (alg.contains("brackets")) {
    check_keys(alg, "algebra", {"brackets"});
    spec.algebra = algebra_from_brackets(alg["brackets"]);
  } else {
    fail("algebra needs \"preset\" or \"brackets\"");
  }

  const json& met = root["metric"];
  if (!met.is_object()) fail("metric must be an object");
  check_keys(met, "metric", {"frame", "matrix"});
  if (!met.contains("matrix")) fail("metric needs \"matrix\"");
  Mat3 m = get_mat3(met["matrix"], "metric matrix");
  std::string frame = "algebra";
  if (met.contains("frame")) {
    if (!met["frame"].is_string()) fail("metric frame must be a string");
    frame = met["frame"].get<std::string>();
    if (frame != "algebra" && frame != "dual-energy")
      fail("metric frame must be \"algebra\" or \"dual-energy\"");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale)
    spec.warnings.push_back("metric matrix symmetrized (asymmetry " +
                            std::to_string(asym) + ")");
  m = ((m + m.transpose()) / 2).eval();
  if (frame == "dual-energy") {
    Eigen::FullPivLU<Mat3> lu(m);
    if (!lu.isInvertible())
      throw Error(ErrorCode::DegenerateMetric, "dual-energy matrix is singular");
    m = lu.inverse();
    m = ((m + m.transpose()) / 2).eval();
  }
  spec.metric = m;

  if (root.contains("options")) {
    if (!root["options"].is_object()) fail("options must be an object");
    apply_options(root["options"], spec);
  }
  return spec;
}

}  // namespace geocomplete
