#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "geocomplete/flows.hpp"
#include "geocomplete/integrate.hpp"
#include "geocomplete/metric_operator.hpp"
#include "geocomplete/presets.hpp"
#include "geocomplete/problem_spec.hpp"
#include "report.hpp"

namespace gc = geocomplete;
using gc::cli::ordered_json;

namespace {

struct InputArgs {
  std::string input;
  std::string preset;
  bool json = false;
  long long seed = -1;  // negative: not set on the command line
};

void add_input_options(CLI::App* cmd, InputArgs& a) {
  auto* in = cmd->add_option("-i,--input", a.input,
                             "problem spec JSON file ('-' reads stdin)");
  auto* pr = cmd->add_option("-p,--preset", a.preset, "built-in preset name");
  in->excludes(pr);
  pr->excludes(in);
  cmd->add_flag("--json", a.json, "machine-readable JSON on stdout");
  cmd->add_option("--seed", a.seed,
                  "seed for randomized searches (overrides GEOCOMPLETE_SEED)");
}

std::string read_all(const std::string& path) {
  std::stringstream ss;
  if (path == "-") {
    ss << std::cin.rdbuf();
  } else {
    std::ifstream f(path);
    if (!f) throw gc::Error(gc::ErrorCode::BadOptions, "cannot open '" + path + "'");
    ss << f.rdbuf();
  }
  return ss.str();
}

// Seed precedence: spec file < GEOCOMPLETE_SEED < --seed.
void apply_seed(gc::ProblemSpec& spec, long long flag_seed) {
  if (const char* env = std::getenv("GEOCOMPLETE_SEED")) {
    char* end = nullptr;
    unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0')
      throw gc::Error(gc::ErrorCode::BadOptions,
                      "GEOCOMPLETE_SEED must be an unsigned integer");
    spec.decide.seed = static_cast<unsigned>(v);
  }
  if (flag_seed >= 0) spec.decide.seed = static_cast<unsigned>(flag_seed);
}

gc::ProblemSpec spec_from_preset(const gc::Preset& p) {
  gc::ProblemSpec spec;
  spec.name = p.name;
  spec.algebra = p.algebra;
  spec.metric = p.metric;
  spec.start = p.start;
  spec.horizon = p.suggested_horizon;
  return spec;
}

gc::ProblemSpec load_problem(const InputArgs& a) {
  gc::ProblemSpec spec;
  if (!a.preset.empty())
    spec = spec_from_preset(gc::get_preset(a.preset));
  else if (!a.input.empty())
    spec = gc::parse_problem(read_all(a.input));
  else
    throw gc::Error(gc::ErrorCode::BadOptions, "one of --input / --preset is required");
  apply_seed(spec, a.seed);
  for (const auto& w : spec.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  return spec;
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string g12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string vec_text(const gc::Vec3& v) {
  return "(" + g12(v(0)) + ", " + g12(v(1)) + ", " + g12(v(2)) + ")";
}

void print_json(const ordered_json& j) { std::cout << j.dump(2) << "\n"; }

int run_classify(const InputArgs& a) {
  const gc::ProblemSpec spec = load_problem(a);
  const gc::QuadraticForm3 metric(spec.metric, gc::FormSpace::Algebra);
  const gc::Classification cls = gc::classify(spec.algebra);
  const gc::Signature sig = gc::signature(metric);

  // The momentum operator needs a nondegenerate Killing form; skip it for the
  // solvable types rather than failing.
  std::optional<gc::MetricOperatorU> u;
  try {
    u = gc::u_from_metric(spec.algebra, metric, spec.decide.eig_tol);
  } catch (const gc::Error& e) {
    if (e.code() != gc::ErrorCode::DegenerateKilling) throw;
  }

  if (a.json) {
    ordered_json out;
    out["name"] = spec.name;
    out["algebra"] = gc::cli::classification_json(cls);
    ordered_json m;
    m["matrix"] = gc::cli::mat3_json(spec.metric);
    m["signature"] = ordered_json::array({sig.positive, sig.negative, sig.zero});
    out["metric"] = m;
    if (u) {
      ordered_json op;
      op["matrix"] = gc::cli::mat3_json(u->matrix);
      op["shape"] = gc::spectral_shape_name(u->shape);
      op["eigenvalues"] = u->real_eigenvalues;
      op["multiplicities"] = u->multiplicities;
      op["has_complex_pair"] = u->has_complex_pair;
      if (u->has_complex_pair)
        op["complex_eigenvalue"] = ordered_json::array(
            {u->complex_eigenvalue.real(), u->complex_eigenvalue.imag()});
      out["momentum_operator"] = op;
    }
    out["warnings"] = spec.warnings;
    print_json(out);
  } else {
    std::printf("name: %s\n", spec.name.c_str());
    std::printf("algebra: %s (%s)\n", gc::algebra_type_name(cls.type),
                cls.milnor ? "unimodular" : "non-unimodular");
    if (cls.milnor)
      std::printf("milnor alphas: %s  signs: (%+d, %+d, %+d)\n",
                  vec_text(cls.milnor->alphas).c_str(), cls.milnor->signs[0],
                  cls.milnor->signs[1], cls.milnor->signs[2]);
    else
      std::printf("trace vector: %s\n", vec_text(cls.trace_vector).c_str());
    std::printf("metric signature: (%d, %d, %d)\n", sig.positive, sig.negative,
                sig.zero);
    if (u) {
      std::printf("momentum operator shape: %s\n", gc::spectral_shape_name(u->shape));
      std::string eigs;
      for (std::size_t i = 0; i < u->real_eigenvalues.size(); ++i) {
        if (i) eigs += ", ";
        eigs += g12(u->real_eigenvalues[i]) + " (x" +
                std::to_string(u->multiplicities[i]) + ")";
      }
      if (u->has_complex_pair)
        eigs += (eigs.empty() ? "" : ", ") + std::string("complex pair ") +
                g12(u->complex_eigenvalue.real()) + " +/- " +
                g12(u->complex_eigenvalue.imag()) + "i";
      std::printf("eigenvalues: %s\n", eigs.c_str());
    }
  }
  return 0;
}

int run_analyze(const InputArgs& a) {
  const gc::ProblemSpec spec = load_problem(a);
  const gc::QuadraticForm3 metric(spec.metric, gc::FormSpace::Algebra);
  const gc::CompletenessReport rep = gc::decide(spec.algebra, metric, spec.decide);

  if (a.json) {
    print_json(gc::cli::analyze_json(spec, rep));
  } else {
    std::printf("name: %s\n", spec.name.c_str());
    std::printf("algebra: %s\n", gc::algebra_type_name(rep.classification.type));
    std::printf("verdict: %s (%s)\n", gc::verdict_name(rep.verdict),
                gc::reason_name(rep.reason));
    if (!rep.detail.empty()) std::printf("detail: %s\n", rep.detail.c_str());
    if (rep.shape)
      std::printf("spectral shape: %s\n", gc::spectral_shape_name(*rep.shape));
    if (rep.criterion_value)
      std::printf("criterion value: %s\n", g12(*rep.criterion_value).c_str());
    if (rep.idempotents.empty()) {
      std::printf("idempotents: none\n");
    } else {
      std::printf("idempotents (%zu):\n", rep.idempotents.size());
      for (const auto& id : rep.idempotents)
        std::printf("  %s  residual %.2e\n", vec_text(id.point).c_str(), id.residual);
    }
    if (rep.witness)
      std::printf("witness: %s  residual %.2e\n", vec_text(*rep.witness).c_str(),
                  rep.witness_residual);
  }
  return gc::cli::verdict_exit(rep.verdict);
}

int run_integrate(const InputArgs& a, std::optional<double> horizon,
                  const std::vector<double>& start, bool backward,
                  const std::string& csv) {
  gc::ProblemSpec spec = load_problem(a);
  if (horizon) spec.horizon = *horizon;
  if (!start.empty()) {
    if (start.size() != 3)
      throw gc::Error(gc::ErrorCode::BadOptions, "--start needs three components");
    spec.start = gc::Vec3(start[0], start[1], start[2]);
  }
  if (spec.horizon <= 0)
    throw gc::Error(gc::ErrorCode::BadOptions, "--horizon must be positive");
  if (a.json && csv == "-")
    throw gc::Error(gc::ErrorCode::BadOptions, "--json conflicts with --csv -");
  if (!csv.empty()) spec.integrate.dense = true;

  const gc::QuadraticForm3 metric(spec.metric, gc::FormSpace::Algebra);
  const gc::QuadraticField field = gc::euler_field_dual(spec.algebra, metric);
  const gc::QuadraticForm3 energy = gc::dual_energy(metric);
  const double signed_horizon = backward ? -spec.horizon : spec.horizon;
  const gc::Trajectory tr =
      gc::integrate(field, spec.start, signed_horizon, spec.integrate, {energy});

  if (!csv.empty()) {
    std::ofstream file;
    std::ostream* os = &std::cout;
    if (csv != "-") {
      file.open(csv, std::ios::binary);
      if (!file)
        throw gc::Error(gc::ErrorCode::BadOptions, "cannot write '" + csv + "'");
      os = &file;
    }
    *os << "t,x1,x2,x3,energy\n";
    for (std::size_t k = 0; k < tr.t.size(); ++k) {
      const gc::Vec3& y = tr.y[k];
      *os << g17(tr.t[k]) << ',' << g17(y(0)) << ',' << g17(y(1)) << ','
          << g17(y(2)) << ',' << g17(energy(y)) << '\n';
    }
  }

  std::ostream& info = (csv == "-") ? std::cerr : std::cout;
  if (a.json) {
    ordered_json out;
    out["name"] = spec.name;
    out["status"] = gc::integrate_status_name(tr.status);
    out["t_final"] = tr.t_final;
    out["y_final"] = gc::cli::vec3_json(tr.y_final);
    out["max_norm"] = tr.max_norm;
    out["accepted"] = tr.accepted;
    out["rejected"] = tr.rejected;
    out["energy_drift"] = tr.drift.empty() ? 0.0 : tr.drift[0];
    if (tr.blowup_time) out["blowup_time"] = *tr.blowup_time;
    print_json(out);
  } else {
    info << "status: " << gc::integrate_status_name(tr.status) << "\n";
    info << "t_final: " << g12(tr.t_final) << "  |y|_max: " << g12(tr.max_norm)
         << "  steps: " << tr.accepted << " accepted, " << tr.rejected
         << " rejected\n";
    info << "energy drift: " << (tr.drift.empty() ? "n/a" : g12(tr.drift[0])) << "\n";
    if (tr.blowup_time) info << "estimated blow-up time: " << g12(*tr.blowup_time) << "\n";
  }

  switch (tr.status) {
    case gc::IntegrateStatus::ReachedHorizon: return 0;
    case gc::IntegrateStatus::BlowUp: return 10;
    case gc::IntegrateStatus::StepUnderflow: return 5;
  }
  return 5;
}

int run_first_integrals(const InputArgs& a) {
  const gc::ProblemSpec spec = load_problem(a);
  const gc::QuadraticForm3 metric(spec.metric, gc::FormSpace::Algebra);
  const gc::QuadraticField field = gc::euler_field_dual(spec.algebra, metric);
  const gc::FirstIntegralBasis basis = gc::quadratic_first_integrals(field);

  std::vector<gc::Mat3> span;
  for (const auto& q : basis.forms) span.push_back(q.m);
  const auto definite =
      gc::definite_combination(span, field.dim(), spec.decide.seed);

  if (a.json) {
    ordered_json out;
    out["name"] = spec.name;
    out["dimension"] = basis.dimension();
    ordered_json forms = ordered_json::array();
    for (const auto& q : basis.forms) forms.push_back(gc::cli::mat3_json(q.m));
    out["forms"] = forms;
    out["residuals"] = basis.residuals;
    out["singular_values"] = basis.singular_values;
    if (definite) {
      ordered_json d;
      d["coefficients"] = definite->coeffs;
      d["form"] = gc::cli::mat3_json(definite->form);
      d["min_eigenvalue"] = definite->min_eigenvalue;
      out["definite_combination"] = d;
    }
    print_json(out);
  } else {
    std::printf("name: %s\n", spec.name.c_str());
    std::printf("quadratic first integrals: dimension %d\n", basis.dimension());
    for (int k = 0; k < basis.dimension(); ++k) {
      const gc::Mat3& m = basis.forms[k].m;
      std::printf("  Q%d residual %.2e\n", k + 1, basis.residuals[k]);
      for (int i = 0; i < 3; ++i)
        std::printf("    [%s, %s, %s]\n", g12(m(i, 0)).c_str(), g12(m(i, 1)).c_str(),
                    g12(m(i, 2)).c_str());
    }
    if (definite)
      std::printf("definite combination found (min eigenvalue %s)\n",
                  g12(definite->min_eigenvalue).c_str());
    else
      std::printf("no definite combination found\n");
  }
  return 0;
}

int run_idempotents(const InputArgs& a) {
  const gc::ProblemSpec spec = load_problem(a);
  const gc::QuadraticForm3 metric(spec.metric, gc::FormSpace::Algebra);
  const gc::QuadraticField field = gc::euler_field_dual(spec.algebra, metric);
  const auto dirs = gc::invariant_directions(field, spec.decide.search);
  const auto idems = gc::find_idempotents(field, spec.decide.search);

  if (a.json) {
    ordered_json out;
    out["name"] = spec.name;
    ordered_json dj = ordered_json::array();
    for (const auto& d : dirs) {
      ordered_json e;
      e["direction"] = gc::cli::vec3_json(d.direction);
      e["rho"] = d.rho;
      e["zero_direction"] = d.is_zero_direction;
      e["residual"] = d.residual;
      dj.push_back(e);
    }
    out["invariant_directions"] = dj;
    ordered_json ij = ordered_json::array();
    for (const auto& id : idems) {
      ordered_json e;
      e["point"] = gc::cli::vec3_json(id.point);
      e["residual"] = id.residual;
      ij.push_back(e);
    }
    out["idempotents"] = ij;
    print_json(out);
  } else {
    std::printf("name: %s\n", spec.name.c_str());
    std::printf("invariant directions (%zu):\n", dirs.size());
    for (const auto& d : dirs)
      std::printf("  %s  rho %s%s\n", vec_text(d.direction).c_str(),
                  g12(d.rho).c_str(), d.is_zero_direction ? "  (equilibrium ray)" : "");
    std::printf("idempotents (%zu):\n", idems.size());
    for (const auto& id : idems)
      std::printf("  %s  residual %.2e\n", vec_text(id.point).c_str(), id.residual);
  }
  return 0;
}

ordered_json preset_spec_json(const gc::Preset& p) {
  ordered_json out;
  out["name"] = p.name;
  ordered_json brackets = ordered_json::array();
  const auto& c = p.algebra.structure_constants();
  const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (const auto& ij : pairs) {
    const gc::Vec3 r(c[0](ij[0], ij[1]), c[1](ij[0], ij[1]), c[2](ij[0], ij[1]));
    if (r.cwiseAbs().maxCoeff() == 0.0) continue;
    ordered_json b;
    b["i"] = ij[0] + 1;
    b["j"] = ij[1] + 1;
    b["result"] = gc::cli::vec3_json(r);
    brackets.push_back(b);
  }
  ordered_json alg;
  alg["brackets"] = brackets;
  out["algebra"] = alg;
  ordered_json met;
  met["frame"] = "algebra";
  met["matrix"] = gc::cli::mat3_json(p.metric);
  out["metric"] = met;
  ordered_json opts;
  opts["start"] = gc::cli::vec3_json(p.start);
  opts["horizon"] = p.suggested_horizon;
  out["options"] = opts;
  return out;
}

int run_preset(const std::string& name, bool json) {
  if (!name.empty()) {
    print_json(preset_spec_json(gc::get_preset(name)));
    return 0;
  }
  if (json) {
    ordered_json out = ordered_json::array();
    for (const auto& n : gc::preset_names()) {
      const gc::Preset p = gc::get_preset(n);
      ordered_json e;
      e["name"] = p.name;
      e["summary"] = p.summary;
      out.push_back(e);
    }
    print_json(out);
  } else {
    for (const auto& n : gc::preset_names()) {
      const gc::Preset p = gc::get_preset(n);
      std::printf("%-16s %s\n", p.name.c_str(), p.summary.c_str());
    }
  }
  return 0;
}

struct BatchResult {
  std::string file;
  std::optional<gc::ErrorCode> error;
  std::string message;
  ordered_json json;
  gc::Verdict verdict = gc::Verdict::Undecided;
  gc::Reason reason = gc::Reason::NecessaryOnly;
};

int run_batch(std::vector<std::string> paths, unsigned jobs, bool json,
              long long flag_seed) {
  namespace fs = std::filesystem;
  if (paths.size() == 1 && fs::is_directory(paths[0])) {
    std::vector<std::string> found;
    for (const auto& entry : fs::directory_iterator(paths[0]))
      if (entry.is_regular_file() && entry.path().extension() == ".json")
        found.push_back(entry.path().string());
    paths = std::move(found);
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty())
    throw gc::Error(gc::ErrorCode::BadOptions, "batch: no input files");

  std::vector<BatchResult> results(paths.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= paths.size()) return;
      BatchResult& r = results[k];
      r.file = paths[k];
      try {
        gc::ProblemSpec spec = gc::parse_problem(read_all(paths[k]));
        apply_seed(spec, flag_seed);
        const gc::QuadraticForm3 metric(spec.metric, gc::FormSpace::Algebra);
        const gc::CompletenessReport rep = gc::decide(spec.algebra, metric, spec.decide);
        r.json = gc::cli::analyze_json(spec, rep);
        r.json["file"] = paths[k];
        r.verdict = rep.verdict;
        r.reason = rep.reason;
      } catch (const gc::Error& e) {
        r.error = e.code();
        r.message = e.what();
      } catch (const std::exception& e) {
        r.error = gc::ErrorCode::InternalInconsistency;
        r.message = e.what();
      }
    }
  };

  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, paths.size());
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < jobs; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int exit_code = 0;
  if (json) {
    ordered_json out = ordered_json::array();
    for (const auto& r : results) {
      if (r.error) {
        ordered_json e;
        e["file"] = r.file;
        ordered_json err;
        err["code"] = gc::error_code_name(*r.error);
        err["message"] = r.message;
        e["error"] = err;
        out.push_back(e);
      } else {
        out.push_back(r.json);
      }
    }
    print_json(out);
  } else {
    for (const auto& r : results) {
      if (r.error)
        std::printf("%s: error %s: %s\n", r.file.c_str(),
                    gc::error_code_name(*r.error), r.message.c_str());
      else
        std::printf("%s: %s (%s)\n", r.file.c_str(), gc::verdict_name(r.verdict),
                    gc::reason_name(r.reason));
    }
  }
  for (const auto& r : results)
    if (r.error) { exit_code = gc::cli::error_exit(*r.error); break; }
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "geocomplete: geodesic completeness of left-invariant metrics on "
      "3d Lie algebras"};
  app.require_subcommand(1);
  int code = 0;

  InputArgs cls_args;
  auto* cmd_classify =
      app.add_subcommand("classify", "algebra type, metric signature, operator shape");
  add_input_options(cmd_classify, cls_args);
  cmd_classify->callback([&] { code = run_classify(cls_args); });

  InputArgs ana_args;
  auto* cmd_analyze =
      app.add_subcommand("analyze", "full completeness decision with certificates");
  add_input_options(cmd_analyze, ana_args);
  cmd_analyze->callback([&] { code = run_analyze(ana_args); });

  InputArgs int_args;
  std::optional<double> horizon;
  std::vector<double> start;
  bool backward = false;
  std::string csv;
  auto* cmd_integrate =
      app.add_subcommand("integrate", "adaptive integration of the momentum flow");
  add_input_options(cmd_integrate, int_args);
  cmd_integrate->add_option("--horizon", horizon, "integration time (positive)");
  cmd_integrate->add_option("--start", start, "starting momentum x1 x2 x3")
      ->expected(3);
  cmd_integrate->add_flag("--backward", backward, "integrate toward negative time");
  cmd_integrate->add_option("--csv", csv, "write knots as CSV ('-' for stdout)");
  cmd_integrate->callback(
      [&] { code = run_integrate(int_args, horizon, start, backward, csv); });

  InputArgs fi_args;
  auto* cmd_fi = app.add_subcommand("first-integrals",
                                    "basis of conserved quadratic forms");
  add_input_options(cmd_fi, fi_args);
  cmd_fi->callback([&] { code = run_first_integrals(fi_args); });

  InputArgs idem_args;
  auto* cmd_idem = app.add_subcommand(
      "idempotents", "invariant directions and idempotents of the flow field");
  add_input_options(cmd_idem, idem_args);
  cmd_idem->callback([&] { code = run_idempotents(idem_args); });

  std::string preset_name;
  bool preset_json = false;
  auto* cmd_preset =
      app.add_subcommand("preset", "list presets or print one as a spec file");
  cmd_preset->add_option("name", preset_name, "preset to print");
  cmd_preset->add_flag("--json", preset_json, "JSON list output");
  cmd_preset->callback([&] { code = run_preset(preset_name, preset_json); });

  std::vector<std::string> batch_paths;
  unsigned jobs = 0;
  bool batch_json = false;
  long long batch_seed = -1;
  auto* cmd_batch =
      app.add_subcommand("batch", "analyze many spec files (or a directory)");
  cmd_batch->add_option("paths", batch_paths, "spec files or one directory")
      ->required();
  cmd_batch->add_option("-j,--jobs", jobs, "worker threads (default: hardware)");
  cmd_batch->add_flag("--json", batch_json, "JSON array output");
  cmd_batch->add_option("--seed", batch_seed, "seed override for every file");
  cmd_batch->callback(
      [&] { code = run_batch(batch_paths, jobs, batch_json, batch_seed); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const gc::Error& e) {
    std::fprintf(stderr, "error: %s [%s]\n", e.what(), gc::error_code_name(e.code()));
    return gc::cli::error_exit(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 6;
  }
  return code;
}
