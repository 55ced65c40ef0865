#include "hq/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include "hq/errors.hpp"
#include "hq/verify.hpp"

namespace hq {

namespace {

using nlohmann::json;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "k",          "l",           "R_chart",         "N_rho",          "N_theta",
      "psi_family", "psi_p",       "psi_h0",          "psi_h2",         "manufactured_a",
      "manufactured_b", "phi_kind", "phi_c",          "phi_a",          "phi_b",
      "newton_tol", "max_newton",  "homotopy_steps",  "fd_jacobian_eps", "seed",
      "barriers",   "verify",      "refinement_study", "write_csv",     "write_report",
      "gradient_sweep_max", "output_dir"};
  return keys;
}

void read(const json& doc, const char* key, int& out) {
  if (!doc.contains(key)) return;
  const json& v = doc.at(key);
  if (!v.is_number_integer()) throw ConfigError(std::string("config: '") + key + "' must be an integer");
  const auto x = v.get<long long>();
  if (x < -1000000000LL || x > 1000000000LL) {
    throw ConfigError(std::string("config: '") + key + "' out of range");
  }
  out = static_cast<int>(x);
}

void read(const json& doc, const char* key, double& out) {
  if (!doc.contains(key)) return;
  const json& v = doc.at(key);
  if (!v.is_number()) throw ConfigError(std::string("config: '") + key + "' must be a number");
  out = v.get<double>();
  if (!std::isfinite(out)) throw ConfigError(std::string("config: '") + key + "' must be finite");
}

void read(const json& doc, const char* key, bool& out) {
  if (!doc.contains(key)) return;
  const json& v = doc.at(key);
  if (!v.is_boolean()) throw ConfigError(std::string("config: '") + key + "' must be a boolean");
  out = v.get<bool>();
}

void read(const json& doc, const char* key, std::string& out) {
  if (!doc.contains(key)) return;
  const json& v = doc.at(key);
  if (!v.is_string()) throw ConfigError(std::string("config: '") + key + "' must be a string");
  out = v.get<std::string>();
}

void read(const json& doc, const char* key, std::uint64_t& out) {
  if (!doc.contains(key)) return;
  const json& v = doc.at(key);
  if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    throw ConfigError(std::string("config: '") + key + "' must be a non-negative integer");
  }
  out = v.get<std::uint64_t>();
}

void read(const json& doc, const char* key, std::array<double, 3>& out) {
  if (!doc.contains(key)) return;
  const json& v = doc.at(key);
  if (!v.is_array() || v.size() != 3) {
    throw ConfigError(std::string("config: '") + key + "' must be an array of 3 numbers");
  }
  for (std::size_t i = 0; i < 3; ++i) {
    if (!v[i].is_number()) {
      throw ConfigError(std::string("config: '") + key + "' must be an array of 3 numbers");
    }
    out[i] = v[i].get<double>();
  }
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Non-finite numbers are not representable in JSON.
json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json to_json(const SolveReport& r, bool with_iterates) {
  json path = json::array();
  for (const HomotopyStep& s : r.path) {
    path.push_back({{"t", s.t},
                    {"newton_iterations", s.newton_iterations},
                    {"residual", number(s.residual)},
                    {"converged", s.converged}});
  }
  json out = {{"converged", r.converged},
              {"status", r.status},
              {"newton_iterations", r.newton_iterations},
              {"residual_norm", number(r.residual_norm)},
              {"min_spacelike_margin", number(r.min_spacelike_margin)},
              {"min_sigma1", number(r.min_sigma1)},
              {"min_sigma2", number(r.min_sigma2)},
              {"last_good_t", r.last_good_t},
              {"homotopy_path", path},
              {"accepted_iterates", r.iterates.size()}};
  if (with_iterates) {
    json its = json::array();
    for (const IterateRecord& it : r.iterates) {
      its.push_back({{"t", it.t},
                     {"iteration", it.iteration},
                     {"residual", number(it.residual)},
                     {"step_length", it.step_length},
                     {"spacelike_margin", number(it.spacelike_margin)},
                     {"sigma1_min", number(it.sigma1_min)},
                     {"sigma2_min", number(it.sigma2_min)}});
    }
    out["iterates"] = its;
  }
  return out;
}

json to_json(const GradientMaxPrinciple& g) {
  return {{"S_used", g.s_used},
          {"interior_max", number(g.interior_max)},
          {"boundary_max", number(g.boundary_max)},
          {"sup_W", number(g.sup_w)},
          {"boundary_sup_W", number(g.boundary_sup_w)},
          {"boundary_bound", number(g.boundary_bound)},
          {"attained_on_boundary", g.attained_on_boundary},
          {"bound_holds", g.bound_holds},
          {"holds", g.holds}};
}

json to_json(const EstimateReport& e) {
  json out = {{"gradient_mp", to_json(e.gradient_mp)},
              {"curvature_ratio",
               {{"sup_interior_A", number(e.curvature_ratio.sup_interior_a)},
                {"sup_boundary_A", number(e.curvature_ratio.sup_boundary_a)},
                {"ratio", number(e.curvature_ratio.ratio)}}},
              {"ellipticity_min", number(e.ellipticity_min)}};
  if (e.barrier_gaps) {
    out["barrier_gaps"] = {{"min_u_minus_lower", number(e.barrier_gaps->lower_gap)},
                           {"min_upper_minus_u", number(e.barrier_gaps->upper_gap)},
                           {"lower_holds", e.barrier_gaps->lower_holds},
                           {"upper_holds", e.barrier_gaps->upper_holds},
                           {"holds", e.barrier_gaps->holds}};
  }
  if (e.structural) {
    out["structural_margins"] = {{"condition_margin", number(e.structural->condition_margin)},
                                 {"convexity_margin", number(e.structural->convexity_margin)},
                                 {"condition_holds", e.structural->condition_holds},
                                 {"convexity_holds", e.structural->convexity_holds},
                                 {"samples", e.structural->samples}};
  }
  return out;
}

json to_json(const SuiteResult& s) {
  return {{"name", s.name},
          {"samples", s.samples},
          {"violations", s.violations},
          {"worst_margin", number(s.worst_margin)},
          {"threshold", s.threshold},
          {"passed", s.passed}};
}

json to_json(const SuitesReport& r) {
  json suites = json::array();
  for (const SuiteResult& s : r.suites) suites.push_back(to_json(s));
  auto b0 = [](const B0Estimate& e) {
    return json{{"value", number(e.value)}, {"accepted", e.accepted}, {"skipped", e.skipped}};
  };
  return {{"suites", suites}, {"b0", b0(r.b0)}, {"b0_alt_seed", b0(r.b0_alt_seed)},
          {"passed", r.passed}};
}

void check_psi_profile(const RunConfig& cfg) {
  const double r = std::asinh(cfg.r_chart);
  if (!(cfg.psi_h0 > 0.0) || !(cfg.psi_h0 + cfg.psi_h2 * r * r > 0.0)) {
    throw ConfigError("config: psi_h0 + psi_h2 r^2 must be positive on the ball");
  }
}

std::vector<GridSpec> refinement_levels(const RunConfig& cfg) {
  const GridSpec base{cfg.r_chart, cfg.n_rho, cfg.n_theta};
  std::vector<GridSpec> out{base, {base.r_chart, 2 * base.n_rho, 2 * base.n_theta}};
  if (!cfg.manufactured()) out.push_back({base.r_chart, 4 * base.n_rho, 4 * base.n_theta});
  return out;
}

// Max difference between two solutions at the nodes of the coarser grid
// (fine grid has twice the rings and angles).
double coarse_difference(const NodalField& coarse, const Grid& cg, const NodalField& fine,
                         const Grid& fg) {
  double d = std::abs(coarse[0] - fine[0]);
  for (int node = 1; node < cg.node_count(); ++node) {
    const PolarIndex p = cg.polar(node);
    const int f = fg.index({2 * p.ring, 2 * p.angle});
    d = std::max(d, std::abs(coarse[node] - fine[f]));
  }
  return d;
}

double max_error(const NodalField& u, const Grid& grid, const ManufacturedSolution& sol) {
  double e = 0.0;
  for (int node = 0; node < grid.node_count(); ++node) {
    e = std::max(e, std::abs(u[node] - sol.value(grid.chart(node).y)));
  }
  return e;
}

struct Refinement {
  json doc;
  bool converged = true;
  bool order_holds = false;
  bool ratio_holds = false;
};

constexpr double kMinOrder = 1.7;
constexpr double kMaxRatioChange = 0.05;

Refinement refinement_study(const RunConfig& cfg, const SolveReport& base_solution) {
  Refinement out;
  const auto levels = refinement_levels(cfg);
  std::vector<Grid> grids;
  std::vector<NodalField> solutions;
  json level_docs = json::array();
  std::vector<double> ratios;
  const ManufacturedSolution sol{cfg.manufactured_a, cfg.manufactured_b};
  for (std::size_t i = 0; i < levels.size(); ++i) {
    grids.emplace_back(levels[i]);
    const SolveConfig scfg = make_solve_config(cfg, levels[i]);
    SolveReport rep = i == 0 ? base_solution : homotopy_solve(scfg);
    json level = {{"N_rho", levels[i].n_rho},
                  {"N_theta", levels[i].n_theta},
                  {"converged", rep.converged},
                  {"newton_iterations", rep.newton_iterations}};
    if (!rep.converged) {
      out.converged = false;
      level_docs.push_back(level);
      break;
    }
    const auto geometry = graph_fields(rep.u, grids.back());
    const double ratio = curvature_ratio(geometry, grids.back()).ratio;
    ratios.push_back(ratio);
    level["curvature_ratio"] = number(ratio);
    if (cfg.manufactured()) level["max_error"] = number(max_error(rep.u, grids.back(), sol));
    level_docs.push_back(level);
    solutions.push_back(std::move(rep.u));
  }
  out.doc["levels"] = level_docs;
  if (!out.converged) return out;

  double order = 0.0;
  if (cfg.manufactured()) {
    const double e0 = level_docs[0]["max_error"].get<double>();
    const double e1 = level_docs[1]["max_error"].get<double>();
    order = std::log2(e0 / e1);
  } else {
    const double d01 = coarse_difference(solutions[0], grids[0], solutions[1], grids[1]);
    const double d12 = coarse_difference(solutions[1], grids[1], solutions[2], grids[2]);
    out.doc["successive_differences"] = {number(d01), number(d12)};
    order = std::log2(d01 / d12);
  }
  const double r0 = ratios[ratios.size() - 2];
  const double r1 = ratios.back();
  const double change = std::abs(r1 - r0) / std::abs(r0);
  out.doc["convergence_order"] = number(order);
  out.doc["curvature_ratio_change"] = number(change);
  out.order_holds = std::isfinite(order) && order >= kMinOrder;
  out.ratio_holds = change <= kMaxRatioChange;
  out.doc["order_holds"] = out.order_holds;
  out.doc["ratio_holds"] = out.ratio_holds;
  return out;
}

void write_csv(const std::string& path, const NodalField& u, const Grid& grid) {
  std::vector<NodeGeometry> geometry;
  try {
    geometry = graph_fields(u, grid);
  } catch (const DomainError&) {
    geometry.clear();
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "ring_index,angle_index,y1,y2,u,v,lambda1,lambda2,theta\n";
  const std::string nan = "nan";
  for (int node = 0; node < grid.node_count(); ++node) {
    const PolarIndex p = grid.polar(node);
    const Vector& y = grid.chart(node).y;
    f << p.ring << ',' << p.angle << ',' << fmt(y(0)) << ',' << fmt(y(1)) << ',' << fmt(u[node]);
    if (geometry.empty()) {
      f << ',' << nan << ',' << nan << ',' << nan << ',' << nan << '\n';
      continue;
    }
    const ShapeData& s = geometry[static_cast<std::size_t>(node)].shape;
    f << ',' << fmt(s.v) << ',' << fmt(s.lambda[0]) << ',' << fmt(s.lambda[1]) << ','
      << fmt(s.theta) << '\n';
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

double umbilic_deviation(const NodalField& u, double c) {
  double d = 0.0;
  for (double x : u.values) d = std::max(d, std::abs(x - c));
  return d;
}

}  // namespace

RunConfig parse_run_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: top level must be a JSON object");
  for (const auto& item : doc.items()) {
    if (!known_keys().count(item.key())) throw ConfigError("config: unknown key '" + item.key() + "'");
  }
  RunConfig cfg;
  read(doc, "k", cfg.k);
  read(doc, "l", cfg.l);
  read(doc, "R_chart", cfg.r_chart);
  read(doc, "N_rho", cfg.n_rho);
  read(doc, "N_theta", cfg.n_theta);
  read(doc, "psi_family", cfg.psi_family);
  read(doc, "psi_p", cfg.psi_p);
  read(doc, "psi_h0", cfg.psi_h0);
  read(doc, "psi_h2", cfg.psi_h2);
  read(doc, "manufactured_a", cfg.manufactured_a);
  read(doc, "manufactured_b", cfg.manufactured_b);
  read(doc, "phi_kind", cfg.phi_kind);
  read(doc, "phi_c", cfg.phi_c);
  read(doc, "phi_a", cfg.phi_a);
  read(doc, "phi_b", cfg.phi_b);
  read(doc, "newton_tol", cfg.newton_tol);
  read(doc, "max_newton", cfg.max_newton);
  read(doc, "homotopy_steps", cfg.homotopy_steps);
  read(doc, "fd_jacobian_eps", cfg.fd_jacobian_eps);
  read(doc, "seed", cfg.seed);
  read(doc, "barriers", cfg.barriers);
  read(doc, "verify", cfg.verify);
  read(doc, "refinement_study", cfg.refinement_study);
  read(doc, "write_csv", cfg.write_csv);
  read(doc, "write_report", cfg.write_report);
  read(doc, "gradient_sweep_max", cfg.gradient_sweep_max);
  read(doc, "output_dir", cfg.output_dir);

  static const std::set<std::string> families = {"constant", "power_theta", "exp_theta",
                                                 "manufactured"};
  if (!families.count(cfg.psi_family)) {
    throw ConfigError("config: psi_family must be constant, power_theta, exp_theta or manufactured");
  }
  if (cfg.manufactured()) {
    for (const char* key : {"phi_kind", "phi_c", "phi_a", "phi_b"}) {
      if (doc.contains(key)) {
        throw ConfigError(std::string("config: '") + key +
                          "' is not allowed with psi_family manufactured");
      }
    }
  } else if (cfg.phi_kind != "constant" && cfg.phi_kind != "ambient_affine") {
    throw ConfigError("config: phi_kind must be constant or ambient_affine");
  }
  if (!(cfg.gradient_sweep_max >= 1.0)) throw ConfigError("config: gradient_sweep_max must be >= 1");
  if (cfg.output_dir.empty()) throw ConfigError("config: output_dir must not be empty");
  if (!cfg.manufactured()) check_psi_profile(cfg);
  // Grid, solver and data checks.
  make_solve_config(cfg);
  if (cfg.refinement_study) {
    for (const GridSpec& g : refinement_levels(cfg)) Grid{g};
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot read '" + path + "'");
  json doc;
  try {
    doc = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  return parse_run_config(doc);
}

json to_json(const RunConfig& cfg) {
  json out = {{"k", cfg.k},
              {"l", cfg.l},
              {"R_chart", cfg.r_chart},
              {"N_rho", cfg.n_rho},
              {"N_theta", cfg.n_theta},
              {"psi_family", cfg.psi_family},
              {"psi_p", cfg.psi_p},
              {"psi_h0", cfg.psi_h0},
              {"psi_h2", cfg.psi_h2},
              {"manufactured_a", cfg.manufactured_a},
              {"manufactured_b", cfg.manufactured_b},
              {"newton_tol", cfg.newton_tol},
              {"max_newton", cfg.max_newton},
              {"homotopy_steps", cfg.homotopy_steps},
              {"fd_jacobian_eps", cfg.fd_jacobian_eps},
              {"seed", cfg.seed},
              {"barriers", cfg.barriers},
              {"verify", cfg.verify},
              {"refinement_study", cfg.refinement_study},
              {"write_csv", cfg.write_csv},
              {"write_report", cfg.write_report},
              {"gradient_sweep_max", cfg.gradient_sweep_max},
              {"output_dir", cfg.output_dir}};
  if (!cfg.manufactured()) {
    out["phi_kind"] = cfg.phi_kind;
    out["phi_c"] = cfg.phi_c;
    out["phi_a"] = cfg.phi_a;
    out["phi_b"] = cfg.phi_b;
  }
  return out;
}

SolveConfig make_solve_config(const RunConfig& cfg, std::optional<GridSpec> grid_spec) {
  SolveConfig s;
  s.k = cfg.k;
  s.l = cfg.l;
  s.grid = grid_spec.value_or(GridSpec{cfg.r_chart, cfg.n_rho, cfg.n_theta});
  s.newton_tol = cfg.newton_tol;
  s.max_newton = cfg.max_newton;
  s.homotopy_steps = cfg.homotopy_steps;
  s.fd_jacobian_eps = cfg.fd_jacobian_eps;
  validate(s);
  const Grid grid(s.grid);

  const RadialProfile h{cfg.psi_h0, cfg.psi_h2};
  try {
    if (cfg.manufactured()) {
      const ManufacturedSolution sol{cfg.manufactured_a, cfg.manufactured_b};
      s.phi = sol.boundary();
      s.psi = manufactured_psi(grid, sol, s.k, s.l);
    } else {
      if (cfg.psi_family == "constant") {
        s.psi = PsiSpec::constant(cfg.psi_h0, s.k, s.l);
        s.psi.h = h;
      } else if (cfg.psi_family == "power_theta") {
        s.psi = PsiSpec::power_theta(cfg.psi_p, h, s.k, s.l);
      } else {
        s.psi = PsiSpec::exp_theta(cfg.psi_p, h, s.k, s.l);
      }
      s.phi = cfg.phi_kind == "constant" ? BoundaryData::constant_value(cfg.phi_c)
                                         : BoundaryData::ambient_affine(cfg.phi_a, cfg.phi_b);
    }
    NodalField probe;
    probe.values.assign(static_cast<std::size_t>(grid.node_count()), 1.0);
    apply_boundary(probe, s.phi, grid);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return s;
}

int cmd_solve(const std::string& config_path, const std::optional<std::string>& out_dir,
              std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  SolveConfig scfg;
  try {
    cfg = load_run_config(config_path);
    if (out_dir) cfg.output_dir = *out_dir;
    if (cfg.output_dir.empty()) throw ConfigError("config: output directory must not be empty");
    scfg = make_solve_config(cfg);
  } catch (const ConfigError& e) {
    err << "hqsolve: " << e.what() << '\n';
    return kExitConfig;
  }

  const Grid grid(scfg.grid);
  json report;
  report["config"] = to_json(cfg);
  json checks = json::object();
  int code = kExitOk;

  try {
    const SolveReport solution = homotopy_solve(scfg);
    report["solve"] = to_json(solution, false);
    checks["converged"] = solution.converged;
    out << "solve: " << (solution.converged ? "converged" : "not converged") << " ("
        << solution.status << "), " << solution.newton_iterations
        << " Newton iterations, residual " << fmt(solution.residual_norm) << '\n';

    if (!solution.converged) {
      code = kExitNonconvergence;
    } else {
      std::optional<BarrierPair> barriers;
      if (cfg.barriers) {
        if (cfg.k == 2 && cfg.l == 0) {
          barriers = barrier_pair(grid, scfg);
          report["barriers"] = {{"upper", to_json(barriers->upper, false)},
                                {"lower", to_json(barriers->lower, false)}};
          if (!barriers->upper.converged || !barriers->lower.converged) {
            code = kExitNonconvergence;
            barriers.reset();
          }
        } else {
          report["barriers"] = "skipped: barriers need k = 2, l = 0";
        }
      }
      if (cfg.verify) {
        const EstimateReport est =
            estimate(solution, grid, scfg, barriers ? &*barriers : nullptr, cfg.gradient_sweep_max);
        report["estimates"] = to_json(est);
        checks["gradient_mp"] = est.gradient_mp.holds;
        checks["ellipticity"] = est.ellipticity_min > 0.0;
        if (est.barrier_gaps) {
          checks["barrier_lower"] = est.barrier_gaps->lower_holds;
          checks["barrier_upper"] = est.barrier_gaps->upper_holds;
        }
      }
      if (cfg.refinement_study && code == kExitOk) {
        Refinement ref = refinement_study(cfg, solution);
        report["refinement"] = ref.doc;
        if (!ref.converged) {
          code = kExitNonconvergence;
        } else {
          checks["refinement_order"] = ref.order_holds;
          checks["curvature_ratio_stability"] = ref.ratio_holds;
          out << "refinement: order " << fmt(ref.doc["convergence_order"].get<double>()) << '\n';
        }
      }
    }
    if (code == kExitOk) {
      for (const auto& item : checks.items()) {
        if (!item.value().get<bool>()) {
          err << "hqsolve: check failed: " << item.key() << '\n';
          code = kExitCheckFailed;
        }
      }
    }
    report["checks"] = checks;
    report["exit_code"] = code;

    std::filesystem::create_directories(cfg.output_dir);
    const std::filesystem::path dir(cfg.output_dir);
    if (cfg.write_csv) write_csv((dir / "solution.csv").string(), solution.u, grid);
    if (cfg.write_report) write_text((dir / "report.json").string(), report.dump(2) + "\n");
  } catch (const DomainError& e) {
    err << "hqsolve: " << e.what() << '\n';
    return kExitNonconvergence;
  } catch (const std::exception& e) {
    err << "hqsolve: " << e.what() << '\n';
    return kExitNonconvergence;
  }
  return code;
}

std::string selftest_report(std::uint64_t seed, bool* passed, std::ostream* table) {
  json report;
  report["seed"] = seed;
  bool ok = true;
  auto row = [&](const std::string& name, double value, bool pass) {
    ok = ok && pass;
    if (table) {
      *table << std::left << std::setw(44) << name << std::setw(26) << fmt(value)
             << (pass ? "pass" : "FAIL") << '\n';
    }
  };

  const SuitesReport suites = algebraic_suites(seed);
  report["suites"] = to_json(suites);
  for (const SuiteResult& s : suites.suites) row("suite " + s.name, s.worst_margin, s.passed);

  {
    SolveConfig cfg;
    cfg.grid = {1.0, 32, 64};
    cfg.psi = PsiSpec::constant(0.25);
    cfg.phi = BoundaryData::constant_value(2.0);
    const Grid grid(cfg.grid);
    const SolveReport sol = homotopy_solve(cfg);
    const double dev = umbilic_deviation(sol.u, 2.0);
    json inst = {{"name", "umbilic"}, {"N_rho", 32}, {"N_theta", 64}, {"solve", to_json(sol, false)},
                 {"max_deviation", number(dev)}};
    row("umbilic converged", sol.residual_norm, sol.converged);
    row("umbilic max deviation", dev, dev <= 1e-10);
    row("umbilic Newton iterations", sol.newton_iterations, sol.newton_iterations <= 2);
    if (sol.converged) {
      const BarrierPair bp = barrier_pair(grid, cfg);
      const EstimateReport est = estimate(sol, grid, cfg, &bp);
      inst["estimates"] = to_json(est);
      row("umbilic gradient max principle", est.gradient_mp.s_used, est.gradient_mp.holds);
      row("umbilic barrier gap (lower)", est.barrier_gaps->lower_gap, est.barrier_gaps->lower_holds);
      row("umbilic barrier gap (upper)", est.barrier_gaps->upper_gap, est.barrier_gaps->upper_holds);
    }
    report["instances"].push_back(inst);
  }

  const ManufacturedSolution exact;
  std::vector<double> errors;
  std::vector<double> ratios;
  for (int n_rho : {16, 32}) {
    SolveConfig cfg;
    cfg.grid = {1.0, n_rho, 2 * n_rho};
    const Grid grid(cfg.grid);
    cfg.psi = manufactured_psi(grid, exact, 2, 0);
    cfg.phi = exact.boundary();
    const SolveReport sol = homotopy_solve(cfg);
    const std::string tag = "manufactured " + std::to_string(n_rho) + "x" + std::to_string(2 * n_rho);
    json inst = {{"name", tag}, {"N_rho", n_rho}, {"N_theta", 2 * n_rho},
                 {"solve", to_json(sol, false)}};
    row(tag + " converged", sol.residual_norm, sol.converged);
    if (sol.converged) {
      const double e = max_error(sol.u, grid, exact);
      const EstimateReport est = estimate(sol, grid, cfg);
      inst["max_error"] = number(e);
      inst["estimates"] = to_json(est);
      errors.push_back(e);
      ratios.push_back(est.curvature_ratio.ratio);
      row(tag + " gradient max principle", est.gradient_mp.s_used, est.gradient_mp.holds);
      row(tag + " ellipticity min", est.ellipticity_min, est.ellipticity_min > 0.0);
    }
    report["instances"].push_back(inst);
  }
  if (errors.size() == 2) {
    const double order = std::log2(errors[0] / errors[1]);
    const double change = std::abs(ratios[1] - ratios[0]) / std::abs(ratios[0]);
    report["convergence_order"] = number(order);
    report["curvature_ratio_change"] = number(change);
    row("manufactured convergence order", order, order >= kMinOrder);
    row("manufactured curvature ratio change", change, change <= kMaxRatioChange);
  } else {
    ok = false;
  }
  report["passed"] = ok;
  if (passed) *passed = ok;
  return report.dump(2) + "\n";
}

int cmd_selftest(std::uint64_t seed, const std::optional<std::string>& report_path,
                 std::ostream& out, std::ostream& err) {
  bool passed = false;
  std::string text;
  try {
    out << std::left << std::setw(40) << "check" << std::setw(26) << "value" << "result\n";
    text = selftest_report(seed, &passed, &out);
    if (report_path) write_text(*report_path, text);
  } catch (const std::exception& e) {
    err << "hqsolve: selftest aborted: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  out << (passed ? "selftest passed\n" : "selftest FAILED\n");
  return passed ? kExitOk : kExitCheckFailed;
}

int cmd_suites(int n, int k, int l, long long samples, std::uint64_t seed, std::ostream& out,
               std::ostream& err) {
  SuitesReport rep;
  try {
    rep = algebraic_suites(seed, n, k, l, samples);
  } catch (const ConfigError& e) {
    err << "hqsolve: " << e.what() << '\n';
    return kExitConfig;
  }
  out << std::left << std::setw(24) << "suite" << std::setw(10) << "samples" << std::setw(12)
      << "violations" << std::setw(26) << "worst margin" << "result\n";
  for (const SuiteResult& s : rep.suites) {
    out << std::setw(24) << s.name << std::setw(10) << s.samples << std::setw(12) << s.violations
        << std::setw(26) << fmt(s.worst_margin) << (s.passed ? "pass" : "FAIL") << '\n';
  }
  out << "B0 estimate " << fmt(rep.b0.value) << " (" << rep.b0.accepted << " samples, "
      << rep.b0.skipped << " skipped)\n";
  return rep.passed ? kExitOk : kExitCheckFailed;
}

}  // namespace hq
