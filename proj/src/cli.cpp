#include "simop/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "simop/matching.hpp"
#include "simop/oracle.hpp"
#include "simop/spectral.hpp"
#include "simop/transforms.hpp"

namespace simop::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------- parsing

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!keys.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

const json& require_object(const json& v, const std::string& where) {
  if (!v.is_object()) throw ConfigError(where + ": expected an object");
  return v;
}

double get_number(const json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(where + "." + key + ": must be finite");
  return x;
}

int get_int(const json& obj, const char* key, int fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(where + "." + key + ": expected an integer");
  return v.get<int>();
}

std::string get_string(const json& obj, const char* key, const std::string& fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

cplx parse_complex(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ConfigError(where + ": expected a [re, im] pair");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

Block parse_block(const json& v, int dim, const std::string& where) {
  if (!v.is_array() || static_cast<int>(v.size()) != dim) {
    throw ConfigError(where + ": expected " + std::to_string(dim) + " rows");
  }
  Block b(dim, dim);
  for (int r = 0; r < dim; ++r) {
    const json& row = v[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != dim) {
      throw ConfigError(where + ": row " + std::to_string(r) + " must hold " + std::to_string(dim) + " entries");
    }
    for (int c = 0; c < dim; ++c) {
      b(r, c) = parse_complex(row[static_cast<std::size_t>(c)], where + "[" + std::to_string(r) + "][" +
                                                                    std::to_string(c) + "]");
    }
  }
  return b;
}

Eigen::VectorXcd parse_vector(const json& v, int dim, const std::string& where) {
  if (!v.is_array() || static_cast<int>(v.size()) != dim) {
    throw ConfigError(where + ": expected " + std::to_string(dim) + " entries");
  }
  Eigen::VectorXcd x(dim);
  for (int c = 0; c < dim; ++c) x(c) = parse_complex(v[static_cast<std::size_t>(c)], where);
  return x;
}

PotentialConfig parse_potential(const json& v, int dim, int half_width) {
  const std::string where = "potential";
  require_object(v, where);
  PotentialConfig p;
  p.kind = get_string(v, "kind", p.kind, where);
  if (p.kind == "constant") {
    reject_unknown(v, where, {"kind", "c"});
    p.c = get_number(v, "c", p.c, where);
    if (p.c == 0.0) throw ConfigError("potential.c: must be nonzero");
  } else if (p.kind == "coefficients") {
    reject_unknown(v, where, {"kind", "coefficients"});
    if (!v.contains("coefficients") || !v.at("coefficients").is_array()) {
      throw ConfigError("potential.coefficients: expected an array");
    }
    std::set<int> seen;
    for (const json& e : v.at("coefficients")) {
      const std::string w = "potential.coefficients[]";
      require_object(e, w);
      reject_unknown(e, w, {"n", "entries"});
      if (!e.contains("n") || !e.contains("entries")) throw ConfigError(w + ": needs 'n' and 'entries'");
      const int n = get_int(e, "n", 0, w);
      if (std::abs(n) > 2 * half_width) throw ConfigError(w + ": |n| exceeds the band 2N");
      if (!seen.insert(n).second) throw ConfigError(w + ": duplicate index " + std::to_string(n));
      p.coefficients.emplace_back(n, parse_block(e.at("entries"), dim, w + ".entries"));
    }
  } else if (p.kind == "sample_file") {
    reject_unknown(v, where, {"kind", "path"});
    p.sample_file = get_string(v, "path", "", where);
    if (p.sample_file.empty()) throw ConfigError("potential.path: required for kind sample_file");
  } else {
    throw ConfigError("potential.kind: expected constant, coefficients or sample_file");
  }
  return p;
}

StateConfig parse_state(const json& v, const std::string& where, int dim, int half_width, bool allow_eigenvector) {
  require_object(v, where);
  StateConfig s;
  s.kind = get_string(v, "kind", s.kind, where);
  if (s.kind == "zero" || s.kind == "decay") {
    reject_unknown(v, where, {"kind"});
  } else if (s.kind == "coefficients") {
    reject_unknown(v, where, {"kind", "coefficients"});
    if (!v.contains("coefficients") || !v.at("coefficients").is_array()) {
      throw ConfigError(where + ".coefficients: expected an array");
    }
    std::set<int> seen;
    for (const json& e : v.at("coefficients")) {
      const std::string w = where + ".coefficients[]";
      require_object(e, w);
      reject_unknown(e, w, {"ell", "value"});
      if (!e.contains("ell") || !e.contains("value")) throw ConfigError(w + ": needs 'ell' and 'value'");
      const int ell = get_int(e, "ell", 0, w);
      if (std::abs(ell) > half_width) throw ConfigError(w + ": |ell| exceeds N");
      if (!seen.insert(ell).second) throw ConfigError(w + ": duplicate mode " + std::to_string(ell));
      s.coefficients.emplace_back(ell, parse_vector(e.at("value"), dim, w + ".value"));
    }
  } else if (s.kind == "sample_file") {
    reject_unknown(v, where, {"kind", "path"});
    s.sample_file = get_string(v, "path", "", where);
    if (s.sample_file.empty()) throw ConfigError(where + ".path: required for kind sample_file");
  } else if (s.kind == "eigenvector" && allow_eigenvector) {
    reject_unknown(v, where, {"kind", "block", "index"});
    s.block = get_int(v, "block", s.block, where);
    s.index = get_int(v, "index", s.index, where);
    if (std::abs(s.block) > half_width) throw ConfigError(where + ".block: |block| exceeds N");
    if (s.index < 0) throw ConfigError(where + ".index: must be non-negative");
  } else {
    throw ConfigError(where + ".kind: unsupported value '" + s.kind + "'");
  }
  return s;
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

json state_json(const StateConfig& s) {
  json out{{"kind", s.kind}};
  if (s.kind == "coefficients") {
    json list = json::array();
    for (const auto& [ell, value] : s.coefficients) {
      json vals = json::array();
      for (Eigen::Index i = 0; i < value.size(); ++i) vals.push_back(complex_json(value(i)));
      list.push_back({{"ell", ell}, {"value", vals}});
    }
    out["coefficients"] = list;
  } else if (s.kind == "sample_file") {
    out["path"] = s.sample_file;
  } else if (s.kind == "eigenvector") {
    out["block"] = s.block;
    out["index"] = s.index;
  }
  return out;
}

fs::path resolve(const RunConfig& config, const std::string& path) {
  const fs::path p(path);
  return p.is_absolute() || config.base_dir.empty() ? p : config.base_dir / p;
}

// ---------------------------------------------------------------- output

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

void write_json(const fs::path& path, const json& doc) { write_atomic(path, doc.dump(2) + "\n"); }

// ---------------------------------------------------------------- shared pipeline

struct Pipeline {
  PotentialSpec spec;
  BlockMatrix v;
  SimilarityResult sim;
};

Pipeline run_pipeline(const RunConfig& config) {
  PotentialSpec spec = build_potential(config);
  BlockMatrix v = build_v_matrix(spec);
  SimilarityResult sim = run_similarity(v, config.tolerances);
  return {std::move(spec), std::move(v), std::move(sim)};
}

json spectrum_json(const SpectrumReport& r) {
  json central = json::array();
  for (cplx z : r.central) central.push_back(complex_json(z));
  json outer = json::array();
  for (const auto& [ell, values] : r.outer) {
    json vals = json::array();
    for (cplx z : values) vals.push_back(complex_json(z));
    outer.push_back({{"block", ell}, {"eigenvalues", vals}});
  }
  return {{"k", r.k}, {"central", central}, {"outer", outer}, {"tail_sq", r.tail_sq}};
}

std::string spectrum_csv(const SpectrumReport& r) {
  std::ostringstream out;
  out << "block,re,im\n";
  for (cplx z : r.central) out << "central," << num(z.real()) << "," << num(z.imag()) << "\n";
  for (const auto& [ell, values] : r.outer) {
    for (cplx z : values) out << ell << "," << num(z.real()) << "," << num(z.imag()) << "\n";
  }
  return out.str();
}

json diagnostics_json(const Pipeline& p) {
  const SimilarityResult& s = p.sim;
  const AdmissibilityReport adm = check_admissibility(p.spec);
  return {
      {"m", s.m},
      {"k", s.k},
      {"norms",
       {{"v", s.log.v_norm},
        {"gamma_m_v", s.log.gamma_m_norm},
        {"v_tilde", s.log.v_tilde_norm},
        {"v_tilde_m", s.log.v_tilde_m_norm},
        {"w", s.w_norm},
        {"w_inverse", s.w_inv_norm}}},
      {"contraction", {{"alpha_tilde_k1", s.log.alpha_tilde_k1}, {"constant", s.log.contraction}}},
      {"residuals",
       {{"similarity", similarity_residual(p.v, s)},
        {"interior_radius", interior_radius(s)},
        {"commutator_defect_m", commutator_defect(p.v, s.m)}}},
      {"fixed_point",
       {{"iterations", s.log.fixed_point.residuals.size()},
        {"residuals", s.log.fixed_point.residuals},
        {"ball_radii", s.log.fixed_point.ball_radii},
        {"strictly_decreasing", s.log.fixed_point.strictly_decreasing}}},
      {"admissibility",
       {{"sum_sq", adm.sum_sq},
        {"l1_norm", adm.l1_norm},
        {"cond4_norm", adm.cond4_norm},
        {"sufficient", to_string(adm.sufficient)}}},
  };
}

std::string coefficient_rows(double t, const EvolutionState& x) {
  std::ostringstream out;
  const int n = x.window.half_width();
  for (int l = -n; l <= n; ++l) {
    const Eigen::VectorXcd c = x.mode_coeff(l);
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      out << num(t) << "," << l << "," << i << "," << num(c(i).real()) << "," << num(c(i).imag()) << "\n";
    }
  }
  return out.str();
}

std::string grid_rows(double t, const EvolutionState& x, int points) {
  std::ostringstream out;
  for (int p = 0; p < points; ++p) {
    const double s = x.window.omega() * p / points;
    const Eigen::VectorXcd val = x.evaluate(s);
    for (Eigen::Index i = 0; i < val.size(); ++i) {
      out << num(t) << "," << num(s) << "," << i << "," << num(val(i).real()) << "," << num(val(i).imag()) << "\n";
    }
  }
  return out.str();
}

// ---------------------------------------------------------------- commands

ExitCode cmd_spectrum(const RunConfig& config, const fs::path& out) {
  const Pipeline p = run_pipeline(config);
  const SpectrumReport r = spectrum(p.sim);
  write_json(out / "spectrum.json", spectrum_json(r));
  write_atomic(out / "spectrum.csv", spectrum_csv(r));
  write_json(out / "diagnostics.json", diagnostics_json(p));
  return ExitCode::Success;
}

ExitCode cmd_evolve(const RunConfig& config, const fs::path& out) {
  const Pipeline p = run_pipeline(config);
  const TruncationWindow w = window_of(config);
  const EvolutionState phi = build_state(config.initial, w, &p.sim);

  std::vector<EvolutionState> traj;
  if (config.forcing.kind == "zero") {
    traj = solve_homogeneous(p.sim, phi, config.times);
  } else {
    const EvolutionState f = build_state(config.forcing, w);
    traj = solve_inhomogeneous(p.sim, phi, [&f](double) { return f; }, config.times);
  }

  std::string coeffs = "t,ell,component,re,im\n";
  std::string grid = "t,s,component,re,im\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    coeffs += coefficient_rows(config.times[i], traj[i]);
    grid += grid_rows(config.times[i], traj[i], config.grid_points);
  }
  write_atomic(out / "trajectory.csv", coeffs);
  write_atomic(out / "trajectory_grid.csv", grid);

  if (config.tail_bound_n) {
    std::string tb = "t,n,bound,true_error\n";
    for (double t : config.times) {
      const TailBound b = tail_bound(p.sim, phi, *config.tail_bound_n, t);
      tb += num(t) + "," + std::to_string(*config.tail_bound_n) + "," + num(b.bound) + "," + num(b.true_error) + "\n";
    }
    write_atomic(out / "tail_bound.csv", tb);
  }
  return ExitCode::Success;
}

ExitCode cmd_validate(const RunConfig& config, const fs::path& out) {
  const Pipeline p = run_pipeline(config);
  const TruncationWindow w = window_of(config);
  json checks = json::array();
  bool all_pass = true;
  auto check = [&](const std::string& name, double value, double tol) {
    const bool pass = value <= tol;
    all_pass = all_pass && pass;
    checks.push_back({{"name", name}, {"value", value}, {"tolerance", tol}, {"pass", pass}});
  };

  const DenseTruncation dt = dense_truncation(p.spec);
  const SpectrumReport r = spectrum(p.sim);
  const std::vector<cplx> method = r.all();
  const std::vector<std::optional<int>> labels = r.labels();
  const SpectrumMatch match = match_spectra(method, oracle_spectrum(dt));
  double interior = 0.0;
  for (std::size_t i = 0; i < method.size(); ++i) {
    if (!labels[i] || std::abs(*labels[i]) <= w.half_width() / 2) interior = std::max(interior, match.distance[i]);
  }
  check("spectrum_matching_interior", interior, config.spectrum_tol);
  check("similarity_residual", similarity_residual(p.v, p.sim), 1e-8 * (1.0 + p.sim.log.v_norm));

  const EvolutionState phi = build_state(config.initial, w, &p.sim);
  const GroupEvolver evolver(p.sim);
  for (double t : config.times) {
    const double err = (evolver.apply(t, phi).coeffs - oracle_evolve(dt, phi, t).coeffs).norm();
    check("evolution_t=" + num(t), err, config.evolution_tol);
  }

  json golden = nullptr;
  if (config.potential.kind == "constant" && w.dim() == 1 && std::abs(w.omega() - 2.0 * std::numbers::pi) < 1e-15 &&
      config.potential.c >= 1.0 && p.sim.m == 0 && p.sim.k == 0) {
    const ClosedFormExample cf = closed_form_example(config.potential.c, w);
    check("golden_spectrum", match_spectra(method, cf.spectrum).max_distance, config.golden_tol);
    double x_err = 0.0;
    for (const auto& [j, x] : cf.x) x_err = std::max(x_err, std::abs(p.sim.x_star.block(j, j)(0, 0) - x));
    check("golden_fixed_point_diagonal", x_err, config.golden_tol);
    BlockMatrix inv = neumann_or_direct_inverse(p.sim.gamma_v);
    inv += BlockMatrix::identity(w);
    check("golden_inverse_factor", (inv.to_dense() - cf.inverse_factor).cwiseAbs().maxCoeff(), 1e-12);
    golden = {{"c", cf.c}, {"contraction", cf.contraction}};
  }

  write_json(out / "validate.json", {{"checks", checks}, {"golden", golden}, {"passed", all_pass}});
  return all_pass ? ExitCode::Success : ExitCode::ToleranceBreach;
}

ExitCode cmd_diagnose(const RunConfig& config, const fs::path& out) {
  const Pipeline p = run_pipeline(config);
  const TruncationWindow w = window_of(config);

  json gaps = json::array();
  for (const ProjectionGap& g : equiconvergence_sweep(p.sim)) {
    gaps.push_back({{"n", g.n}, {"gap", g.gap}, {"rate", g.rate}, {"bound", g.bound}});
  }

  const EvolutionState psi = build_state(config.initial, w, &p.sim);
  json tails = json::array();
  for (int n = p.sim.k + 1; n < w.half_width(); ++n) {
    for (double t : config.times) {
      const TailBound b = tail_bound(p.sim, psi, n, t);
      tails.push_back({{"n", n},
                       {"t", t},
                       {"bound", b.bound},
                       {"true_error", b.true_error},
                       {"constant", b.constant},
                       {"kappa", b.kappa}});
    }
  }

  double spectral_bound = -std::numeric_limits<double>::infinity();
  for (cplx z : spectrum(p.sim).all()) spectral_bound = std::max(spectral_bound, z.real());
  const json growth = {{"horizon", config.growth_horizon},
                       {"measured_rate", measured_growth_rate(p.sim, config.growth_horizon)},
                       {"spectral_bound", spectral_bound}};

  write_json(out / "diagnose.json",
             {{"m", p.sim.m}, {"k", p.sim.k}, {"equiconvergence", gaps}, {"tail_bounds", tails}, {"growth", growth}});
  return ExitCode::Success;
}

json error_body(const std::string& kind, const std::string& message, ExitCode code, std::optional<double> value = {}) {
  json e{{"kind", kind}, {"message", message}, {"exit_code", static_cast<int>(code)}};
  if (value) e["value"] = *value;
  return {{"error", e}};
}

void report_error(const fs::path& out, const json& body) {
  std::cerr << body["error"]["kind"].get<std::string>() << ": " << body["error"]["message"].get<std::string>()
            << "\n";
  std::error_code ec;
  if (!out.empty() && fs::is_directory(out, ec)) {
    try {
      write_json(out / "error.json", body);
    } catch (const std::exception&) {
    }
  }
}

}  // namespace

RunConfig parse_config(const json& doc, const fs::path& base_dir) {
  require_object(doc, "config");
  reject_unknown(doc, "config",
                 {"omega", "dim", "half_width", "potential", "tolerances", "times", "initial", "forcing",
                  "grid_points", "tail_bound_n", "validation", "growth_horizon"});
  RunConfig c;
  c.base_dir = base_dir;
  c.omega = get_number(doc, "omega", c.omega, "config");
  c.dim = get_int(doc, "dim", c.dim, "config");
  c.half_width = get_int(doc, "half_width", c.half_width, "config");
  if (!(c.omega > 0.0)) throw ConfigError("config.omega: must be positive");
  if (c.dim < 1) throw ConfigError("config.dim: must be at least 1");
  if (c.half_width < 1) throw ConfigError("config.half_width: must be at least 1");

  if (doc.contains("potential")) c.potential = parse_potential(doc.at("potential"), c.dim, c.half_width);

  if (doc.contains("tolerances")) {
    const json& t = require_object(doc.at("tolerances"), "tolerances");
    reject_unknown(t, "tolerances", {"theta", "fixed_point_tol", "max_iter"});
    c.tolerances.theta = get_number(t, "theta", c.tolerances.theta, "tolerances");
    c.tolerances.fixed_point_tol = get_number(t, "fixed_point_tol", c.tolerances.fixed_point_tol, "tolerances");
    c.tolerances.max_iter = get_int(t, "max_iter", c.tolerances.max_iter, "tolerances");
    if (!(c.tolerances.theta > 0.0 && c.tolerances.theta < 1.0)) throw ConfigError("tolerances.theta: must lie in (0, 1)");
    if (!(c.tolerances.fixed_point_tol > 0.0)) throw ConfigError("tolerances.fixed_point_tol: must be positive");
    if (c.tolerances.max_iter < 1) throw ConfigError("tolerances.max_iter: must be at least 1");
  }

  if (doc.contains("times")) {
    const json& t = doc.at("times");
    if (!t.is_array() || t.empty()) throw ConfigError("config.times: expected a non-empty array");
    c.times.clear();
    for (const json& x : t) {
      if (!x.is_number() || !std::isfinite(x.get<double>())) throw ConfigError("config.times: entries must be finite numbers");
      c.times.push_back(x.get<double>());
    }
  }

  if (doc.contains("initial")) c.initial = parse_state(doc.at("initial"), "initial", c.dim, c.half_width, true);
  if (doc.contains("forcing")) c.forcing = parse_state(doc.at("forcing"), "forcing", c.dim, c.half_width, false);
  if (c.forcing.kind != "zero") {
    for (std::size_t i = 0; i < c.times.size(); ++i) {
      if (c.times[i] < 0.0 || (i > 0 && c.times[i] < c.times[i - 1])) {
        throw ConfigError("config.times: must be ascending and non-negative when a forcing term is given");
      }
    }
  }

  c.grid_points = get_int(doc, "grid_points", c.grid_points, "config");
  if (c.grid_points < 1) throw ConfigError("config.grid_points: must be at least 1");
  if (doc.contains("tail_bound_n") && !doc.at("tail_bound_n").is_null()) {
    c.tail_bound_n = get_int(doc, "tail_bound_n", 0, "config");
    if (*c.tail_bound_n < 0 || *c.tail_bound_n >= c.half_width) throw ConfigError("config.tail_bound_n: must lie in [0, N)");
  }
  if (doc.contains("validation")) {
    const json& v = require_object(doc.at("validation"), "validation");
    reject_unknown(v, "validation", {"spectrum_tol", "evolution_tol", "golden_tol"});
    c.spectrum_tol = get_number(v, "spectrum_tol", c.spectrum_tol, "validation");
    c.evolution_tol = get_number(v, "evolution_tol", c.evolution_tol, "validation");
    c.golden_tol = get_number(v, "golden_tol", c.golden_tol, "validation");
  }
  c.growth_horizon = get_number(doc, "growth_horizon", c.growth_horizon, "config");
  if (!(c.growth_horizon > 0.0)) throw ConfigError("config.growth_horizon: must be positive");
  return c;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc, path.parent_path());
}

json manifest(const RunConfig& c) {
  json potential{{"kind", c.potential.kind}};
  if (c.potential.kind == "constant") {
    potential["c"] = c.potential.c;
  } else if (c.potential.kind == "coefficients") {
    json list = json::array();
    for (const auto& [n, b] : c.potential.coefficients) {
      json rows = json::array();
      for (Eigen::Index r = 0; r < b.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index k = 0; k < b.cols(); ++k) row.push_back(complex_json(b(r, k)));
        rows.push_back(row);
      }
      list.push_back({{"n", n}, {"entries", rows}});
    }
    potential["coefficients"] = list;
  } else {
    potential["path"] = c.potential.sample_file;
  }
  return {
      {"omega", c.omega},
      {"dim", c.dim},
      {"half_width", c.half_width},
      {"potential", potential},
      {"tolerances",
       {{"theta", c.tolerances.theta},
        {"fixed_point_tol", c.tolerances.fixed_point_tol},
        {"max_iter", c.tolerances.max_iter}}},
      {"times", c.times},
      {"initial", state_json(c.initial)},
      {"forcing", state_json(c.forcing)},
      {"grid_points", c.grid_points},
      {"tail_bound_n", c.tail_bound_n ? json(*c.tail_bound_n) : json(nullptr)},
      {"validation",
       {{"spectrum_tol", c.spectrum_tol}, {"evolution_tol", c.evolution_tol}, {"golden_tol", c.golden_tol}}},
      {"growth_horizon", c.growth_horizon},
  };
}

TruncationWindow window_of(const RunConfig& c) { return TruncationWindow(c.omega, c.dim, c.half_width); }

PotentialSpec build_potential(const RunConfig& c) {
  const TruncationWindow w = window_of(c);
  if (c.potential.kind == "constant") return constant_over_c(w, c.potential.c);
  if (c.potential.kind == "coefficients") {
    PotentialSpec spec(w);
    for (const auto& [n, b] : c.potential.coefficients) spec.set_coefficient(n, b);
    return spec;
  }
  const fs::path path = resolve(c, c.potential.sample_file);
  std::ifstream in(path);
  if (!in) throw ConfigError("potential.path: cannot read " + path.string());
  std::vector<Block> samples;
  try {
    samples = read_potential_samples(in, c.dim);
    return coefficients_from_samples(w, samples);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("potential.path: ") + e.what());
  }
}

EvolutionState build_state(const StateConfig& s, const TruncationWindow& w, const SimilarityResult* sim) {
  EvolutionState x = EvolutionState::zero(w);
  const int n = w.half_width();
  if (s.kind == "decay") {
    for (int l = -n; l <= n; ++l) {
      x.set_mode_coeff(l, Eigen::VectorXcd::Constant(w.dim(), 1.0 / (1.0 + static_cast<double>(l) * l)));
    }
  } else if (s.kind == "coefficients") {
    for (const auto& [ell, value] : s.coefficients) x.set_mode_coeff(ell, value);
  } else if (s.kind == "sample_file") {
    throw ConfigError("sample_file states must be loaded through the run config");
  } else if (s.kind == "eigenvector") {
    if (sim == nullptr) throw std::invalid_argument("eigenvector state needs a similarity result");
    const GroupBlocks g = GroupBlocks::from(*sim);
    const bool central = std::abs(s.block) <= sim->k;
    const Eigen::MatrixXcd& gen = central ? g.central : g.outer.at(s.block);
    if (s.index >= gen.rows()) throw ConfigError("initial.index: block has only " + std::to_string(gen.rows()) + " eigenvalues");
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(gen);
    if (solver.info() != Eigen::Success) throw MethodError(FailureKind::EigensolverFailure, "eigensolver failed on the requested block");
    const Eigen::VectorXcd vec = solver.eigenvectors().col(s.index);
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(w.size());
    const Eigen::Index off = central ? w.offset(-sim->k) : w.offset(s.block);
    y.segment(off, vec.size()) = vec;
    x.coeffs = sim->u.apply(y);
    x.coeffs /= x.coeffs.norm();
  }
  return x;
}

namespace {

/// Coefficients |l| <= N from M >= 2N+1 equispaced vector samples.
EvolutionState state_from_samples(const fs::path& path, const TruncationWindow& w, const std::string& where) {
  std::ifstream in(path);
  if (!in) throw ConfigError(where + ".path: cannot read " + path.string());
  std::vector<Eigen::VectorXcd> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) {
      try {
        vals.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ConfigError(where + ".path: non-numeric entry '" + cell + "'");
      }
    }
    if (static_cast<int>(vals.size()) != 2 * w.dim()) {
      throw ConfigError(where + ".path: each row needs " + std::to_string(2 * w.dim()) + " numbers");
    }
    Eigen::VectorXcd v(w.dim());
    for (int i = 0; i < w.dim(); ++i) v(i) = cplx(vals[2 * i], vals[2 * i + 1]);
    rows.push_back(v);
  }
  const int m = static_cast<int>(rows.size());
  if (m < w.modes()) throw ConfigError(where + ".path: needs at least 2N+1 samples");
  EvolutionState x = EvolutionState::zero(w);
  for (int l = -w.half_width(); l <= w.half_width(); ++l) {
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(w.dim());
    for (int p = 0; p < m; ++p) {
      const long long r = ((static_cast<long long>(l) * p) % m + m) % m;
      acc += std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(r) / m) * rows[static_cast<std::size_t>(p)];
    }
    x.set_mode_coeff(l, acc / m);
  }
  return x;
}

RunConfig with_loaded_states(RunConfig c) {
  // Sample-file states are turned into explicit coefficient lists up front so
  // every command sees the same data.
  const TruncationWindow w = window_of(c);
  for (auto [state, where] : {std::pair{&c.initial, "initial"}, std::pair{&c.forcing, "forcing"}}) {
    if (state->kind != "sample_file") continue;
    const EvolutionState x = state_from_samples(resolve(c, state->sample_file), w, where);
    state->coefficients.clear();
    for (int l = -w.half_width(); l <= w.half_width(); ++l) state->coefficients.emplace_back(l, x.mode_coeff(l));
    state->kind = "coefficients";
  }
  return c;
}

}  // namespace

ExitCode run_command(const std::string& command, const RunConfig& config_in, const fs::path& out) {
  try {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw ConfigError("cannot create output directory " + out.string() + ": " + ec.message());
    const RunConfig config = with_loaded_states(config_in);
    write_json(out / "manifest.json", {{"command", command}, {"config", manifest(config)}});
    if (command == "spectrum") return cmd_spectrum(config, out);
    if (command == "evolve") return cmd_evolve(config, out);
    if (command == "validate") return cmd_validate(config, out);
    if (command == "diagnose") return cmd_diagnose(config, out);
    throw ConfigError("unknown command '" + command + "'");
  } catch (const ConfigError& e) {
    report_error(out, error_body("ConfigError", e.what(), ExitCode::ConfigError));
    return ExitCode::ConfigError;
  } catch (const MethodError& e) {
    const ExitCode code =
        is_precondition_failure(e.kind()) ? ExitCode::PreconditionFailure : ExitCode::NumericalFailure;
    report_error(out, error_body(to_string(e.kind()), e.what(), code, e.value()));
    return code;
  } catch (const std::exception& e) {
    report_error(out, error_body("NumericalFailure", e.what(), ExitCode::NumericalFailure));
    return ExitCode::NumericalFailure;
  }
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Similar-operator spectral analysis of y' - V(s) y(omega - s)"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir = ".";
  int threads = 1;
  const std::pair<const char*, const char*> commands[] = {
      {"spectrum", "eigenvalues of the block-diagonal similar operator"},
      {"evolve", "trajectory of the (inhomogeneous) problem"},
      {"validate", "compare with the dense truncation and closed forms"},
      {"diagnose", "equiconvergence gaps, tail bounds and growth rate"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "run configuration (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads, "worker threads for dense kernels")->check(CLI::PositiveNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::ConfigError);
  }
  Eigen::setNbThreads(threads);
  const std::string command = app.get_subcommands().front()->get_name();

  RunConfig config;
  try {
    config = load_config(config_path);
  } catch (const ConfigError& e) {
    report_error(out_dir, error_body("ConfigError", e.what(), ExitCode::ConfigError));
    return static_cast<int>(ExitCode::ConfigError);
  }
  return static_cast<int>(run_command(command, config, out_dir));
}

}  // namespace simop::cli
