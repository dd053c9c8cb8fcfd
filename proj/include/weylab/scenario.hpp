#pragma once

// Scenario runner: parse a JSON run configuration, execute the selected
// identity suites per scenario (optionally across a thread pool), and emit a
// JSON report plus a deterministic CSV of residuals.
//
// Config schema (schema_version 1):
//   {
//     "schema_version": 1,
//     "out_dir": "reports",          // optional, CLI --out wins
//     "jobs": 1,                     // optional, CLI --jobs wins
//     "seed": 1,                     // optional, CLI --seed wins
//     "scenarios": [ {
//       "id": "run-1",               // required, unique
//       "symbol": "x^2/2",           // required, expression in x
//       "params": {"m": 1.0},        // optional named constants
//       "grid": {"n": 4096, "length": 200.0},
//       "bump": [1.0, 5.0],          // frequency support of the filter
//       "gaussian": {"x0": 0.0, "sigma": 5.0, "k0": 3.0},
//       "times": [0.1, 0.5, 1.0],
//       "weyl": {"s": [1.0], "t": [1.0]},
//       "suites": ["weak_weyl", "arai", "steps", "weyl_pq", "expectation"],
//       "tolerances": {"weak_weyl": 1e-8},   // overrides by residual family
//       "convergence_levels": 3
//     } ]
//   }
// Unknown keys anywhere are rejected.
//
// CSV schema (csv_version 1): header
//   scenario,residual,value,tolerance,verdict,N,L,t
// one row per scenario x residual; `t` is empty for time-independent rows.
// The CSV carries no wall times, so identical configs and seeds reproduce it
// byte for byte.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"
#include "weylab/oracle.hpp"
#include "weylab/presets.hpp"
#include "weylab/random.hpp"
#include "weylab/version.hpp"

namespace weylab {

class ConfigError : public Error {
 public:
  using Error::Error;
};

struct ScenarioConfig {
  std::string id = "s0";
  std::string symbol = "x";
  ParamMap params;
  std::size_t n = 4096;
  double length = 200.0;
  double bump_lo = 1.0;
  double bump_hi = 5.0;
  GaussianParams gauss;
  std::vector<double> times = {0.1, 0.5, 1.0};
  std::vector<double> weyl_s = {1.0};
  std::vector<double> weyl_t = {1.0};
  std::vector<std::string> suites = {"weak_weyl", "arai", "steps", "weyl_pq", "expectation"};
  std::map<std::string, double> tolerances;
  int convergence_levels = 3;
};

struct RunConfig {
  std::vector<ScenarioConfig> scenarios;
  std::string out_dir = "reports";
  unsigned jobs = 1;
  std::uint64_t seed = 1;
};

inline const std::vector<std::string>& known_suites() {
  static const std::vector<std::string> s = {"weak_weyl", "arai",        "steps", "weyl_pq",
                                             "expectation", "convergence", "oracle"};
  return s;
}

// Default bounds per residual family. A scenario's `tolerances` object may
// override any of these by name. Time-dependent rows at t = 0 are held to
// 1e-13 unless explicitly overridden: the identities are exact there.
inline const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> t = {
      {"weak_weyl", 1e-6},     {"step_tginv", 1e-6},   {"step_t", 1e-6},
      {"step_ginvt", 1e-6},    {"step_triangle", 1e-13}, {"arai", 1e-8},
      {"arai_constant", 1e-13}, {"weyl_pq", 1e-8},      {"expectation_shift", 1e-8},
      {"d_symmetry", 1e-10},   {"closed_form", 1e-12},  {"oracle", 1e-10},
  };
  return t;
}

inline double row_tolerance(const ScenarioConfig& sc, const std::string& family,
                            std::optional<double> t) {
  auto it = sc.tolerances.find(family);
  if (it != sc.tolerances.end()) return it->second;
  double d = default_tolerances().at(family);
  if (t && *t == 0.0) return std::min(d, 1e-13);
  return d;
}

// bounded C^1 functions of the momentum exercised by the commutator suite
inline const std::vector<BoundedFunction>& bounded_test_functions() {
  static const std::vector<BoundedFunction> fns = {
      {"constant", [](double) { return cdouble{1.0, 0.0}; },
       [](double) { return cdouble{0.0, 0.0}; }},
      {"sin", [](double k) { return cdouble{std::sin(k), 0.0}; },
       [](double k) { return cdouble{std::cos(k), 0.0}; }},
      {"cexp", [](double k) { return std::polar(1.0, -k); },
       [](double k) { return cdouble{0.0, -1.0} * std::polar(1.0, -k); }},
      {"lorentzian", [](double k) { return cdouble{1.0 / (1.0 + k * k), 0.0}; },
       [](double k) {
         double d = 1.0 + k * k;
         return cdouble{-2.0 * k / (d * d), 0.0};
       }},
  };
  return fns;
}

struct ResidualRow {
  std::string residual;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::size_t n = 0;
  double length = 0.0;
  std::optional<double> t;
};

struct ScenarioReport {
  std::string id;
  ScenarioConfig cfg;
  std::string canonical_symbol;
  std::string matched_preset;  // empty when the symbol is not a bundled preset
  std::vector<ResidualRow> rows;
  std::vector<std::string> warnings;
  double wall_ms = 0.0;
  std::string error;   // nonempty when the scenario could not run
  int error_kind = 0;  // 0 ok, 2 setup/validation, 3 resource cap
};

struct RunResult {
  std::vector<ScenarioReport> reports;  // sorted by scenario id
  int exit_code = 0;
  double total_wall_ms = 0.0;
};

// ---- JSON config parsing (strict: unknown keys are errors) ----

namespace detail {

using nlohmann::json;

inline void require_known_keys(const json& obj, std::initializer_list<const char*> known,
                               const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : known)
      if (it.key() == k) ok = true;
    if (!ok) throw ConfigError("unknown key \"" + it.key() + "\" in " + where);
  }
}

inline double number_at(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + " must be a number");
  double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(where + " must be finite");
  return d;
}

inline std::vector<double> number_list(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + " must be an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(number_at(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

inline ScenarioConfig parse_scenario(const json& j, std::size_t index) {
  const std::string where = "scenarios[" + std::to_string(index) + "]";
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  require_known_keys(j,
                     {"id", "symbol", "params", "grid", "bump", "gaussian", "times", "weyl",
                      "suites", "tolerances", "convergence_levels"},
                     where);
  ScenarioConfig sc;
  if (!j.contains("id") || !j["id"].is_string())
    throw ConfigError(where + ": \"id\" (string) is required");
  sc.id = j["id"].get<std::string>();
  if (sc.id.empty()) throw ConfigError(where + ": \"id\" must be nonempty");
  if (!j.contains("symbol") || !j["symbol"].is_string())
    throw ConfigError(where + ": \"symbol\" (string) is required");
  sc.symbol = j["symbol"].get<std::string>();
  if (j.contains("params")) {
    if (!j["params"].is_object()) throw ConfigError(where + ".params must be an object");
    for (auto it = j["params"].begin(); it != j["params"].end(); ++it)
      sc.params[it.key()] = number_at(it.value(), where + ".params." + it.key());
  }
  if (j.contains("grid")) {
    const json& g = j["grid"];
    if (!g.is_object()) throw ConfigError(where + ".grid must be an object");
    require_known_keys(g, {"n", "length"}, where + ".grid");
    if (g.contains("n")) {
      if (!g["n"].is_number_unsigned()) throw ConfigError(where + ".grid.n must be a positive integer");
      sc.n = g["n"].get<std::size_t>();
    }
    if (g.contains("length")) sc.length = number_at(g["length"], where + ".grid.length");
  }
  if (j.contains("bump")) {
    std::vector<double> b = number_list(j["bump"], where + ".bump");
    if (b.size() != 2) throw ConfigError(where + ".bump must be [lo, hi]");
    sc.bump_lo = b[0];
    sc.bump_hi = b[1];
  }
  if (j.contains("gaussian")) {
    const json& g = j["gaussian"];
    if (!g.is_object()) throw ConfigError(where + ".gaussian must be an object");
    require_known_keys(g, {"x0", "sigma", "k0"}, where + ".gaussian");
    if (g.contains("x0")) sc.gauss.x0 = number_at(g["x0"], where + ".gaussian.x0");
    if (g.contains("sigma")) sc.gauss.sigma = number_at(g["sigma"], where + ".gaussian.sigma");
    if (g.contains("k0")) sc.gauss.k0 = number_at(g["k0"], where + ".gaussian.k0");
  }
  if (j.contains("times")) sc.times = number_list(j["times"], where + ".times");
  if (j.contains("weyl")) {
    const json& w = j["weyl"];
    if (!w.is_object()) throw ConfigError(where + ".weyl must be an object");
    require_known_keys(w, {"s", "t"}, where + ".weyl");
    if (w.contains("s")) sc.weyl_s = number_list(w["s"], where + ".weyl.s");
    if (w.contains("t")) sc.weyl_t = number_list(w["t"], where + ".weyl.t");
  }
  if (j.contains("suites")) {
    if (!j["suites"].is_array()) throw ConfigError(where + ".suites must be an array");
    sc.suites.clear();
    for (const json& s : j["suites"]) {
      if (!s.is_string()) throw ConfigError(where + ".suites entries must be strings");
      sc.suites.push_back(s.get<std::string>());
    }
  }
  if (j.contains("tolerances")) {
    if (!j["tolerances"].is_object()) throw ConfigError(where + ".tolerances must be an object");
    for (auto it = j["tolerances"].begin(); it != j["tolerances"].end(); ++it) {
      if (!default_tolerances().count(it.key()))
        throw ConfigError(where + ".tolerances: unknown residual family \"" + it.key() + "\"");
      double v = number_at(it.value(), where + ".tolerances." + it.key());
      if (!(v > 0.0)) throw ConfigError(where + ".tolerances." + it.key() + " must be positive");
      sc.tolerances[it.key()] = v;
    }
  }
  if (j.contains("convergence_levels")) {
    if (!j["convergence_levels"].is_number_integer())
      throw ConfigError(where + ".convergence_levels must be an integer");
    sc.convergence_levels = j["convergence_levels"].get<int>();
  }

  // structural invariants
  std::set<std::string> seen;
  for (const std::string& s : sc.suites) {
    if (std::find(known_suites().begin(), known_suites().end(), s) == known_suites().end())
      throw ConfigError(where + ": unknown suite \"" + s + "\"");
    if (!seen.insert(s).second) throw ConfigError(where + ": suite \"" + s + "\" listed twice");
  }
  auto wants = [&](const char* s) { return seen.count(s) != 0; };
  if ((wants("weak_weyl") || wants("steps") || wants("expectation") || wants("convergence")) &&
      sc.times.empty())
    throw ConfigError(where + ": \"times\" must be nonempty for the selected suites");
  if (wants("oracle") && sc.times.empty())
    throw ConfigError(where + ": \"times\" must be nonempty for the oracle suite");
  if (wants("weyl_pq") && (sc.weyl_s.empty() || sc.weyl_t.empty()))
    throw ConfigError(where + ": \"weyl\" s and t lists must be nonempty for the weyl_pq suite");
  if (wants("oracle") && sc.n > kDenseCap)
    throw ConfigError(where + ": grid.n = " + std::to_string(sc.n) +
                      " exceeds the dense-path cap " + std::to_string(kDenseCap) +
                      " required by the oracle suite");
  if (wants("convergence") && sc.convergence_levels < 2)
    throw ConfigError(where + ": convergence_levels must be at least 2");
  return sc;
}

}  // namespace detail

inline RunConfig parse_config_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be an object");
  detail::require_known_keys(j, {"schema_version", "scenarios", "out_dir", "jobs", "seed"},
                             "config root");
  if (!j.contains("schema_version") || !j["schema_version"].is_number_integer() ||
      j["schema_version"].get<int>() != 1)
    throw ConfigError("config requires \"schema_version\": 1");
  RunConfig rc;
  if (j.contains("out_dir")) {
    if (!j["out_dir"].is_string()) throw ConfigError("out_dir must be a string");
    rc.out_dir = j["out_dir"].get<std::string>();
  }
  if (j.contains("jobs")) {
    if (!j["jobs"].is_number_unsigned() || j["jobs"].get<unsigned>() == 0)
      throw ConfigError("jobs must be a positive integer");
    rc.jobs = j["jobs"].get<unsigned>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ConfigError("seed must be a nonnegative integer");
    rc.seed = j["seed"].get<std::uint64_t>();
  }
  if (!j.contains("scenarios") || !j["scenarios"].is_array() || j["scenarios"].empty())
    throw ConfigError("config requires a nonempty \"scenarios\" array");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < j["scenarios"].size(); ++i) {
    ScenarioConfig sc = detail::parse_scenario(j["scenarios"][i], i);
    if (!ids.insert(sc.id).second)
      throw ConfigError("duplicate scenario id \"" + sc.id + "\"");
    rc.scenarios.push_back(std::move(sc));
  }
  return rc;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config_text(text);
}

// ---- scenario execution ----

namespace detail {

struct ScenarioSetup {
  GridSpec grid;
  SpectralSymbol sym;
  TimeOperator op;
  BumpProfile bump;
  TestVector tv;
  StateVector base;  // normalized wave packet without the frequency filter
};

// Everything a run needs before any residual is computed. Throws on any
// validation failure: bad grid, rejected symbol, uncovered bump, failed
// state certificates.
inline ScenarioSetup prepare(const ScenarioConfig& sc, std::uint64_t global_seed) {
  std::uint64_t seed = global_seed ^ fnv1a(sc.id.c_str());
  GridSpec grid = make_grid(sc.n, sc.length);
  SpectralSymbol sym =
      make_symbol(sc.symbol, sc.params, -grid.kmax(), grid.kmax(), grid.dk(), seed);
  TimeOperator op = make_time_operator(sym, grid);
  BumpProfile bump = make_bump(sc.bump_lo, sc.bump_hi);
  TestVector tv = make_gaussian_test_vector(grid, sc.gauss, bump, op.excluded);
  StateVector base = gaussian(grid, sc.gauss);
  double nb = norm(base);
  base = scaled(base, cdouble{1.0 / nb, 0.0});
  return ScenarioSetup{grid, std::move(sym), std::move(op), bump, std::move(tv),
                       std::move(base)};
}

}  // namespace detail

inline ScenarioReport run_one(const ScenarioConfig& sc, std::uint64_t global_seed) {
  ScenarioReport rep;
  rep.id = sc.id;
  rep.cfg = sc;
  auto begin = std::chrono::steady_clock::now();
  try {
    detail::ScenarioSetup setup = detail::prepare(sc, global_seed);
    rep.canonical_symbol = to_string(setup.sym.g);
    if (position_window_marginal(setup.tv.state))
      rep.warnings.push_back(
          "test vector carries noticeable mass near the position boundary; residuals may stall");

    auto add_row = [&](std::string name, double value, const std::string& family,
                       std::optional<double> t, std::size_t n = 0, double length = 0.0,
                       std::optional<double> bound = std::nullopt) {
      double tol = bound ? *bound : row_tolerance(sc, family, t);
      bool pass = value <= tol;  // NaN compares false
      rep.rows.push_back(ResidualRow{std::move(name), value, tol, pass,
                                     n == 0 ? sc.n : n, length == 0.0 ? sc.length : length, t});
    };

    std::set<std::string> suites(sc.suites.begin(), sc.suites.end());

    // closed-form cross-checks run whenever the symbol is a bundled preset
    ParamMap merged;
    if (const Preset* p = match_preset(setup.sym, sc.params, &merged)) {
      rep.matched_preset = p->name;
      ClosedFormResiduals cf = closed_form_residuals(setup.op, *p, merged, setup.tv.state);
      add_row("closed_form[multiplier]", cf.multiplier, "closed_form", std::nullopt);
      add_row("closed_form[apply]", cf.apply, "closed_form", std::nullopt);
    }

    if (suites.count("weak_weyl"))
      for (double t : sc.times)
        add_row("weak_weyl", weak_weyl_residual(setup.op, setup.tv, t), "weak_weyl", t);

    if (suites.count("arai"))
      for (const BoundedFunction& f : bounded_test_functions())
        add_row("arai[f=" + f.name + "]", commutator_residual(f, setup.grid, setup.base),
                f.name == "constant" ? "arai_constant" : "arai", std::nullopt);

    if (suites.count("steps"))
      for (double t : sc.times) {
        StepResiduals s = step_residuals(setup.op, setup.tv, t);
        add_row("step_tginv", s.tginv, "step_tginv", t);
        add_row("step_t", s.t_only, "step_t", t);
        add_row("step_ginvt", s.ginvt, "step_ginvt", t);
        double ww = weak_weyl_residual(setup.op, setup.tv, t);
        add_row("step_triangle", step_triangle_defect(ww, s), "step_triangle", t);
      }

    if (suites.count("weyl_pq"))
      for (double s : sc.weyl_s)
        for (double t : sc.weyl_t)
          add_row("weyl_pq[s=" + detail::format_double(s) + "]",
                  weyl_residual_PQ(setup.base, s, t), "weyl_pq", t);

    if (suites.count("expectation")) {
      ExpectationD e = expectation_D(setup.op, setup.tv.state);
      add_row("d_symmetry", e.symmetry_defect, "d_symmetry", std::nullopt);
      for (double t : sc.times)
        add_row("expectation_shift", expectation_shift_residual(setup.op, setup.tv, t),
                "expectation_shift", t);
    }

    if (suites.count("convergence")) {
      std::uint64_t seed = global_seed ^ fnv1a(sc.id.c_str());
      ConvergenceStudy st =
          convergence_study(sc.symbol, sc.params, sc.gauss, setup.bump, sc.n, sc.length,
                            sc.times.front(), sc.convergence_levels, seed);
      for (std::size_t i = 0; i < st.levels.size(); ++i) {
        const ConvergenceLevel& lvl = st.levels[i];
        std::optional<double> bound;
        if (i > 0) {
          double prev = st.levels[i - 1].residual;
          bound = std::max(prev / 4.0, kConvergenceFloor);
        }
        add_row("convergence[level=" + std::to_string(i) + "]", lvl.residual, "weak_weyl",
                sc.times.front(), lvl.n, lvl.length, bound);
      }
    }

    if (suites.count("oracle")) {
      std::vector<std::pair<double, double>> pairs;
      for (double s : sc.weyl_s)
        for (double t : sc.weyl_t) pairs.emplace_back(s, t);
      CrossCheck cc =
          cross_check(setup.op, setup.tv, setup.base, sc.times, pairs, bounded_test_functions());
      for (const CrossCheckRow& row : cc.rows) {
        std::string name = "oracle[" + row.name;
        if (std::isfinite(row.s)) name += ",s=" + detail::format_double(row.s);
        if (std::isfinite(row.t)) name += ",t=" + detail::format_double(row.t);
        name += "]";
        std::optional<double> t;
        if (std::isfinite(row.t)) t = row.t;
        add_row(std::move(name), row.deviation, "oracle", t);
      }
    }
  } catch (const CapError& e) {
    rep.error = e.what();
    rep.error_kind = 3;
  } catch (const std::exception& e) {
    rep.error = e.what();
    rep.error_kind = 2;
  }
  rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                          begin)
                    .count();
  return rep;
}

// Build every scenario's operators and certified states without computing
// residuals. Throws (ConfigError/SymbolError/StateError/...) on the first
// scenario that cannot run.
inline void validate_run(const RunConfig& rc) {
  for (const ScenarioConfig& sc : rc.scenarios) (void)detail::prepare(sc, rc.seed);
}

inline RunResult run_scenarios(const RunConfig& rc) {
  auto begin = std::chrono::steady_clock::now();
  RunResult out;
  out.reports.resize(rc.scenarios.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= rc.scenarios.size()) return;
      out.reports[i] = run_one(rc.scenarios[i], rc.seed);
    }
  };
  std::size_t jobs = std::min<std::size_t>(std::max(1u, rc.jobs), rc.scenarios.size());
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  std::sort(out.reports.begin(), out.reports.end(),
            [](const ScenarioReport& a, const ScenarioReport& b) { return a.id < b.id; });
  bool any_fail = false, any_setup = false, any_cap = false;
  for (const ScenarioReport& r : out.reports) {
    if (r.error_kind == 3) any_cap = true;
    if (r.error_kind == 2) any_setup = true;
    for (const ResidualRow& row : r.rows)
      if (!row.pass) any_fail = true;
  }
  out.exit_code = any_cap ? 3 : any_setup ? 2 : any_fail ? 1 : 0;
  out.total_wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - begin).count();
  return out;
}

// ---- report writers ----

namespace detail {

inline json scenario_echo(const ScenarioConfig& sc) {
  json j;
  j["id"] = sc.id;
  j["symbol"] = sc.symbol;
  j["params"] = json::object();
  for (const auto& [k, v] : sc.params) j["params"][k] = v;
  j["grid"] = {{"n", sc.n}, {"length", sc.length}};
  j["bump"] = {sc.bump_lo, sc.bump_hi};
  j["gaussian"] = {{"x0", sc.gauss.x0}, {"sigma", sc.gauss.sigma}, {"k0", sc.gauss.k0}};
  j["times"] = sc.times;
  j["weyl"] = {{"s", sc.weyl_s}, {"t", sc.weyl_t}};
  j["suites"] = sc.suites;
  j["tolerances"] = json::object();
  for (const auto& [k, v] : sc.tolerances) j["tolerances"][k] = v;
  j["convergence_levels"] = sc.convergence_levels;
  return j;
}

}  // namespace detail

inline std::string csv_text(const RunResult& res) {
  std::string out = "scenario,residual,value,tolerance,verdict,N,L,t\n";
  for (const ScenarioReport& r : res.reports)
    for (const ResidualRow& row : r.rows) {
      out += r.id;
      out += ',';
      out += row.residual;
      out += ',';
      out += detail::format_double(row.value);
      out += ',';
      out += detail::format_double(row.tolerance);
      out += ',';
      out += row.pass ? "pass" : "fail";
      out += ',';
      out += std::to_string(row.n);
      out += ',';
      out += detail::format_double(row.length);
      out += ',';
      if (row.t) out += detail::format_double(*row.t);
      out += '\n';
    }
  return out;
}

inline nlohmann::json report_json(const RunConfig& rc, const RunResult& res) {
  using nlohmann::json;
  json j;
  j["schema_version"] = 1;
  j["csv_version"] = 1;
  j["generator"] = std::string("weylab ") + WEYLAB_VERSION;
  j["seed"] = rc.seed;
  j["jobs"] = rc.jobs;
  j["exit_code"] = res.exit_code;
  j["total_wall_ms"] = res.total_wall_ms;
  j["config"] = json::object();
  j["config"]["out_dir"] = rc.out_dir;
  j["config"]["scenarios"] = json::array();
  for (const ScenarioConfig& sc : rc.scenarios)
    j["config"]["scenarios"].push_back(detail::scenario_echo(sc));
  j["scenarios"] = json::array();
  for (const ScenarioReport& r : res.reports) {
    json s;
    s["id"] = r.id;
    s["symbol"] = r.cfg.symbol;
    s["canonical_symbol"] = r.canonical_symbol;
    s["preset"] = r.matched_preset.empty() ? json(nullptr) : json(r.matched_preset);
    s["grid"] = {{"n", r.cfg.n}, {"length", r.cfg.length}};
    s["wall_ms"] = r.wall_ms;
    s["warnings"] = r.warnings;
    s["error"] = r.error.empty() ? json(nullptr) : json(r.error);
    s["rows"] = json::array();
    for (const ResidualRow& row : r.rows) {
      json x;
      x["residual"] = row.residual;
      x["value"] = row.value;
      x["tolerance"] = row.tolerance;
      x["verdict"] = row.pass ? "pass" : "fail";
      x["n"] = row.n;
      x["length"] = row.length;
      x["t"] = row.t ? json(*row.t) : json(nullptr);
      s["rows"].push_back(std::move(x));
    }
    j["scenarios"].push_back(std::move(s));
  }
  return j;
}

inline void write_reports(const RunConfig& rc, const RunResult& res) {
  namespace fs = std::filesystem;
  fs::path dir(rc.out_dir);
  fs::create_directories(dir);
  {
    std::ofstream csv(dir / "residuals.csv", std::ios::binary);
    if (!csv) throw Error("cannot write " + (dir / "residuals.csv").string());
    csv << csv_text(res);
  }
  {
    std::ofstream js(dir / "report.json", std::ios::binary);
    if (!js) throw Error("cannot write " + (dir / "report.json").string());
    js << report_json(rc, res).dump(2) << '\n';
  }
}

}  // namespace weylab
