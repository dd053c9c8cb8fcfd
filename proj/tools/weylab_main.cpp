// weylab command-line driver.
//
// Subcommands:
//   run <config.json> [--out DIR] [--jobs N] [--seed S]
//       Execute the scenarios in the config; write report.json and
//       residuals.csv to the output directory.
//       Exit 0: every residual within tolerance.
//       Exit 1: at least one residual out of tolerance.
//       Exit 2: config, symbol, or state validation failed.
//       Exit 3: a resource cap was hit (grid or dense-path size).
//   validate <config.json>
//       Parse the config and build every scenario's operators and certified
//       states without computing residuals. Exit 0 or 2/3 as above.
//   list-presets
//       Print the bundled symbols with derivative, singular set, and the
//       closed operator form of D.

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "weylab/scenario.hpp"

namespace {

int cmd_run(const std::string& cfg_path, const CLI::App* cmd, const std::string& out,
            unsigned jobs, std::uint64_t seed) {
  weylab::RunConfig rc = weylab::load_config(cfg_path);
  if (cmd->count("--out")) rc.out_dir = out;
  if (cmd->count("--jobs")) rc.jobs = jobs;
  if (cmd->count("--seed")) rc.seed = seed;
  weylab::RunResult res = weylab::run_scenarios(rc);
  weylab::write_reports(rc, res);
  for (const weylab::ScenarioReport& r : res.reports) {
    if (!r.error.empty()) {
      std::cerr << r.id << ": error: " << r.error << "\n";
      continue;
    }
    std::size_t failed = 0;
    for (const weylab::ResidualRow& row : r.rows)
      if (!row.pass) ++failed;
    std::cout << r.id << ": " << r.rows.size() << " residuals, "
              << (failed == 0 ? std::string("all within tolerance")
                              : std::to_string(failed) + " out of tolerance")
              << "\n";
    for (const weylab::ResidualRow& row : r.rows)
      if (!row.pass)
        std::cerr << "  fail " << row.residual << " = " << weylab::detail::format_double(row.value)
                  << " > " << weylab::detail::format_double(row.tolerance) << "\n";
    for (const std::string& w : r.warnings) std::cerr << "  warning: " << w << "\n";
  }
  std::cout << "wrote " << rc.out_dir << "/report.json and " << rc.out_dir << "/residuals.csv\n";
  return res.exit_code;
}

int cmd_validate(const std::string& cfg_path) {
  weylab::RunConfig rc = weylab::load_config(cfg_path);
  weylab::validate_run(rc);
  std::cout << "config valid: " << rc.scenarios.size() << " scenario"
            << (rc.scenarios.size() == 1 ? "" : "s") << "\n";
  return 0;
}

int cmd_list_presets() {
  for (const weylab::Preset& p : weylab::presets()) {
    weylab::ExprPtr g = weylab::parse(p.expression, p.defaults);
    std::cout << p.name << "\n";
    std::cout << "  g(x)  = " << p.expression << "\n";
    std::cout << "  g'(x) = " << weylab::to_string(weylab::differentiate(g)) << "\n";
    std::cout << "  Z     = {";
    for (std::size_t i = 0; i < p.singular.size(); ++i)
      std::cout << (i ? ", " : "") << weylab::detail::format_double(p.singular[i]);
    std::cout << "}\n";
    std::cout << "  D     = " << p.d_form << "\n";
    if (!p.defaults.empty()) {
      std::cout << "  defaults:";
      for (const auto& [k, v] : p.defaults)
        std::cout << " " << k << " = " << weylab::detail::format_double(v);
      std::cout << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical checks of time-operator identities on a discretized periodic line"};
  app.require_subcommand(1);

  std::string run_cfg, out_dir;
  unsigned jobs = 1;
  std::uint64_t seed = 1;
  CLI::App* run = app.add_subcommand("run", "execute scenarios from a JSON config");
  run->add_option("config", run_cfg, "run configuration (JSON)")->required();
  run->add_option("--out", out_dir, "output directory (default: from config, else ./reports)");
  run->add_option("--jobs", jobs, "scenario-level parallelism degree");
  run->add_option("--seed", seed, "seed for randomized symbol validation");

  std::string validate_cfg;
  CLI::App* validate = app.add_subcommand("validate", "validate a config without running it");
  validate->add_option("config", validate_cfg, "run configuration (JSON)")->required();

  CLI::App* lp = app.add_subcommand("list-presets", "print the bundled symbol presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return cmd_run(run_cfg, run, out_dir, jobs, seed);
    if (validate->parsed()) return cmd_validate(validate_cfg);
    if (lp->parsed()) return cmd_list_presets();
  } catch (const weylab::CapError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
