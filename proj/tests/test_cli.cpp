#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

using Catch::Matchers::ContainsSubstring;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return {};
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

fs::path scratch_dir() {
  fs::path dir = fs::temp_directory_path() / "weylab_cli_test";
  fs::create_directories(dir);
  return dir;
}

CliResult run_cli(const std::string& args) {
  fs::path dir = scratch_dir();
  fs::path out_file = dir / "stdout.txt";
  fs::path err_file = dir / "stderr.txt";
  std::string cmd = std::string("\"") + WEYLAB_CLI_PATH + "\" " + args + " > \"" +
                    out_file.string() + "\" 2> \"" + err_file.string() + "\"";
  int status = std::system(cmd.c_str());
  CliResult r;
  REQUIRE(WIFEXITED(status));
  r.code = WEXITSTATUS(status);
  r.out = slurp(out_file);
  r.err = slurp(err_file);
  return r;
}

fs::path write_config(const std::string& name, const std::string& text) {
  fs::path p = scratch_dir() / name;
  std::ofstream out(p, std::ios::binary);
  REQUIRE(out);
  out << text;
  return p;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

const fs::path kBundledIdentity = fs::path(WEYLAB_CONFIG_DIR) / "identity.json";

}  // namespace

TEST_CASE("run executes a bundled config and reproduces its CSV", "[cli]") {
  fs::path out1 = scratch_dir() / "rep1";
  fs::path out2 = scratch_dir() / "rep2";
  fs::remove_all(out1);
  fs::remove_all(out2);

  CliResult first = run_cli("run " + q(kBundledIdentity) + " --out " + q(out1));
  INFO(first.err);
  REQUIRE(first.code == 0);
  CHECK_THAT(first.out, ContainsSubstring("all within tolerance"));
  CHECK_THAT(first.out, ContainsSubstring("wrote"));
  REQUIRE(fs::exists(out1 / "residuals.csv"));
  REQUIRE(fs::exists(out1 / "report.json"));

  CliResult second = run_cli("run " + q(kBundledIdentity) + " --out " + q(out2));
  REQUIRE(second.code == 0);
  CHECK(slurp(out1 / "residuals.csv") == slurp(out2 / "residuals.csv"));

  nlohmann::json rep = nlohmann::json::parse(slurp(out1 / "report.json"));
  CHECK(rep["exit_code"] == 0);
  CHECK(rep["generator"] == "weylab 0.1.0");
}

TEST_CASE("run honors --seed and --jobs and echoes them in the report", "[cli]") {
  fs::path cfg = write_config("small.json",
                              R"({"schema_version": 1, "scenarios": [
                                   {"id": "s", "symbol": "x^2/2",
                                    "grid": {"n": 512, "length": 100.0},
                                    "times": [0.5], "suites": ["weak_weyl"]}]})");
  fs::path out = scratch_dir() / "seeded";
  fs::remove_all(out);
  CliResult r = run_cli("run " + q(cfg) + " --out " + q(out) + " --seed 7 --jobs 4");
  INFO(r.err);
  REQUIRE(r.code == 0);
  nlohmann::json rep = nlohmann::json::parse(slurp(out / "report.json"));
  CHECK(rep["seed"] == 7);
  CHECK(rep["jobs"] == 4);
}

TEST_CASE("--out overrides the directory named in the config", "[cli]") {
  fs::path from_config = scratch_dir() / "from_config";
  fs::path from_flag = scratch_dir() / "from_flag";
  fs::remove_all(from_config);
  fs::remove_all(from_flag);
  fs::path cfg = write_config(
      "outdir.json",
      R"({"schema_version": 1, "out_dir": ")" + from_config.string() +
          R"(", "scenarios": [{"id": "s", "symbol": "x", "grid": {"n": 512, "length": 100.0},
                               "times": [0.5], "suites": ["weak_weyl"]}]})");

  REQUIRE(run_cli("run " + q(cfg)).code == 0);  // config's own directory
  CHECK(fs::exists(from_config / "report.json"));

  REQUIRE(run_cli("run " + q(cfg) + " --out " + q(from_flag)).code == 0);
  CHECK(fs::exists(from_flag / "report.json"));
}

TEST_CASE("a failed tolerance turns into exit code 1 with named rows", "[cli]") {
  fs::path cfg = write_config("tight.json",
                              R"({"schema_version": 1, "scenarios": [
                                   {"id": "tight", "symbol": "x^2/2",
                                    "grid": {"n": 512, "length": 100.0},
                                    "times": [0.5], "suites": ["weak_weyl"],
                                    "tolerances": {"weak_weyl": 1e-300}}]})");
  fs::path out = scratch_dir() / "tight_out";
  CliResult r = run_cli("run " + q(cfg) + " --out " + q(out));
  CHECK(r.code == 1);
  CHECK_THAT(r.out, ContainsSubstring("out of tolerance"));
  CHECK_THAT(r.err, ContainsSubstring("fail weak_weyl"));
}

TEST_CASE("a refinement study that would blow the grid cap exits 3", "[cli]") {
  fs::path cfg = write_config("capped.json",
                              R"({"schema_version": 1, "scenarios": [
                                   {"id": "capped", "symbol": "x^2/2",
                                    "grid": {"n": 1048576, "length": 25600.0},
                                    "times": [0.1], "suites": ["convergence"],
                                    "convergence_levels": 2}]})");
  fs::path out = scratch_dir() / "capped_out";
  CliResult r = run_cli("run " + q(cfg) + " --out " + q(out));
  CHECK(r.code == 3);
  CHECK_THAT(r.err, ContainsSubstring("exceeds the cap"));
  CHECK(fs::exists(out / "report.json"));  // the report is still written
}

TEST_CASE("validate accepts the bundled configs", "[cli]") {
  CliResult r = run_cli("validate " + q(kBundledIdentity));
  INFO(r.err);
  CHECK(r.code == 0);
  CHECK_THAT(r.out, ContainsSubstring("config valid"));
}

TEST_CASE("validate rejects symbols and bumps that cannot run", "[cli]") {
  SECTION("constant symbol") {
    fs::path cfg = write_config("flat.json",
                                R"({"schema_version": 1,
                                    "scenarios": [{"id": "flat", "symbol": "5"}]})");
    CliResult r = run_cli("validate " + q(cfg));
    CHECK(r.code == 2);
    CHECK_THAT(r.err, ContainsSubstring("measure zero"));
  }
  SECTION("bump over the exclusion margin") {
    fs::path cfg = write_config("overlap.json",
                                R"({"schema_version": 1, "scenarios": [
                                     {"id": "o", "symbol": "x^2/2", "bump": [0.2, 3.0]}]})");
    CliResult r = run_cli("validate " + q(cfg));
    CHECK(r.code == 2);
    CHECK_THAT(r.err, ContainsSubstring("overlaps"));
  }
}

TEST_CASE("usage errors and unreadable inputs exit 2", "[cli]") {
  CHECK(run_cli("run").code == 2);                      // missing config argument
  CHECK(run_cli("frobnicate").code == 2);               // unknown subcommand
  CHECK(run_cli("").code == 2);                         // subcommand required
  CliResult missing = run_cli("run /nonexistent/weylab.json");
  CHECK(missing.code == 2);
  CHECK_THAT(missing.err, ContainsSubstring("cannot open config file"));
  CliResult broken = run_cli("validate " + q(write_config("broken.json", "{ not json")));
  CHECK(broken.code == 2);
  CHECK_THAT(broken.err, ContainsSubstring("not valid JSON"));
}

TEST_CASE("list-presets prints every bundled symbol with its pieces", "[cli]") {
  CliResult r = run_cli("list-presets");
  REQUIRE(r.code == 0);
  for (const char* name : {"polynomial", "log_abs", "semirelativistic", "fractional"})
    CHECK_THAT(r.out, ContainsSubstring(name));
  CHECK_THAT(r.out, ContainsSubstring("g'(x) = x"));
  CHECK_THAT(r.out, ContainsSubstring("x/sqrt(x^2 + 1)"));
  CHECK_THAT(r.out, ContainsSubstring("Z     = {0}"));
  CHECK_THAT(r.out, ContainsSubstring("D     = "));
}
