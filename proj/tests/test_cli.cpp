#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nscheps/commands.hpp"

using namespace nscheps;
namespace fs = std::filesystem;

namespace {

struct Output {
  int code;
  std::string log;
  std::string err;
};

Output run(const std::string& name, const AppConfig& cfg, const fs::path& dir) {
  std::ostringstream log, err;
  CommandOptions opts;
  opts.output_dir = dir.string();
  const int code = run_command(name, cfg, opts, log, err);
  return {code, log.str(), err.str()};
}

fs::path scratch(const char* name) {
  const fs::path p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("validate the shipped config") {
  std::ostringstream log, err;
  CHECK(run_command("validate", std::string(NSCHEPS_SOURCE_DIR) + "/configs/default.json", {}, log, err) == exit_ok);
  CHECK(log.str().find("config ok") != std::string::npos);
}

TEST_CASE("configuration errors exit with 2") {
  std::ostringstream log, err;
  CHECK(run_command("validate", "/nonexistent.json", {}, log, err) == exit_config);
  CHECK(run_command("frobnicate", "/nonexistent.json", {}, log, err) == exit_config);
  CHECK(err.str().find("unknown subcommand") != std::string::npos);
  const fs::path dir = scratch("nscheps_cli_bad");
  std::ofstream(dir.string() + ".json") << R"({"params": {"theta_c": 2.0}})";
  CHECK(run_command("simulate", dir.string() + ".json", {}, log, err) == exit_config);
  fs::remove(dir.string() + ".json");
}

TEST_CASE("gamma-check and operator-check") {
  AppConfig cfg;
  cfg.run.grid = GridSpec::make(256, 256, 1.0, 1.0);
  cfg.run.preset.kind = PresetKind::sinusoid;
  cfg.run.preset.amplitude = 1.0;
  const fs::path dir = scratch("nscheps_cli_checks");
  CHECK(run(" gamma-check", cfg, dir).code == exit_config);
  CHECK(run("gamma-check", cfg, dir).code == exit_ok);
  CHECK(fs::exists(dir / "gamma.csv"));
  CHECK(fs::exists(dir / "gamma.svg"));
  CHECK(fs::exists(dir / "config.json"));
  CHECK(run("operator-check", cfg, dir).code == exit_ok);
  CHECK(fs::exists(dir / "operator.csv"));
  cfg.checks.threshold = 1e-4;
  CHECK(run("gamma-check", cfg, dir).code == exit_assertion);
  fs::remove_all(dir);
}

TEST_CASE("simulate writes its artifacts") {
  AppConfig cfg;
  cfg.run.grid = GridSpec::make(16, 16, 1.0, 1.0);
  cfg.run.variant = ModelVariant::nonlocal(0.25);
  cfg.run.T = 1e-3;
  cfg.run.snapshot_count = 2;
  const fs::path dir = scratch("nscheps_cli_sim");
  const Output out = run("simulate", cfg, dir);
  CHECK(out.code == exit_ok);
  CHECK(fs::exists(dir / "timeseries.csv"));
  CHECK(fs::exists(dir / "energy.svg"));
  CHECK(fs::exists(dir / "snapshot_0000.epsf"));
  CHECK(fs::exists(dir / "snapshot_0002.epsf"));
  CHECK(out.log.find("PASS energy audit") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("solver failure exits with 3") {
  AppConfig cfg;
  cfg.run.grid = GridSpec::make(32, 32, 1.0, 1.0);
  cfg.run.variant = ModelVariant::local();
  cfg.run.preset.kind = PresetKind::tanh_interface;
  cfg.run.preset.width = 0.05;
  cfg.run.T = 1e-3;
  cfg.run.solver.max_halvings = 0;
  cfg.run.solver.ch.newton_max_iter = 3;
  const fs::path dir = scratch("nscheps_cli_fail");
  const Output out = run("simulate", cfg, dir);
  CHECK(out.code == exit_solver);
  CHECK(out.err.find("solver failure") != std::string::npos);
  fs::remove_all(dir);
}
