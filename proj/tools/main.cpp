#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>

#include "nscheps/nscheps.h"

namespace {

struct Subcommand {
  const char* name;
  const char* help;
};

constexpr Subcommand subcommands[] = {
    {"simulate", "Run one coupled simulation"},
    {"sweep", "Convergence sweep of nonlocal runs against the local reference"},
    {"gamma-check", "Nonlocal energy against the gradient energy over eps"},
    {"operator-check", "Nonlocal bilinear form against the gradient form over eps"},
    {"lemma34", "Interpolation-inequality diagnostic over the sweep runs"},
    {"validate", "Parse and validate a config file"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal-to-local Navier-Stokes/Cahn-Hilliard simulator and convergence harness", "nscheps"};
  app.require_subcommand(1);
  std::string output_dir;
  bool quiet = false;
  std::uint64_t seed = 0;
  CLI::Option* out_opt = app.add_option("--output-dir", output_dir, "Output directory (overrides output.dir)");
  app.add_flag("-q,--quiet", quiet, "Suppress progress and summaries");
  CLI::Option* seed_opt = app.add_option("--seed", seed, "RNG seed (overrides run.seed)");
  app.set_version_flag("--version", nscheps_version());

  std::string config_path;
  std::string chosen;
  for (const Subcommand& s : subcommands) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("config", config_path, "Config file (JSON)")->required()->check(CLI::ExistingFile);
    sub->fallthrough();
    sub->callback([&chosen, name = s.name] { chosen = name; });
  }

  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--output-dir" || arg == "--seed") {
      ++i;
      continue;
    }
    if (arg.empty() || arg[0] == '-') continue;
    bool known = false;
    for (const Subcommand& s : subcommands) known = known || arg == s.name;
    if (!known) {
      std::cerr << "error: unknown subcommand '" << arg << "'\n\n" << app.help();
      return NSCHEPS_ERR_CONFIG;
    }
    break;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return NSCHEPS_ERR_CONFIG;
  }

  nscheps_config* cfg = nullptr;
  if (nscheps_config_from_file(config_path.c_str(), &cfg) != NSCHEPS_OK) {
    std::cerr << nscheps_last_error() << '\n';
    return NSCHEPS_ERR_CONFIG;
  }
  if (*seed_opt) nscheps_config_set_seed(cfg, seed);
  if (*out_opt && nscheps_config_set_output_dir(cfg, output_dir.c_str()) != NSCHEPS_OK) {
    std::cerr << nscheps_last_error() << '\n';
    nscheps_config_free(cfg);
    return NSCHEPS_ERR_CONFIG;
  }
  std::cout.flush();
  const int code = nscheps_run_command(chosen.c_str(), cfg, quiet ? 1 : 0);
  nscheps_config_free(cfg);
  return code;
}
