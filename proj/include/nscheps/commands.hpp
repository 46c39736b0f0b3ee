#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "nscheps/config.hpp"

namespace nscheps {

enum ExitCode : int {
  exit_ok = 0,
  exit_assertion = 1,
  exit_config = 2,
  exit_solver = 3,
};

struct CommandOptions {
  std::optional<std::string> output_dir;  // overrides output.dir
  std::optional<std::uint64_t> seed;      // overrides run.seed
  bool quiet = false;
};

/// Names accepted by run_command.
inline constexpr const char* command_names[] = {"simulate", "sweep", "gamma-check", "operator-check", "lemma34",
                                                "validate"};
bool is_command(const std::string& name);

/// Runs one subcommand against a config file and returns its exit code.
/// Results go to the output directory; `log` receives progress and the
/// summary, `err` the diagnostics.
int run_command(const std::string& name, const std::string& config_path, const CommandOptions& options,
                std::ostream& log, std::ostream& err);

/// Same, for an already parsed config.
int run_command(const std::string& name, AppConfig cfg, const CommandOptions& options, std::ostream& log,
                std::ostream& err);

/// Exit code for an exception escaping a command.
int exit_code_for(ErrorKind kind);

}  // namespace nscheps
