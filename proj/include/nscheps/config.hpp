#pragma once

#include <string>
#include <vector>

#include "nscheps/coupled.hpp"
#include "nscheps/error.hpp"

namespace nscheps {

/// Settings of gamma-check and operator-check.
struct CheckSettings {
  std::vector<double> eps_list{0.2, 0.1, 0.05, 0.02};
  double threshold = 0.05;
};

struct SweepSettings {
  std::vector<double> eps_list{0.2, 0.1, 0.05};
  double lemma34_delta = 0.5;
};

/// Everything one config document describes. Defaults: nonlocal eps = 0.1
/// on a 64 x 64 unit square, dt = 1e-4, T = 0.05, sinusoid preset.
struct AppConfig {
  AppConfig();
  RunConfig run;
  SweepSettings sweep;
  CheckSettings checks;
};

/// Configuration rejected. `issues` holds one "key.path: constraint" entry per problem.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  std::vector<std::string> issues_;
};

/// Strict parse: unknown keys, wrong types and violated constraints are all
/// collected before throwing ConfigError. A missing file is ErrorKind::io.
AppConfig parse_config(const std::string& path);
AppConfig parse_config_text(const std::string& text);

/// Canonical JSON of a config (every key present), parseable by parse_config_text.
std::string config_to_json(const AppConfig& cfg);

}  // namespace nscheps
