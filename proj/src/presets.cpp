#include "nscheps/presets.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "nscheps/error.hpp"

namespace nscheps {

const char* to_string(PresetKind kind) {
  switch (kind) {
    case PresetKind::sinusoid: return "sinusoid";
    case PresetKind::tanh_interface: return "tanh_interface";
    case PresetKind::random_perturbation: return "random_perturbation";
  }
  return "?";
}

PresetKind preset_from_string(const std::string& name) {
  if (name == "sinusoid") return PresetKind::sinusoid;
  if (name == "tanh_interface") return PresetKind::tanh_interface;
  if (name == "random_perturbation") return PresetKind::random_perturbation;
  throw Error(ErrorKind::config, "unknown preset '" + name + "'");
}

ScalarField make_initial_phi(const GridSpec& grid, const InitialPreset& preset, std::uint64_t seed) {
  constexpr double pi = std::numbers::pi;
  ScalarField phi(grid);
  switch (preset.kind) {
    case PresetKind::sinusoid:
      phi = ScalarField::sample(grid, [&](double x, double y) {
        return preset.amplitude * std::cos(pi * x / grid.lx) * std::cos(pi * y / grid.ly);
      });
      break;
    case PresetKind::tanh_interface:
      if (!(preset.width > 0.0)) throw Error(ErrorKind::config, "tanh_interface: width must be positive");
      phi = ScalarField::sample(grid, [&](double x, double y) {
        return std::tanh((y - 0.5 * grid.ly - preset.perturbation * std::cos(2.0 * pi * x / grid.lx)) / preset.width);
      });
      break;
    case PresetKind::random_perturbation: {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> dist(-1.0, 1.0);
      double sum = 0.0;
      for (double& p : phi.values) {
        p = preset.amplitude * dist(rng);
        sum += p;
      }
      const double shift = preset.mean - sum / static_cast<double>(phi.size());
      for (double& p : phi.values) p += shift;
      break;
    }
  }
  for (double p : phi.values)
    if (!(std::abs(p) < 1.0))
      throw Error(ErrorKind::config, std::string("preset ") + to_string(preset.kind) + " leaves the interval (-1, 1)");
  return phi;
}

}  // namespace nscheps
