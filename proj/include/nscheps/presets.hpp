#pragma once

#include <cstdint>
#include <string>

#include "nscheps/grid.hpp"

namespace nscheps {

enum class PresetKind { sinusoid, tanh_interface, random_perturbation };

/// Initial order parameter. All presets start from rest (v = 0).
///
///  - sinusoid:            amplitude cos(pi x/lx) cos(pi y/ly)
///  - tanh_interface:      tanh((y - ly/2 - perturbation cos(2 pi x/lx)) / width)
///  - random_perturbation: mean + amplitude * U(-1,1), shifted to the exact mean
struct InitialPreset {
  PresetKind kind = PresetKind::sinusoid;
  double amplitude = 0.3;
  double width = 0.3;
  double perturbation = 0.1;
  double mean = 0.0;
};

const char* to_string(PresetKind kind);
PresetKind preset_from_string(const std::string& name);

/// Throws Error(config) if the field would leave (-1, 1).
ScalarField make_initial_phi(const GridSpec& grid, const InitialPreset& preset, std::uint64_t seed);

}  // namespace nscheps
