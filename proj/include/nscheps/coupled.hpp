#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nscheps/ch_solver.hpp"
#include "nscheps/flow.hpp"
#include "nscheps/grid.hpp"
#include "nscheps/kernel.hpp"
#include "nscheps/physics.hpp"
#include "nscheps/presets.hpp"

namespace nscheps {

struct ModelVariant {
  enum class Kind { nonlocal, local };
  Kind kind = Kind::local;
  double eps = 0.0;

  static ModelVariant nonlocal(double eps) { return {Kind::nonlocal, eps}; }
  static ModelVariant local() { return {Kind::local, 0.0}; }
  bool is_nonlocal() const { return kind == Kind::nonlocal; }
  std::string label() const;
};

struct EnergyRecord {
  double t = 0.0;
  double kinetic = 0.0;
  double e0 = 0.0;
  double potential = 0.0;
  double dissipation = 0.0;      // increment over the step
  double dissipation_cum = 0.0;  // running sum of increments
  double mass_mean = 0.0;
  double max_abs_phi = 0.0;
  double div_v_norm = 0.0;

  double total() const { return kinetic + e0 + potential; }
};

struct SimState {
  double t = 0.0;
  ScalarField phi;
  ScalarField mu;
  VectorField v;
  ScalarField p;
  EnergyRecord initial;
  std::vector<EnergyRecord> energy_history;
};

struct SolverSettings {
  CHStepConfig ch;
  FlowStepConfig flow;
  int max_halvings = 5;
};

struct RunConfig {
  ModelVariant variant;
  GridSpec grid;
  PhysicalParams params;
  double dt = 1e-4;
  double T = 0.05;
  InitialPreset preset;
  std::uint64_t seed = 0;
  std::string output_dir = "output";
  int snapshot_count = 10;
  SolverSettings solver;

  void validate() const;
  /// Number of steps to reach T; the last step is shortened when dt does not divide T.
  int step_count() const;
};

/// One model variant advanced in time. Owns the kernel operator (nonlocal
/// variant) and the cached factorizations of both sub-solvers.
class Simulation {
 public:
  explicit Simulation(const RunConfig& cfg);
  /// Starts from a given state instead of the configured preset.
  Simulation(const RunConfig& cfg, const ScalarField& phi0, const VectorField& v0);
  ~Simulation();
  Simulation(Simulation&&) noexcept;
  Simulation& operator=(Simulation&&) noexcept;

  const SimState& state() const;
  const RunConfig& config() const;
  const KernelOperator* kernel() const;

  /// One coupled step of length dt: CH step with v^n, then the flow step with
  /// (phi^{n+1}, mu^{n+1}). Failed steps are retried as two half steps, at
  /// most `max_halvings` levels deep; throws StepFailure beyond that.
  void step(double dt);

  EnergyParts energy(const VectorField& v, const ScalarField& phi) const;
  ScalarField chemical_potential(const ScalarField& phi) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct RunResult {
  SimState final_state;
  std::vector<EnergyRecord> timeseries;  // initial record first, then one per step
  std::vector<SimState> snapshots;
  std::optional<std::string> failure;
};

using StepObserver = std::function<void(const SimState&, int step, int total_steps)>;

RunResult run_simulation(const RunConfig& cfg, const StepObserver& observer = {});

/// Steps at which snapshots are taken: 0 plus `count` evenly spaced steps.
std::vector<int> snapshot_steps(int total_steps, int count);

}  // namespace nscheps
