#pragma once

#include <memory>

#include "nscheps/grid.hpp"
#include "nscheps/linear_solvers.hpp"
#include "nscheps/physics.hpp"

namespace nscheps {

enum class ViscousTreatment { explicit_, semi_implicit };

struct FlowStepConfig {
  double dt = 1e-4;
  double projection_tol = 1e-10;
  int projection_max_iter = 2000;  // iteration cap of the momentum Krylov solve
  double momentum_tol = 1e-13;
  ViscousTreatment viscous_treatment = ViscousTreatment::semi_implicit;

  void validate() const;
};

/// Inputs of one fractional step. `phi_old` fixes rho^n and the lagged
/// mobility in the relative flux; `phi_new` fixes rho^{n+1} and nu.
struct FlowStepInputs {
  const VectorField& velocity;
  const ScalarField& phi_old;
  const ScalarField& phi_new;
  const ScalarField& mu;
  const VectorField& force;
};

struct FlowStepResult {
  VectorField velocity;
  ScalarField pressure;
  /// Predictor velocity on which the viscous term acts.
  VectorField predictor;
  /// int 2 nu |D v*|^2 dx, the viscous dissipation rate of the predictor.
  double viscous_dissipation = 0.0;
  /// Discrete L2 norm of div v^{n+1}.
  double divergence_norm = 0.0;
  int momentum_iterations = 0;
};

/// J~ = -((rho2 - rho1)/2) m(phi) grad mu on faces; zero on walls.
VectorField relative_flux(const ScalarField& phi, const ScalarField& mu, const PhysicalParams& params);
/// mu (face average) times grad phi.
VectorField capillary_force(const ScalarField& phi, const ScalarField& mu);
/// -phi (face value) times grad mu. Differs from capillary_force by a
/// discrete gradient when the face values are central averages.
VectorField capillary_force_conservative(const VectorField& face_phi, const ScalarField& mu);

/// int 2 nu |D v|^2 dx for a no-slip staggered velocity.
double viscous_dissipation(const VectorField& v, const ScalarField& nu);

/// Variable-density incompressible Navier-Stokes fractional step.
///
///  1. rho^n (v~ - v^n)/dt = f, then a rho^n-weighted projection of v~.
///  2. sqrt(rho+)(sqrt(rho+) v* - sqrt(rho^n) w)/dt + C(F) v* - div(2 nu D v*) = 0
///     with the skew-symmetric convection C of the mass flux F = rho v + J~.
///  3. rho^{n+1}-weighted projection of v*.
///
/// Every substep is kinetic-energy nonincreasing except for the work of f.
class FlowSolver {
 public:
  explicit FlowSolver(const PhysicalParams& params);
  ~FlowSolver();
  FlowSolver(FlowSolver&&) noexcept;
  FlowSolver& operator=(FlowSolver&&) noexcept;

  FlowStepResult step(const FlowStepInputs& in, const FlowStepConfig& cfg);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

FlowStepResult ns_step(const FlowStepInputs& in, const PhysicalParams& params, const FlowStepConfig& cfg);

}  // namespace nscheps
