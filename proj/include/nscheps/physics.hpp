#pragma once

#include "nscheps/grid.hpp"
#include "nscheps/kernel.hpp"

namespace nscheps {

enum class MobilityModel { constant, affine };

/// Material parameters of the two-fluid mixture and the logarithmic potential.
///
/// Defaults are configuration choices, not physical constants:
/// theta = 1, theta_c = 0.5, rho1 = 1, rho2 = 3, nu1 = 1, nu2 = 2, m0 = 1.
struct PhysicalParams {
  double rho1 = 1.0;
  double rho2 = 3.0;
  double theta = 1.0;
  double theta_c = 0.5;
  double nu1 = 1.0;
  double nu2 = 2.0;
  double m0 = 1.0;
  MobilityModel mobility_model = MobilityModel::constant;
  double m1 = 0.0;  // slope of the affine mobility m0 (1 + m1 phi)

  /// Throws Error(parameter) naming the violated constraint.
  void validate() const;

  double density(double phi) const { return 0.5 * (rho1 + rho2) + 0.5 * (rho2 - rho1) * phi; }
  double viscosity(double phi) const { return 0.5 * (nu1 + nu2) + 0.5 * (nu2 - nu1) * phi; }
  double mobility(double phi) const;
};

enum class PotentialPart { F, F_prime, F0, F0_prime };

/// F(s) = theta/2 ((1+s) ln(1+s) + (1-s) ln(1-s)) - theta_c/2 s^2 and its
/// convex part F0 = F + theta_c s^2 / 2. Requires |s| < 1.
double potential(double s, PotentialPart which, const PhysicalParams& params);
/// F0''(s) = theta / (1 - s^2)
double potential_convex_curvature(double s, const PhysicalParams& params);

enum class Coefficient { rho, nu, m };

ScalarField coefficients(const ScalarField& phi, const PhysicalParams& params, Coefficient which);

/// E0_eps(phi) = 1/2 <a phi - J * phi, phi>.
double energy_nonlocal_e0(const KernelOperator& kop, const ScalarField& phi);
/// E0(phi) = 1/2 |grad phi|^2 in the discrete face norm.
double energy_local_e0(const ScalarField& phi);
/// sum F(phi) h^2
double potential_energy(const ScalarField& phi, const PhysicalParams& params);
/// 1/2 sum over faces rho_f |v_f|^2 h^2, with wall faces carrying half weight.
double kinetic_energy(const VectorField& v, const ScalarField& phi, const PhysicalParams& params);

struct EnergyParts {
  double kinetic = 0.0;
  double e0 = 0.0;
  double potential = 0.0;
  double total() const { return kinetic + e0 + potential; }
};

/// Kinetic + interfacial + potential parts of the total energy. Pass nullptr
/// for the local model.
EnergyParts total_energy(const VectorField& v, const ScalarField& phi, const KernelOperator* kop,
                         const PhysicalParams& params);

}  // namespace nscheps
