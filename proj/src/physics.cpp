#include "nscheps/physics.hpp"

#include <cmath>
#include <sstream>

#include "nscheps/error.hpp"

namespace nscheps {

void PhysicalParams::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::parameter, msg); };
  if (!(rho1 > 0.0) || !(rho2 > 0.0)) fail("densities must satisfy rho1 > 0 and rho2 > 0");
  if (!(theta_c > 0.0) || !(theta_c < theta)) fail("potential temperatures must satisfy 0 < theta_c < theta");
  if (!(nu1 > 0.0) || !(nu2 > 0.0)) fail("viscosities must satisfy nu1 > 0 and nu2 > 0");
  if (!(m0 > 0.0)) fail("mobility scale must satisfy m0 > 0");
  if (mobility_model == MobilityModel::affine) {
    if (!std::isfinite(m1)) fail("affine mobility slope m1 must be finite");
    // m0 (1 + m1 phi) >= m0/10 on [-1, 1]
    if (1.0 - std::abs(m1) < 0.1) fail("affine mobility must satisfy m >= m0/10 on [-1,1], i.e. |m1| <= 0.9");
  }
}

double PhysicalParams::mobility(double phi) const {
  if (mobility_model == MobilityModel::constant) return m0;
  return std::max(m0 * (1.0 + m1 * phi), 0.1 * m0);
}

double potential(double s, PotentialPart which, const PhysicalParams& params) {
  if (!(std::abs(s) < 1.0)) {
    std::ostringstream os;
    os << "potential evaluated at |s| >= 1 (s = " << s << ")";
    throw Error(ErrorKind::domain, os.str());
  }
  const double th = params.theta;
  switch (which) {
    case PotentialPart::F0:
    case PotentialPart::F: {
      const double f0 = 0.5 * th * ((1.0 + s) * std::log1p(s) + (1.0 - s) * std::log1p(-s));
      return which == PotentialPart::F0 ? f0 : f0 - 0.5 * params.theta_c * s * s;
    }
    case PotentialPart::F0_prime:
    case PotentialPart::F_prime: {
      const double d0 = 0.5 * th * (std::log1p(s) - std::log1p(-s));
      return which == PotentialPart::F0_prime ? d0 : d0 - params.theta_c * s;
    }
  }
  return 0.0;
}

double potential_convex_curvature(double s, const PhysicalParams& params) {
  if (!(std::abs(s) < 1.0)) throw Error(ErrorKind::domain, "potential curvature evaluated at |s| >= 1");
  return params.theta / ((1.0 - s) * (1.0 + s));
}

ScalarField coefficients(const ScalarField& phi, const PhysicalParams& params, Coefficient which) {
  ScalarField out(phi.grid);
  for (std::size_t k = 0; k < phi.size(); ++k) {
    const double p = phi.values[k];
    if (!(std::abs(p) <= 1.0)) throw Error(ErrorKind::range, "coefficients: |phi| > 1");
    switch (which) {
      case Coefficient::rho: out.values[k] = params.density(p); break;
      case Coefficient::nu: out.values[k] = params.viscosity(p); break;
      case Coefficient::m: out.values[k] = params.mobility(p); break;
    }
  }
  return out;
}

double energy_nonlocal_e0(const KernelOperator& kop, const ScalarField& phi) {
  return 0.5 * inner(kop.nonlocal_operator(phi), phi);
}

double energy_local_e0(const ScalarField& phi) {
  const double n = field_norm(phi, NormKind::H1_semi);
  return 0.5 * n * n;
}

double potential_energy(const ScalarField& phi, const PhysicalParams& params) {
  double s = 0.0;
  for (double p : phi.values) {
    if (!(std::abs(p) < 1.0)) throw Error(ErrorKind::range, "total energy requires |phi| < 1");
    s += potential(p, PotentialPart::F, params);
  }
  const double h = phi.grid.h();
  return s * h * h;
}

double kinetic_energy(const VectorField& v, const ScalarField& phi, const PhysicalParams& params) {
  require_same_grid(v.grid, phi.grid, "kinetic_energy");
  const GridSpec& g = phi.grid;
  const ScalarField rho = coefficients(phi, params, Coefficient::rho);
  const VectorField rho_f = average_to_faces(rho);
  double s = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      const double w = (i == 0 || i == g.nx) ? 0.5 : 1.0;
      const double u = v.U(i, j);
      s += w * rho_f.U(i, j) * u * u;
    }
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double w = (j == 0 || j == g.ny) ? 0.5 : 1.0;
      const double c = v.V(i, j);
      s += w * rho_f.V(i, j) * c * c;
    }
  const double h = g.h();
  return 0.5 * s * h * h;
}

EnergyParts total_energy(const VectorField& v, const ScalarField& phi, const KernelOperator* kop,
                         const PhysicalParams& params) {
  EnergyParts parts;
  parts.potential = potential_energy(phi, params);
  parts.kinetic = kinetic_energy(v, phi, params);
  parts.e0 = kop ? energy_nonlocal_e0(*kop, phi) : energy_local_e0(phi);
  return parts;
}

}  // namespace nscheps
