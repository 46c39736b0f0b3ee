#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "nscheps/grid.hpp"

namespace nscheps {

/// Radial mollifier eta_eps(r) = eps^-d A (r/eps)^2 psi(r/eps) with the
/// polynomial bump psi(s) = (1 - s^2)_+^2. The amplitude A normalizes the
/// moment  int_0^inf eta_eps(r) r^(d-1) dr  to 2 / C_d.
struct MollifierFamily {
  int d = 2;
  double eps = 0.0;
  double amplitude = 0.0;

  static double bump(double s);
  /// C_d = int over the unit sphere of (e_1 . sigma)^2.
  static double sphere_constant(int d);

  double eta(double r) const;
  /// J_eps(r) = eta_eps(r) / r^2 in its bounded closed form A eps^(-d-2) psi(r/eps).
  double kernel(double r) const;
  /// Gauss-Legendre evaluation of int_0^eps eta_eps(r) r^(d-1) dr (exact for the polynomial bump).
  double moment() const;
  /// int_{R^d} J_eps dx, evaluated in closed form.
  double interior_mass() const;
};

MollifierFamily build_mollifier(int d, double eps);

/// Discrete restricted convolution with J_eps on a fixed grid.
///
/// The kernel is sampled at cell-center offsets (midpoint rule) and scaled
/// by a lattice factor so that the discrete interior mass equals the
/// analytic one. Convolution runs on a 2x zero-padded grid, so the result is
/// the exact linear convolution of the zero-extended field.
class KernelOperator {
 public:
  static KernelOperator build(const GridSpec& grid, const MollifierFamily& family);

  const GridSpec& grid() const { return grid_; }
  const MollifierFamily& family() const { return family_; }
  double eps() const { return family_.eps; }
  const ScalarField& a_eps() const { return a_eps_; }
  double interior_mass() const { return interior_mass_; }
  /// Ratio of analytic interior mass to the raw lattice sum of kernel samples.
  double lattice_scale() const { return lattice_scale_; }
  /// True when eps < 2h: kernel support spans fewer than two cells.
  bool under_resolved() const { return under_resolved_; }

  /// Quadrature weight of the lattice offset (di, dj), including h^2.
  double weight(int di, int dj) const;

  ScalarField convolve(const ScalarField& phi) const;
  ScalarField nonlocal_operator(const ScalarField& phi) const;

  /// Constant kappa with <N phi, phi> <= kappa <-Lap_h phi, phi> on the grid,
  /// from a lattice path bound (N = a_eps - J*, Lap_h the Neumann 5-point Laplacian).
  double laplacian_bound() const { return laplacian_bound_; }

 private:
  struct FftPlans;

  GridSpec grid_;
  MollifierFamily family_;
  double lattice_scale_ = 1.0;
  double interior_mass_ = 0.0;
  bool under_resolved_ = false;
  double laplacian_bound_ = 1.0;
  ScalarField a_eps_;
  std::vector<std::complex<double>> multiplier_;
  std::shared_ptr<const FftPlans> plans_;
};

inline KernelOperator build_kernel_operator(const GridSpec& grid, const MollifierFamily& family) {
  return KernelOperator::build(grid, family);
}

}  // namespace nscheps
