#pragma once

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <concepts>
#include <memory>
#include <vector>

#include "nscheps/grid.hpp"
#include "nscheps/kernel.hpp"
#include "nscheps/physics.hpp"

namespace nscheps {

struct CHStepConfig {
  double dt = 1e-4;
  double newton_tol = 1e-10;
  int newton_max_iter = 50;
  double linear_tol = 1e-11;
  double phi_cap = 1.0 - 1e-12;

  void validate() const;
};

/// Local relation: -Laplacian (Neumann) implicit, nothing explicit.
class LocalRelation {
 public:
  explicit LocalRelation(const GridSpec& grid, double scale = 1.0) : grid_(grid), scale_(scale) {}
  ScalarField implicit_apply(const ScalarField& phi) const;
  ScalarField explicit_apply(const ScalarField& phi) const { return ScalarField(phi.grid); }
  void add_implicit_jacobian(std::vector<Eigen::Triplet<double>>& t, int stride) const;
  double implicit_scale() const;
  double e0(const ScalarField& phi) const { return energy_local_e0(phi); }

 private:
  GridSpec grid_;
  double scale_;
};

/// Nonlocal relation N = a_eps - J*, split as kappa(-Lap_h) implicit and
/// kappa(-Lap_h) - N explicit, with kappa = kernel().laplacian_bound().
class NonlocalRelation {
 public:
  explicit NonlocalRelation(const KernelOperator& kop)
      : kop_(&kop), stabilizer_(kop.grid(), kop.laplacian_bound()) {}
  ScalarField implicit_apply(const ScalarField& phi) const { return stabilizer_.implicit_apply(phi); }
  ScalarField explicit_apply(const ScalarField& phi) const;
  void add_implicit_jacobian(std::vector<Eigen::Triplet<double>>& t, int stride) const {
    stabilizer_.add_implicit_jacobian(t, stride);
  }
  double implicit_scale() const { return stabilizer_.implicit_scale(); }
  double e0(const ScalarField& phi) const { return energy_nonlocal_e0(*kop_, phi); }
  const KernelOperator& kernel() const { return *kop_; }

 private:
  const KernelOperator* kop_;
  LocalRelation stabilizer_;
};

/// The two model variants differ only in how mu is assembled from phi.
template <class R>
concept ChemicalPotentialRelation = requires(const R& r, const ScalarField& f,
                                             std::vector<Eigen::Triplet<double>>& t) {
  { r.implicit_apply(f) } -> std::same_as<ScalarField>;
  { r.explicit_apply(f) } -> std::same_as<ScalarField>;
  { r.add_implicit_jacobian(t, 2) } -> std::same_as<void>;
  { r.implicit_scale() } -> std::convertible_to<double>;
  { r.e0(f) } -> std::convertible_to<double>;
};

struct CHStepResult {
  ScalarField phi;
  ScalarField mu;
  /// Face values of phi^n used in the convective flux.
  VectorField face_phi;
  /// Mobility m(phi^n) on faces (without capillary relaxation).
  VectorField mobility;
  int newton_iterations = 0;
  double residual = 0.0;
};

/// Convex-split, first-order step of the convected Cahn-Hilliard equation
///
///   (phi+ - phi^n)/dt + div(phi^ v) = div(M grad mu+)
///   mu+ = F0'(phi+) + L_impl phi+ - theta_c phi^n - L_expl phi^n
///
/// solved by damped Newton on (w, mu+), w = F0'(phi+), so every iterate
/// phi+ = tanh(w / theta) stays inside (-1, 1) and F0' is never evaluated
/// near its singularity. Each Newton system is solved with a sparse LDL^T
/// factorization of the symmetric quasi-definite Jacobian in (phi, mu). When `capillary_density` is
/// given, the convecting velocity is v^n - dt phi^ grad mu+ / rho_f, which
/// appears as the extra mobility dt phi^2 / rho_f; the coupled solver uses
/// this to balance the capillary work exactly.
template <ChemicalPotentialRelation R>
class CahnHilliardStepper {
 public:
  CahnHilliardStepper(R relation, const PhysicalParams& params);
  ~CahnHilliardStepper();
  CahnHilliardStepper(CahnHilliardStepper&&) noexcept;
  CahnHilliardStepper& operator=(CahnHilliardStepper&&) noexcept;

  CHStepResult step(const ScalarField& phi_n, const VectorField& v_n, const CHStepConfig& cfg,
                    const VectorField* capillary_density = nullptr);

  /// mu = F'(phi) + L_impl phi - L_expl phi, the chemical potential of a given state.
  ScalarField chemical_potential(const ScalarField& phi) const;
  double e0(const ScalarField& phi) const { return relation_.e0(phi); }
  const R& relation() const { return relation_; }

 private:
  struct Factorization;
  R relation_;
  PhysicalParams params_;
  std::unique_ptr<Factorization> factor_;
};

extern template class CahnHilliardStepper<NonlocalRelation>;
extern template class CahnHilliardStepper<LocalRelation>;

/// Hybrid face values of phi for the velocity v: upwind where the cell
/// Peclet number |v| h / m_f reaches 2, central average elsewhere.
VectorField hybrid_face_values(const ScalarField& phi, const VectorField& v, const VectorField& mobility);

CHStepResult ch_step_nonlocal(const ScalarField& phi_n, const VectorField& v_n, const KernelOperator& kop,
                              const PhysicalParams& params, const CHStepConfig& cfg);
CHStepResult ch_step_local(const ScalarField& phi_n, const VectorField& v_n, const PhysicalParams& params,
                           const CHStepConfig& cfg);

}  // namespace nscheps
