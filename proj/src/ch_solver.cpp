#include "nscheps/ch_solver.hpp"

#include <algorithm>
#include <cmath>

#include "nscheps/error.hpp"
#include "nscheps/newton.hpp"

namespace nscheps {

static_assert(ChemicalPotentialRelation<NonlocalRelation>);
static_assert(ChemicalPotentialRelation<LocalRelation>);

void CHStepConfig::validate() const {
  if (!(dt > 0.0)) throw Error(ErrorKind::parameter, "CH step: dt must be positive");
  if (!(phi_cap > 0.0 && phi_cap < 1.0)) throw Error(ErrorKind::parameter, "CH step: phi_cap must lie in (0,1)");
  if (!(newton_tol > 0.0) || newton_max_iter < 1) throw Error(ErrorKind::parameter, "CH step: bad Newton settings");
}

ScalarField NonlocalRelation::explicit_apply(const ScalarField& phi) const {
  ScalarField out = stabilizer_.implicit_apply(phi);
  const ScalarField n = kop_->nonlocal_operator(phi);
  for (std::size_t k = 0; k < out.size(); ++k) out.values[k] -= n.values[k];
  return out;
}

ScalarField LocalRelation::implicit_apply(const ScalarField& phi) const {
  ScalarField out = laplace_neumann_faces(phi, VectorField(phi.grid, 1.0));
  for (double& x : out.values) x *= -scale_;
  return out;
}

void LocalRelation::add_implicit_jacobian(std::vector<Eigen::Triplet<double>>& t, int stride) const {
  const double c = scale_ / (grid_.h() * grid_.h());
  auto link = [&](std::size_t p, std::size_t q) {
    const int a = stride * static_cast<int>(p);
    const int b = stride * static_cast<int>(q);
    t.emplace_back(a, a, c);
    t.emplace_back(b, b, c);
    t.emplace_back(a, b, -c);
    t.emplace_back(b, a, -c);
  };
  for (int j = 0; j < grid_.ny; ++j)
    for (int i = 1; i < grid_.nx; ++i) link(grid_.cell(i - 1, j), grid_.cell(i, j));
  for (int j = 1; j < grid_.ny; ++j)
    for (int i = 0; i < grid_.nx; ++i) link(grid_.cell(i, j - 1), grid_.cell(i, j));
}

double LocalRelation::implicit_scale() const { return 1.0 + 4.0 * scale_ / (grid_.h() * grid_.h()); }

VectorField hybrid_face_values(const ScalarField& phi, const VectorField& v, const VectorField& mobility) {
  require_same_grid(phi.grid, v.grid, "hybrid_face_values");
  require_same_grid(phi.grid, mobility.grid, "hybrid_face_values");
  const GridSpec& g = phi.grid;
  const double h = g.h();
  VectorField out(g);
  auto pick = [h](double vel, double m, double lo, double hi) {
    if (std::abs(vel) * h < 2.0 * m) return 0.5 * (lo + hi);
    return vel > 0.0 ? lo : hi;
  };
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i) out.U(i, j) = pick(v.U(i, j), mobility.U(i, j), phi(i - 1, j), phi(i, j));
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) out.V(i, j) = pick(v.V(i, j), mobility.V(i, j), phi(i, j - 1), phi(i, j));
  return out;
}

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;

// Unknowns interleaved as (w_k, mu_k) with w = F0'(phi), phi = tanh(w / theta).
// Residuals:
//   r[2k+1] = R1 = phi - phi^n + dt conv - dt div(M grad mu)
//   r[2k]   = R2 = mu - w - L_impl phi + explicit_rhs
// The Newton direction is computed in (phi, mu) and mapped back along a
// curve that never leaves (-1, 1).
template <ChemicalPotentialRelation R>
class CahnHilliardProblem final : public NewtonProblem {
 public:
  CahnHilliardProblem(const R& relation, const PhysicalParams& params, const CHStepConfig& cfg,
                      const ScalarField& phi_n, const ScalarField& convection, const ScalarField& explicit_rhs,
                      const VectorField& transport_mobility, Eigen::SimplicialLDLT<SparseMatrix>& ldlt,
                      bool& analyzed)
      : relation_(relation),
        params_(params),
        cfg_(cfg),
        phi_n_(phi_n),
        convection_(convection),
        explicit_rhs_(explicit_rhs),
        mobility_(transport_mobility),
        ldlt_(ldlt),
        analyzed_(analyzed),
        scale_(relation.implicit_scale()),
        phi_(phi_n.grid),
        mu_(phi_n.grid) {}

  void residual(std::span<const double> x, std::span<double> r) override {
    unpack(x);
    const ScalarField diffusion = laplace_neumann_faces(mu_, mobility_);
    const ScalarField implicit = relation_.implicit_apply(phi_);
    const double dt = cfg_.dt;
    for (std::size_t k = 0; k < phi_.size(); ++k) {
      r[2 * k + 1] = phi_.values[k] - phi_n_.values[k] + dt * convection_.values[k] - dt * diffusion.values[k];
      r[2 * k] = mu_.values[k] - x[2 * k] - implicit.values[k] + explicit_rhs_.values[k];
    }
  }

  double residual_norm(std::span<const double> r) const override {
    double m = 0.0;
    for (std::size_t k = 0; k < r.size(); k += 2) {
      m = std::max(m, std::abs(r[k]) / scale_);
      m = std::max(m, std::abs(r[k + 1]));
    }
    return m;
  }

  double merit(std::span<const double> r) const override {
    double s = 0.0;
    for (std::size_t k = 0; k < r.size(); k += 2) {
      const double a = r[k] / scale_;
      s += a * a + r[k + 1] * r[k + 1];
    }
    return std::sqrt(s);
  }

  // dx holds (dphi, dmu). Cells moving towards the nearer pure phase update
  // w linearly; the others update phi linearly, evaluated through
  // atanh(a) - atanh(b) = atanh((a - b)/(1 - ab)) with 1 - phi^2 taken from w.
  void retract(std::span<const double> x, std::span<const double> dx, double alpha,
               std::span<double> out) const override {
    const double th = params_.theta;
    for (std::size_t k = 0; k < x.size(); k += 2) {
      const double w = x[k];
      const double c = std::cosh(w / th);
      const double step = alpha * dx[k];
      if (step * w > 0.0) {
        out[k] = w + th * c * c * step;
      } else {
        const double arg = step / (1.0 / (c * c) - std::tanh(w / th) * step);
        out[k] = std::abs(arg) < 1.0 ? w + th * std::atanh(arg) : std::copysign(INFINITY, step);
      }
      out[k + 1] = x[k + 1] + alpha * dx[k + 1];
    }
  }

  // Outward moves in w are capped at 2 theta per iteration.
  double max_step(std::span<const double> x, std::span<const double> dx) const override {
    const double th = params_.theta;
    double alpha = 1.0;
    for (std::size_t k = 0; k < x.size(); k += 2) {
      if (dx[k] * x[k] <= 0.0) continue;
      const double c = std::cosh(x[k] / th);
      const double dw = th * c * c * std::abs(dx[k]);
      if (dw > 2.0 * th) alpha = std::min(alpha, 2.0 * th / dw);
    }
    return alpha;
  }

  bool admissible(std::span<const double> x) const override {
    for (std::size_t k = 0; k < x.size(); k += 2)
      if (!(std::abs(std::tanh(x[k] / params_.theta)) <= cfg_.phi_cap)) return false;
    return true;
  }

  void solve_linearized(std::span<const double> x, std::span<const double> r, std::span<double> dx) override {
    const GridSpec& g = phi_n_.grid;
    const int n = static_cast<int>(2 * g.cells());
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(n) * 8);
    for (std::size_t k = 0; k < g.cells(); ++k) {
      const int p = static_cast<int>(2 * k);
      const double ch = std::cosh(x[2 * k] / params_.theta);
      t.emplace_back(p, p, params_.theta * ch * ch);
      t.emplace_back(p, p + 1, -1.0);
      t.emplace_back(p + 1, p, -1.0);
    }
    relation_.add_implicit_jacobian(t, 2);
    const double c = cfg_.dt / (g.h() * g.h());
    auto link = [&](std::size_t a, std::size_t b, double m) {
      const int pa = static_cast<int>(2 * a + 1);
      const int pb = static_cast<int>(2 * b + 1);
      t.emplace_back(pa, pa, -c * m);
      t.emplace_back(pb, pb, -c * m);
      t.emplace_back(pa, pb, c * m);
      t.emplace_back(pb, pa, c * m);
    };
    for (int j = 0; j < g.ny; ++j)
      for (int i = 1; i < g.nx; ++i) link(g.cell(i - 1, j), g.cell(i, j), mobility_.U(i, j));
    for (int j = 1; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) link(g.cell(i, j - 1), g.cell(i, j), mobility_.V(i, j));

    SparseMatrix jac(n, n);
    jac.setFromTriplets(t.begin(), t.end());
    if (!analyzed_) {
      ldlt_.analyzePattern(jac);
      analyzed_ = true;
    }
    ldlt_.factorize(jac);
    if (ldlt_.info() != Eigen::Success) throw StepFailure("CH step: Jacobian factorization failed", INFINITY);

    // J dx = -r  <=>  S dx = r with S the symmetric form [[H, -I], [-I, -dt A]].
    Eigen::Map<const Eigen::VectorXd> rhs(r.data(), n);
    Eigen::VectorXd sol = ldlt_.solve(rhs);
    Eigen::VectorXd res = rhs - jac * sol;
    if (res.lpNorm<Eigen::Infinity>() > cfg_.linear_tol * std::max(1.0, rhs.lpNorm<Eigen::Infinity>()))
      sol += ldlt_.solve(res);
    for (int k = 0; k < n; ++k) dx[k] = sol[k];
  }

  void unpack(std::span<const double> x) {
    for (std::size_t k = 0; k < phi_.size(); ++k) {
      phi_.values[k] = std::tanh(x[2 * k] / params_.theta);
      mu_.values[k] = x[2 * k + 1];
    }
  }

 private:
  const R& relation_;
  const PhysicalParams& params_;
  const CHStepConfig& cfg_;
  const ScalarField& phi_n_;
  const ScalarField& convection_;
  const ScalarField& explicit_rhs_;
  const VectorField& mobility_;
  Eigen::SimplicialLDLT<SparseMatrix>& ldlt_;
  bool& analyzed_;
  double scale_;
  ScalarField phi_;
  ScalarField mu_;
};

}  // namespace

template <ChemicalPotentialRelation R>
struct CahnHilliardStepper<R>::Factorization {
  Eigen::SimplicialLDLT<SparseMatrix> ldlt;
  bool analyzed = false;
};

template <ChemicalPotentialRelation R>
CahnHilliardStepper<R>::CahnHilliardStepper(R relation, const PhysicalParams& params)
    : relation_(std::move(relation)), params_(params), factor_(std::make_unique<Factorization>()) {
  params_.validate();
}

template <ChemicalPotentialRelation R>
CahnHilliardStepper<R>::~CahnHilliardStepper() = default;
template <ChemicalPotentialRelation R>
CahnHilliardStepper<R>::CahnHilliardStepper(CahnHilliardStepper&&) noexcept = default;
template <ChemicalPotentialRelation R>
CahnHilliardStepper<R>& CahnHilliardStepper<R>::operator=(CahnHilliardStepper&&) noexcept = default;

template <ChemicalPotentialRelation R>
ScalarField CahnHilliardStepper<R>::chemical_potential(const ScalarField& phi) const {
  ScalarField mu = relation_.implicit_apply(phi);
  const ScalarField ex = relation_.explicit_apply(phi);
  for (std::size_t k = 0; k < mu.size(); ++k)
    mu.values[k] += potential(phi.values[k], PotentialPart::F_prime, params_) - ex.values[k];
  return mu;
}

template <ChemicalPotentialRelation R>
CHStepResult CahnHilliardStepper<R>::step(const ScalarField& phi_n, const VectorField& v_n, const CHStepConfig& cfg,
                                          const VectorField* capillary_density) {
  cfg.validate();
  require_same_grid(phi_n.grid, v_n.grid, "CH step");
  for (double p : phi_n.values)
    if (!(std::abs(p) < 1.0)) throw Error(ErrorKind::range, "CH step: input phi must satisfy |phi| < 1");

  const GridSpec& g = phi_n.grid;
  CHStepResult out;
  out.mobility = average_to_faces(coefficients(phi_n, params_, Coefficient::m));
  out.face_phi = hybrid_face_values(phi_n, v_n, out.mobility);

  VectorField flux(g);
  for (std::size_t k = 0; k < flux.u.size(); ++k) flux.u[k] = out.face_phi.u[k] * v_n.u[k];
  for (std::size_t k = 0; k < flux.v.size(); ++k) flux.v[k] = out.face_phi.v[k] * v_n.v[k];
  flux.zero_boundary();
  const ScalarField convection = apply_divergence(flux);

  VectorField transport = out.mobility;
  if (capillary_density) {
    require_same_grid(g, capillary_density->grid, "CH step");
    for (std::size_t k = 0; k < transport.u.size(); ++k)
      transport.u[k] += cfg.dt * out.face_phi.u[k] * out.face_phi.u[k] / capillary_density->u[k];
    for (std::size_t k = 0; k < transport.v.size(); ++k)
      transport.v[k] += cfg.dt * out.face_phi.v[k] * out.face_phi.v[k] / capillary_density->v[k];
  }

  ScalarField explicit_rhs = relation_.explicit_apply(phi_n);
  for (std::size_t k = 0; k < explicit_rhs.size(); ++k) explicit_rhs.values[k] += params_.theta_c * phi_n.values[k];

  const ScalarField implicit = relation_.implicit_apply(phi_n);
  std::vector<double> x0(2 * g.cells());
  for (std::size_t k = 0; k < g.cells(); ++k) {
    x0[2 * k] = potential(phi_n.values[k], PotentialPart::F0_prime, params_);
    x0[2 * k + 1] = x0[2 * k] + implicit.values[k] - explicit_rhs.values[k];
  }

  CahnHilliardProblem<R> problem(relation_, params_, cfg, phi_n, convection, explicit_rhs, transport, factor_->ldlt,
                                 factor_->analyzed);
  NewtonOptions opts;
  opts.tol = cfg.newton_tol;
  opts.max_iter = cfg.newton_max_iter;
  NewtonResult res = newton_solve(problem, std::move(x0), opts);

  out.phi = ScalarField(g);
  out.mu = ScalarField(g);
  for (std::size_t k = 0; k < g.cells(); ++k) {
    out.phi.values[k] = std::tanh(res.x[2 * k] / params_.theta);
    out.mu.values[k] = res.x[2 * k + 1];
  }
  out.newton_iterations = res.iterations;
  out.residual = res.residual;
  return out;
}

template class CahnHilliardStepper<NonlocalRelation>;
template class CahnHilliardStepper<LocalRelation>;

CHStepResult ch_step_nonlocal(const ScalarField& phi_n, const VectorField& v_n, const KernelOperator& kop,
                              const PhysicalParams& params, const CHStepConfig& cfg) {
  require_same_grid(phi_n.grid, kop.grid(), "ch_step_nonlocal");
  CahnHilliardStepper<NonlocalRelation> stepper(NonlocalRelation(kop), params);
  return stepper.step(phi_n, v_n, cfg);
}

CHStepResult ch_step_local(const ScalarField& phi_n, const VectorField& v_n, const PhysicalParams& params,
                           const CHStepConfig& cfg) {
  CahnHilliardStepper<LocalRelation> stepper(LocalRelation(phi_n.grid), params);
  return stepper.step(phi_n, v_n, cfg);
}

}  // namespace nscheps
