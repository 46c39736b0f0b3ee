#include "nscheps/flow.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <array>
#include <cmath>
#include <sstream>

#include "nscheps/error.hpp"

namespace nscheps {

void FlowStepConfig::validate() const {
  if (!(dt > 0.0)) throw Error(ErrorKind::parameter, "flow step: dt must be positive");
  if (!(projection_tol > 0.0)) throw Error(ErrorKind::parameter, "flow step: projection_tol must be positive");
}

VectorField relative_flux(const ScalarField& phi, const ScalarField& mu, const PhysicalParams& params) {
  require_same_grid(phi.grid, mu.grid, "relative_flux");
  VectorField flux = apply_gradient(mu);
  const VectorField m = average_to_faces(coefficients(phi, params, Coefficient::m));
  const double c = -0.5 * (params.rho2 - params.rho1);
  for (std::size_t k = 0; k < flux.u.size(); ++k) flux.u[k] *= c * m.u[k];
  for (std::size_t k = 0; k < flux.v.size(); ++k) flux.v[k] *= c * m.v[k];
  return flux;
}

VectorField capillary_force(const ScalarField& phi, const ScalarField& mu) {
  require_same_grid(phi.grid, mu.grid, "capillary_force");
  VectorField f = apply_gradient(phi);
  const VectorField mu_f = average_to_faces(mu);
  for (std::size_t k = 0; k < f.u.size(); ++k) f.u[k] *= mu_f.u[k];
  for (std::size_t k = 0; k < f.v.size(); ++k) f.v[k] *= mu_f.v[k];
  return f;
}

VectorField capillary_force_conservative(const VectorField& face_phi, const ScalarField& mu) {
  require_same_grid(face_phi.grid, mu.grid, "capillary_force_conservative");
  VectorField f = apply_gradient(mu);
  for (std::size_t k = 0; k < f.u.size(); ++k) f.u[k] *= -face_phi.u[k];
  for (std::size_t k = 0; k < f.v.size(); ++k) f.v[k] *= -face_phi.v[k];
  return f;
}

namespace {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Numbering of the interior (unknown) faces: u faces first, then v faces.
struct FaceIndex {
  GridSpec g;
  int n_u = 0;
  int n_v = 0;

  explicit FaceIndex(const GridSpec& grid) : g(grid), n_u((grid.nx - 1) * grid.ny), n_v(grid.nx * (grid.ny - 1)) {}
  int size() const { return n_u + n_v; }
  int u(int i, int j) const {
    if (i <= 0 || i >= g.nx || j < 0 || j >= g.ny) return -1;
    return j * (g.nx - 1) + (i - 1);
  }
  int v(int i, int j) const {
    if (j <= 0 || j >= g.ny || i < 0 || i >= g.nx) return -1;
    return n_u + (j - 1) * g.nx + i;
  }

  Eigen::VectorXd gather(const VectorField& w) const {
    Eigen::VectorXd x(size());
    for (int j = 0; j < g.ny; ++j)
      for (int i = 1; i < g.nx; ++i) x[u(i, j)] = w.U(i, j);
    for (int j = 1; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) x[v(i, j)] = w.V(i, j);
    return x;
  }
  VectorField scatter(const Eigen::VectorXd& x) const {
    VectorField w(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 1; i < g.nx; ++i) w.U(i, j) = x[u(i, j)];
    for (int j = 1; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) w.V(i, j) = x[v(i, j)];
    return w;
  }
};

struct StrainEntry {
  int unknown;
  double coef;
};

/// One component of the discrete strain: sum_k coef_k x[unknown_k], with its
/// quadrature weight (2 nu h^2 for normal strains, nu A_node for shear).
struct StrainRow {
  std::array<StrainEntry, 4> entries{};
  int count = 0;
  double weight = 0.0;
  void add(int unknown, double coef) {
    if (unknown >= 0) entries[count++] = {unknown, coef};
  }
};

template <class Fn>
void for_each_strain_row(const FaceIndex& idx, const ScalarField& nu, Fn&& fn) {
  const GridSpec& g = idx.g;
  const double h = g.h();
  const double inv_h = 1.0 / h;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double w = 2.0 * nu(i, j) * h * h;
      StrainRow exx;
      exx.add(idx.u(i + 1, j), inv_h);
      exx.add(idx.u(i, j), -inv_h);
      exx.weight = w;
      fn(exx);
      StrainRow eyy;
      eyy.add(idx.v(i, j + 1), inv_h);
      eyy.add(idx.v(i, j), -inv_h);
      eyy.weight = w;
      fn(eyy);
    }
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      StrainRow gam;
      // du/dy at the node; walls use the half-cell distance to the no-slip value.
      if (j == 0) {
        gam.add(idx.u(i, 0), 2.0 * inv_h);
      } else if (j == g.ny) {
        gam.add(idx.u(i, g.ny - 1), -2.0 * inv_h);
      } else {
        gam.add(idx.u(i, j), inv_h);
        gam.add(idx.u(i, j - 1), -inv_h);
      }
      if (i == 0) {
        gam.add(idx.v(0, j), 2.0 * inv_h);
      } else if (i == g.nx) {
        gam.add(idx.v(g.nx - 1, j), -2.0 * inv_h);
      } else {
        gam.add(idx.v(i, j), inv_h);
        gam.add(idx.v(i - 1, j), -inv_h);
      }
      if (gam.count == 0) continue;
      double nu_sum = 0.0;
      int nu_count = 0;
      for (int dj = -1; dj <= 0; ++dj)
        for (int di = -1; di <= 0; ++di) {
          const int ci = i + di;
          const int cj = j + dj;
          if (ci < 0 || ci >= g.nx || cj < 0 || cj >= g.ny) continue;
          nu_sum += nu(ci, cj);
          ++nu_count;
        }
      const double area = h * h * ((j == 0 || j == g.ny) ? 0.5 : 1.0) * ((i == 0 || i == g.nx) ? 0.5 : 1.0);
      gam.weight = (nu_sum / nu_count) * area;
      fn(gam);
    }
}

/// Appends the skew-symmetric convection operator of the face mass flux F.
void add_convection(const FaceIndex& idx, const VectorField& F, std::vector<Eigen::Triplet<double>>& t) {
  const GridSpec& g = idx.g;
  const double c = 0.5 / g.h();  // (1 / 2V) * (face length h) with V = h^2
  auto add = [&](int row, int col, double flux) {
    if (row >= 0 && col >= 0) t.emplace_back(row, col, c * flux);
  };
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i) {
      const int k = idx.u(i, j);
      add(k, idx.u(i + 1, j), 0.5 * (F.U(i, j) + F.U(i + 1, j)));
      add(k, idx.u(i - 1, j), -0.5 * (F.U(i - 1, j) + F.U(i, j)));
      add(k, idx.u(i, j + 1), 0.5 * (F.V(i - 1, j + 1) + F.V(i, j + 1)));
      add(k, idx.u(i, j - 1), -0.5 * (F.V(i - 1, j) + F.V(i, j)));
    }
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int k = idx.v(i, j);
      add(k, idx.v(i, j + 1), 0.5 * (F.V(i, j) + F.V(i, j + 1)));
      add(k, idx.v(i, j - 1), -0.5 * (F.V(i, j - 1) + F.V(i, j)));
      add(k, idx.v(i + 1, j), 0.5 * (F.U(i + 1, j - 1) + F.U(i + 1, j)));
      add(k, idx.v(i - 1, j), -0.5 * (F.U(i, j - 1) + F.U(i, j)));
    }
}

void add_viscous(const FaceIndex& idx, const ScalarField& nu, double scale,
                 std::vector<Eigen::Triplet<double>>& t) {
  for_each_strain_row(idx, nu, [&](const StrainRow& row) {
    for (int a = 0; a < row.count; ++a)
      for (int b = 0; b < row.count; ++b)
        t.emplace_back(row.entries[a].unknown, row.entries[b].unknown,
                       scale * row.weight * row.entries[a].coef * row.entries[b].coef);
  });
}

VectorField inverse_face_density(const ScalarField& phi, const PhysicalParams& params, double dt) {
  VectorField c = average_to_faces(coefficients(phi, params, Coefficient::rho));
  for (double& x : c.u) x = dt / x;
  for (double& x : c.v) x = dt / x;
  return c;
}

}  // namespace

double viscous_dissipation(const VectorField& v, const ScalarField& nu) {
  require_same_grid(v.grid, nu.grid, "viscous_dissipation");
  const FaceIndex idx(v.grid);
  const Eigen::VectorXd x = idx.gather(v);
  double d = 0.0;
  for_each_strain_row(idx, nu, [&](const StrainRow& row) {
    double s = 0.0;
    for (int a = 0; a < row.count; ++a) s += row.entries[a].coef * x[row.entries[a].unknown];
    d += row.weight * s * s;
  });
  return d;
}

struct FlowSolver::Impl {
  PhysicalParams params;
  // Two factorizations: the rho^{n+1} projection of one step is the rho^n
  // projection of the next.
  std::unique_ptr<NeumannPoissonSolver> projector_a = std::make_unique<NeumannPoissonSolver>();
  std::unique_ptr<NeumannPoissonSolver> projector_b = std::make_unique<NeumannPoissonSolver>();

  static bool matches(const NeumannPoissonSolver& s, const VectorField& coeff) {
    return s.ready() && s.coefficients().grid == coeff.grid && s.coefficients().u == coeff.u &&
           s.coefficients().v == coeff.v;
  }

  NeumannPoissonSolver& projector_for(const VectorField& coeff) {
    if (matches(*projector_a, coeff)) return *projector_a;
    if (matches(*projector_b, coeff)) return *projector_b;
    std::swap(projector_a, projector_b);
    projector_a->set_coefficients(coeff);
    return *projector_a;
  }

  /// Returns the projected field and adds the pressure to `pressure`.
  VectorField project(const VectorField& w, const VectorField& coeff, ScalarField& pressure) {
    NeumannPoissonSolver& solver = projector_for(coeff);
    ScalarField rhs = apply_divergence(w);
    for (double& x : rhs.values) x = -x;
    const ScalarField p = solver.solve(rhs);
    const VectorField gp = apply_gradient(p);
    VectorField out = w;
    for (std::size_t k = 0; k < out.u.size(); ++k) out.u[k] -= coeff.u[k] * gp.u[k];
    for (std::size_t k = 0; k < out.v.size(); ++k) out.v[k] -= coeff.v[k] * gp.v[k];
    out.zero_boundary();
    for (std::size_t k = 0; k < p.size(); ++k) pressure.values[k] += p.values[k];
    return out;
  }
};

FlowSolver::FlowSolver(const PhysicalParams& params) : impl_(std::make_unique<Impl>()) {
  params.validate();
  impl_->params = params;
}
FlowSolver::~FlowSolver() = default;
FlowSolver::FlowSolver(FlowSolver&&) noexcept = default;
FlowSolver& FlowSolver::operator=(FlowSolver&&) noexcept = default;

FlowStepResult FlowSolver::step(const FlowStepInputs& in, const FlowStepConfig& cfg) {
  cfg.validate();
  const GridSpec& g = in.velocity.grid;
  require_same_grid(g, in.phi_old.grid, "ns_step");
  require_same_grid(g, in.phi_new.grid, "ns_step");
  require_same_grid(g, in.mu.grid, "ns_step");
  require_same_grid(g, in.force.grid, "ns_step");
  const PhysicalParams& params = impl_->params;
  const double dt = cfg.dt;

  const VectorField rho_old = average_to_faces(coefficients(in.phi_old, params, Coefficient::rho));
  const VectorField rho_new = average_to_faces(coefficients(in.phi_new, params, Coefficient::rho));
  const ScalarField nu = coefficients(in.phi_new, params, Coefficient::nu);

  FlowStepResult out;
  out.pressure = ScalarField(g);

  // Body force with rho^n, then rho^n-weighted projection.
  VectorField v_tilde = in.velocity;
  for (std::size_t k = 0; k < v_tilde.u.size(); ++k) v_tilde.u[k] += dt * in.force.u[k] / rho_old.u[k];
  for (std::size_t k = 0; k < v_tilde.v.size(); ++k) v_tilde.v[k] += dt * in.force.v[k] / rho_old.v[k];
  v_tilde.zero_boundary();
  const VectorField w = impl_->project(v_tilde, inverse_face_density(in.phi_old, params, dt), out.pressure);

  // Mass flux rho^n w + J~ for the convection operator.
  VectorField mass_flux = relative_flux(in.phi_old, in.mu, params);
  for (std::size_t k = 0; k < mass_flux.u.size(); ++k) mass_flux.u[k] += rho_old.u[k] * w.u[k];
  for (std::size_t k = 0; k < mass_flux.v.size(); ++k) mass_flux.v[k] += rho_old.v[k] * w.v[k];
  mass_flux.zero_boundary();

  const FaceIndex idx(g);
  const int n = idx.size();
  const Eigen::VectorXd w_int = idx.gather(w);
  const Eigen::VectorXd rho_new_int = idx.gather(rho_new);
  const Eigen::VectorXd rho_old_int = idx.gather(rho_old);
  Eigen::VectorXd rhs(n);
  for (int k = 0; k < n; ++k) rhs[k] = std::sqrt(rho_new_int[k] * rho_old_int[k]) * w_int[k] / dt;

  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(n) * 16);
  add_convection(idx, mass_flux, t);
  const double inv_h2 = 1.0 / (g.h() * g.h());
  add_viscous(idx, nu, inv_h2, t);
  SparseMatrix ops(n, n);
  ops.setFromTriplets(t.begin(), t.end());

  Eigen::VectorXd v_star_int;
  if (cfg.viscous_treatment == ViscousTreatment::semi_implicit) {
    SparseMatrix a = ops;
    for (int k = 0; k < n; ++k) a.coeffRef(k, k) += rho_new_int[k] / dt;
    Eigen::BiCGSTAB<SparseMatrix> solver;
    solver.setTolerance(cfg.momentum_tol);
    solver.setMaxIterations(cfg.projection_max_iter);
    solver.compute(a);
    v_star_int = solver.solve(rhs);
    out.momentum_iterations = static_cast<int>(solver.iterations());
    const double rel = rhs.norm() > 0.0 ? (rhs - a * v_star_int).norm() / rhs.norm() : 0.0;
    if (!(rel <= 1e-9)) {
      std::ostringstream os;
      os << "flow step: momentum solve did not converge (relative residual " << rel << ")";
      throw StepFailure(os.str(), rel);
    }
  } else {
    double cfl = 0.0;
    for (int k = 0; k < n; ++k) cfl = std::max(cfl, std::abs(w_int[k]) * dt / g.h());
    if (cfl > 1.0) {
      std::ostringstream os;
      os << "flow step: CFL number " << cfl << " exceeds 1 under explicit viscosity";
      throw StepFailure(os.str(), cfl);
    }
    const Eigen::VectorXd explicit_terms = ops * w_int;
    v_star_int.resize(n);
    for (int k = 0; k < n; ++k) v_star_int[k] = dt * (rhs[k] - explicit_terms[k]) / rho_new_int[k];
  }
  out.predictor = idx.scatter(v_star_int);
  out.viscous_dissipation = viscous_dissipation(out.predictor, nu);

  out.velocity = impl_->project(out.predictor, inverse_face_density(in.phi_new, params, dt), out.pressure);
  const double mean = field_norm(out.pressure, NormKind::mean);
  for (double& p : out.pressure.values) p -= mean;

  out.divergence_norm = field_norm(apply_divergence(out.velocity), NormKind::L2);
  if (!(out.divergence_norm <= cfg.projection_tol)) {
    std::ostringstream os;
    os << "flow step: projection left |div v| = " << out.divergence_norm;
    throw StepFailure(os.str(), out.divergence_norm);
  }
  return out;
}

FlowStepResult ns_step(const FlowStepInputs& in, const PhysicalParams& params, const FlowStepConfig& cfg) {
  FlowSolver solver(params);
  return solver.step(in, cfg);
}

}  // namespace nscheps
