#include "nscheps/coupled.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <variant>

#include "nscheps/error.hpp"

namespace nscheps {

std::string ModelVariant::label() const {
  if (!is_nonlocal()) return "local";
  char buf[64];
  std::snprintf(buf, sizeof buf, "nonlocal(eps=%g)", eps);
  return buf;
}

void RunConfig::validate() const {
  GridSpec::make(grid.nx, grid.ny, grid.lx, grid.ly);
  params.validate();
  if (variant.is_nonlocal() && !(variant.eps > 0.0 && std::isfinite(variant.eps)))
    throw Error(ErrorKind::parameter, "eps must be positive");
  if (!(dt > 0.0 && std::isfinite(dt))) throw Error(ErrorKind::parameter, "dt must be positive");
  if (!(T >= 0.0 && std::isfinite(T))) throw Error(ErrorKind::parameter, "T must be nonnegative");
  if (T > 0.0 && dt > T) throw Error(ErrorKind::parameter, "dt must not exceed T");
  if (snapshot_count < 0) throw Error(ErrorKind::parameter, "snapshot_count must be nonnegative");
  if (solver.max_halvings < 0) throw Error(ErrorKind::parameter, "max_halvings must be nonnegative");
  solver.ch.validate();
  solver.flow.validate();
}

int RunConfig::step_count() const {
  if (T <= 0.0) return 0;
  return std::max(1, static_cast<int>(std::ceil(T / dt - 1e-9)));
}

std::vector<int> snapshot_steps(int total_steps, int count) {
  std::vector<int> out{0};
  for (int k = 1; k <= count && total_steps > 0; ++k) {
    const int s = static_cast<int>(std::llround(static_cast<double>(k) * total_steps / count));
    if (s > out.back()) out.push_back(s);
  }
  return out;
}

using AnyStepper = std::variant<CahnHilliardStepper<NonlocalRelation>, CahnHilliardStepper<LocalRelation>>;

struct Simulation::Impl {
  RunConfig cfg;
  std::unique_ptr<KernelOperator> kop;
  std::optional<AnyStepper> stepper;
  std::optional<FlowSolver> flow;
  SimState state;

  explicit Impl(const RunConfig& c) : cfg(c) {
    cfg.validate();
    if (cfg.variant.is_nonlocal()) {
      kop = std::make_unique<KernelOperator>(KernelOperator::build(cfg.grid, build_mollifier(2, cfg.variant.eps)));
      stepper.emplace(std::in_place_index<0>, NonlocalRelation(*kop), cfg.params);
    } else {
      stepper.emplace(std::in_place_index<1>, LocalRelation(cfg.grid), cfg.params);
    }
    flow.emplace(cfg.params);
  }

  ScalarField mu_of(const ScalarField& phi) const {
    return std::visit([&](const auto& s) { return s.chemical_potential(phi); }, *stepper);
  }

  EnergyRecord record(const SimState& s, double dissipation, double cum, double div_norm) const {
    const EnergyParts e = total_energy(s.v, s.phi, kop.get(), cfg.params);
    EnergyRecord r;
    r.t = s.t;
    r.kinetic = e.kinetic;
    r.e0 = e.e0;
    r.potential = e.potential;
    r.dissipation = dissipation;
    r.dissipation_cum = cum;
    r.mass_mean = field_norm(s.phi, NormKind::mean);
    r.max_abs_phi = max_abs(s.phi);
    r.div_v_norm = div_norm;
    return r;
  }

  void init(const ScalarField& phi0, const VectorField& v0) {
    require_same_grid(cfg.grid, phi0.grid, "initial phi");
    require_same_grid(cfg.grid, v0.grid, "initial velocity");
    require_finite(phi0, "initial phi");
    for (double p : phi0.values)
      if (!(std::abs(p) < 1.0)) throw Error(ErrorKind::range, "initial phi must satisfy |phi| < 1");
    if (!v0.boundary_is_zero()) throw Error(ErrorKind::domain, "initial velocity must vanish on the walls");
    state.t = 0.0;
    state.phi = phi0;
    state.v = v0;
    state.p = ScalarField(cfg.grid);
    state.mu = mu_of(phi0);
    state.initial = record(state, 0.0, 0.0, field_norm(apply_divergence(v0), NormKind::L2));
    state.energy_history.clear();
  }

  struct Increment {
    ScalarField phi, mu, p;
    VectorField v;
    double dt = 0.0;
    double dissipation = 0.0;
    double div_norm = 0.0;
  };

  Increment single(const ScalarField& phi_n, const VectorField& v_n, double dt) {
    CHStepConfig ch_cfg = cfg.solver.ch;
    ch_cfg.dt = dt;
    FlowStepConfig flow_cfg = cfg.solver.flow;
    flow_cfg.dt = dt;

    const VectorField rho_faces = average_to_faces(coefficients(phi_n, cfg.params, Coefficient::rho));
    CHStepResult ch =
        std::visit([&](auto& s) { return s.step(phi_n, v_n, ch_cfg, &rho_faces); }, *stepper);
    const VectorField force = capillary_force_conservative(ch.face_phi, ch.mu);
    FlowStepResult fl = flow->step({v_n, phi_n, ch.phi, ch.mu, force}, flow_cfg);

    const VectorField grad_mu = apply_gradient(ch.mu);
    double chem = 0.0;
    for (std::size_t k = 0; k < grad_mu.u.size(); ++k) chem += ch.mobility.u[k] * grad_mu.u[k] * grad_mu.u[k];
    for (std::size_t k = 0; k < grad_mu.v.size(); ++k) chem += ch.mobility.v[k] * grad_mu.v[k] * grad_mu.v[k];
    const double h = cfg.grid.h();
    chem *= h * h;

    Increment inc;
    inc.phi = std::move(ch.phi);
    inc.mu = std::move(ch.mu);
    inc.v = std::move(fl.velocity);
    inc.p = std::move(fl.pressure);
    inc.dt = dt;
    inc.dissipation = dt * (chem + fl.viscous_dissipation);
    inc.div_norm = fl.divergence_norm;
    return inc;
  }

  void advance(const ScalarField& phi_n, const VectorField& v_n, double dt, int depth, std::vector<Increment>& out) {
    try {
      out.push_back(single(phi_n, v_n, dt));
      return;
    } catch (const StepFailure&) {
      if (depth >= cfg.solver.max_halvings) throw;
    }
    advance(phi_n, v_n, 0.5 * dt, depth + 1, out);
    const ScalarField phi_mid = out.back().phi;
    const VectorField v_mid = out.back().v;
    advance(phi_mid, v_mid, 0.5 * dt, depth + 1, out);
  }

  void step(double dt) {
    if (!(dt > 0.0 && std::isfinite(dt))) throw Error(ErrorKind::parameter, "step: dt must be positive");
    std::vector<Increment> subs;
    advance(state.phi, state.v, dt, 0, subs);
    double dissipation = 0.0;
    for (const Increment& s : subs) dissipation += s.dissipation;
    Increment& last = subs.back();
    state.t += dt;
    state.phi = std::move(last.phi);
    state.mu = std::move(last.mu);
    state.v = std::move(last.v);
    state.p = std::move(last.p);
    const double cum =
        (state.energy_history.empty() ? 0.0 : state.energy_history.back().dissipation_cum) + dissipation;
    state.energy_history.push_back(record(state, dissipation, cum, last.div_norm));
  }
};

Simulation::Simulation(const RunConfig& cfg) : impl_(std::make_unique<Impl>(cfg)) {
  impl_->init(make_initial_phi(cfg.grid, cfg.preset, cfg.seed), VectorField(cfg.grid));
}

Simulation::Simulation(const RunConfig& cfg, const ScalarField& phi0, const VectorField& v0)
    : impl_(std::make_unique<Impl>(cfg)) {
  impl_->init(phi0, v0);
}

Simulation::~Simulation() = default;
Simulation::Simulation(Simulation&&) noexcept = default;
Simulation& Simulation::operator=(Simulation&&) noexcept = default;

const SimState& Simulation::state() const { return impl_->state; }
const RunConfig& Simulation::config() const { return impl_->cfg; }
const KernelOperator* Simulation::kernel() const { return impl_->kop.get(); }
void Simulation::step(double dt) { impl_->step(dt); }

EnergyParts Simulation::energy(const VectorField& v, const ScalarField& phi) const {
  return total_energy(v, phi, impl_->kop.get(), impl_->cfg.params);
}

ScalarField Simulation::chemical_potential(const ScalarField& phi) const { return impl_->mu_of(phi); }

RunResult run_simulation(const RunConfig& cfg, const StepObserver& observer) {
  Simulation sim(cfg);
  RunResult out;
  const int n = cfg.step_count();
  const std::vector<int> snaps = snapshot_steps(n, cfg.snapshot_count);
  auto snapshot = [&](const SimState& s) {
    SimState copy = s;
    copy.energy_history.clear();
    out.snapshots.push_back(std::move(copy));
  };
  snapshot(sim.state());
  std::size_t next_snap = 1;
  for (int k = 1; k <= n; ++k) {
    const double dt = (k == n) ? cfg.T - (n - 1) * cfg.dt : cfg.dt;
    try {
      sim.step(dt);
    } catch (const StepFailure& e) {
      out.failure = e.what();
      break;
    }
    if (observer) observer(sim.state(), k, n);
    if (next_snap < snaps.size() && snaps[next_snap] == k) {
      snapshot(sim.state());
      ++next_snap;
    }
  }
  out.final_state = sim.state();
  out.timeseries.push_back(out.final_state.initial);
  out.timeseries.insert(out.timeseries.end(), out.final_state.energy_history.begin(),
                        out.final_state.energy_history.end());
  return out;
}

}  // namespace nscheps
