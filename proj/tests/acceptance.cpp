// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset; the exit status is nonzero if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <set>
#include <string>

#include "nscheps/analysis.hpp"
#include "nscheps/ch_solver.hpp"
#include "nscheps/config.hpp"
#include "nscheps/coupled.hpp"
#include "nscheps/kernel.hpp"
#include "oracles.hpp"

using namespace nscheps;
using std::numbers::pi;

namespace {

struct Verdict {
  bool ok = false;
  std::string detail;
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
  return buf;
}

std::string config_path(const char* name) { return std::string(NSCHEPS_SOURCE_DIR) + "/configs/" + name; }

GridSpec unit(int n) { return GridSpec::make(n, n, 1.0, 1.0); }

ScalarField cos_x(const GridSpec& g) {
  return ScalarField::sample(g, [](double x, double) { return std::cos(pi * x); });
}

Verdict kernel_normalization() {
  double worst = 0.0;
  bool amplitude = true;
  for (double eps : {0.2, 0.1, 0.05, 0.02}) {
    const MollifierFamily m = build_mollifier(2, eps);
    worst = std::max(worst, std::abs(m.moment() - 2.0 / pi));
    amplitude = amplitude && m.amplitude == 48.0 / pi;
  }
  return {worst <= 1e-10 && amplitude, fmt("max |moment - 2/pi| = %.3e, amplitude 48/pi ", worst) +
                                           (amplitude ? "exact" : "WRONG")};
}

Verdict convolution_oracle() {
  const GridSpec g = unit(32);
  double worst = 0.0;
  for (double eps : {0.2, 0.1}) {
    const KernelOperator op = KernelOperator::build(g, build_mollifier(2, eps));
    for (unsigned seed = 0; seed < 20; ++seed) {
      const ScalarField phi = oracle::random_field(g, 100 + seed);
      const ScalarField fast = op.convolve(phi);
      const ScalarField slow = oracle::direct_convolution(phi, eps);
      worst = std::max(worst, max_abs(fast - slow) / max_abs(slow));
    }
  }
  return {worst <= 1e-12, fmt("max relative difference %.3e over 20 fields, eps 0.2 and 0.1", worst)};
}

std::string table_detail(const std::vector<double>& errs) {
  std::string s = "rel errors";
  for (double e : errs) s += fmt(" %.4f", e);
  return s;
}

Verdict gamma_limit() {
  const GridSpec g = unit(256);
  const ScalarField phi =
      ScalarField::sample(g, [](double x, double y) { return std::cos(pi * x) * std::cos(pi * y); });
  const GammaTable t = gamma_check(phi, {0.2, 0.1, 0.05, 0.02}, 0.05, pi * pi / 4.0);
  std::vector<double> errs;
  for (const GammaRow& r : t.rows) errs.push_back(r.rel_error);
  return {t.passed(), table_detail(errs)};
}

Verdict operator_limit() {
  const GridSpec g = unit(256);
  const ScalarField phi = cos_x(g);
  const OperatorTable t = operator_check(phi, phi, {0.2, 0.1, 0.05, 0.02}, 0.05, pi * pi / 2.0);
  std::vector<double> errs;
  for (const OperatorRow& r : t.rows) errs.push_back(r.rel_error);
  return {t.passed(), table_detail(errs)};
}

Verdict energy_inequality() {
  const AppConfig cfg = parse_config(config_path("default.json"));
  if (cfg.run.step_count() != 500 || cfg.run.grid.nx != 64 || cfg.run.variant.eps != 0.1)
    return {false, "configs/default.json is not the 64^2, eps = 0.1, 500-step run"};
  const RunResult r = run_simulation(cfg.run);
  if (r.failure) return {false, "solver failure: " + *r.failure};
  const AuditRecord a = energy_audit(r.final_state);
  const double m0 = r.final_state.initial.mass_mean;
  double drift = 0.0, phi = r.final_state.initial.max_abs_phi, div = 0.0;
  for (const EnergyRecord& e : r.final_state.energy_history) {
    drift = std::max(drift, std::abs(e.mass_mean - m0));
    phi = std::max(phi, e.max_abs_phi);
    div = std::max(div, e.div_v_norm);
  }
  const bool ok = a.max_violation <= 1e-8 * (1.0 + a.initial_energy) && drift <= 1e-10 && phi < 1.0 && div <= 1e-9;
  return {ok, fmt("audit %.3e (tol %.3e), mass drift %.3e, max|phi| %.6f", a.max_violation,
                  1e-8 * (1.0 + a.initial_energy), drift, phi) +
                  fmt(", max div %.3e", div)};
}

Verdict convergence_sweep_check() {
  const AppConfig cfg = parse_config(config_path("sweep.json"));
  if (cfg.run.grid.nx != 128 || cfg.run.T != 0.05 || cfg.run.dt != 1e-4)
    return {false, "configs/sweep.json is not the 128^2, dt = 1e-4, T = 0.05 sweep"};
  SweepOptions opts;
  opts.lemma34_delta = cfg.sweep.lemma34_delta;
  const SweepReport r = convergence_sweep(cfg.run, cfg.sweep.eps_list, opts);
  if (!r.complete()) return {false, "a run failed"};
  std::string detail = "phi";
  for (const SweepRow& row : r.rows) detail += fmt(" %.3e", row.sup_l2_phi);
  detail += "; v";
  for (const SweepRow& row : r.rows) detail += fmt(" %.3e", row.l2qt_v);
  detail += "; gap";
  for (const SweepRow& row : r.rows) detail += fmt(" %.3e", row.init_energy_gap);
  return {r.phi.strict && r.v.strict && r.energy_gap.strict, detail};
}

double order(double coarse, double fine) { return std::log2(coarse / fine); }

Verdict proof_operators() {
  std::vector<double> errs;
  for (int n : {32, 64, 128}) {
    const GridSpec g = unit(n);
    const ScalarField f = cos_x(g);
    errs.push_back(max_abs(weighted_neumann_solve(ScalarField(g, 1.0), f) - (1.0 / (pi * pi)) * f));
  }
  const double p = std::min(order(errs[0], errs[1]), order(errs[1], errs[2]));
  const double dual = dual_h1_norm(cos_x(unit(256)));
  const double rel = std::abs(dual - 1.0 / (pi * std::sqrt(2.0))) * pi * std::sqrt(2.0);
  return {p >= 1.9 && rel <= 0.01, fmt("Neumann solve order %.3f, dual norm %.6f (rel error %.2e)", p, dual, rel)};
}

ScalarField local_ch(double dt) {
  const GridSpec g = unit(32);
  ScalarField phi =
      ScalarField::sample(g, [](double x, double y) { return 0.3 * std::cos(pi * x) * std::cos(pi * y); });
  CahnHilliardStepper<LocalRelation> stepper(LocalRelation(g), PhysicalParams{});
  CHStepConfig cfg;
  cfg.dt = dt;
  cfg.newton_tol = 1e-13;
  const int steps = static_cast<int>(std::lround(0.01 / dt));
  for (int k = 0; k < steps; ++k) phi = stepper.step(phi, VectorField(g), cfg).phi;
  return phi;
}

Verdict self_convergence() {
  const ScalarField a = local_ch(4e-4), b = local_ch(2e-4), c = local_ch(1e-4);
  const double ratio = field_norm(a - b, NormKind::L2) / field_norm(b - c, NormKind::L2);
  std::vector<double> errs;
  for (int n : {32, 64, 128}) {
    const GridSpec g = unit(n);
    const ScalarField f = cos_x(g);
    errs.push_back(max_abs(laplace_neumann(f, ScalarField(g, 1.0)) + (pi * pi) * f));
  }
  const double p = std::min(order(errs[0], errs[1]), order(errs[1], errs[2]));
  return {std::abs(ratio - 2.0) <= 0.3 && p >= 1.9, fmt("dt contraction %.4f, Laplacian order %.3f", ratio, p)};
}

Verdict dense_oracle() {
  const GridSpec g = unit(8);
  const double eps = 0.3, dt = 1e-3;
  const PhysicalParams params;
  const KernelOperator op = KernelOperator::build(g, build_mollifier(2, eps));
  const ScalarField phi0 = oracle::random_field(g, 42, -0.6, 0.6);
  const CHStepResult r = ch_step_nonlocal(phi0, VectorField(g), op, params, CHStepConfig{dt});
  const oracle::DenseStep d = oracle::dense_nonlocal_step(phi0, eps, dt, params.theta, params.theta_c);
  double diff = 0.0;
  for (std::size_t k = 0; k < g.cells(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    diff = std::max({diff, std::abs(r.phi.values[k] - d.phi(i)), std::abs(r.mu.values[k] - d.mu(i))});
  }
  return {diff <= 1e-9, fmt("max difference in (phi, mu) %.3e", diff)};
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const Criterion criteria[] = {
      {1, "kernel normalization", 1.0, kernel_normalization},
      {2, "convolution oracle", 10.0, convolution_oracle},
      {3, "gamma limit", 60.0, gamma_limit},
      {4, "operator weak limit", 60.0, operator_limit},
      {5, "energy inequality", 300.0, energy_inequality},
      {6, "convergence sweep", 1800.0, convergence_sweep_check},
      {7, "proof operators", 30.0, proof_operators},
      {8, "scheme self-convergence", 120.0, self_convergence},
      {9, "dense nonlinear oracle", 5.0, dense_oracle},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.limit_seconds;
    const bool ok = v.ok && in_time;
    if (!ok) ++failures;
    std::printf("%s criterion %d (%s): %s; %.2f s (limit %.0f s)%s\n", ok ? "PASS" : "FAIL", c.id, c.name,
                v.detail.c_str(), secs, c.limit_seconds, in_time ? "" : " TOO SLOW");
    std::fflush(stdout);
  }
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
