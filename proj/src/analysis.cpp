#include "nscheps/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "nscheps/error.hpp"
#include "nscheps/kernel.hpp"
#include "nscheps/physics.hpp"

namespace nscheps {

namespace {

void require_mean_zero(const ScalarField& f, const char* where) {
  const double mean = field_norm(f, NormKind::mean);
  if (std::abs(mean) > 1e-10 * (1.0 + max_abs(f))) {
    std::ostringstream os;
    os << where << ": right-hand side must have zero mean (mean = " << mean << ")";
    throw Error(ErrorKind::compatibility, os.str());
  }
}

ScalarField minus_mean(const ScalarField& f) {
  const double mean = field_norm(f, NormKind::mean);
  ScalarField out = f;
  for (double& x : out.values) x -= mean;
  return out;
}

// Strictly decreasing along the sequence, and last < first.
MonotoneFlags monotone_flags(const std::vector<double>& xs) {
  MonotoneFlags f;
  if (xs.size() < 2) return f;
  f.strict = true;
  for (std::size_t k = 1; k < xs.size(); ++k)
    if (!(xs[k] < xs[k - 1])) f.strict = false;
  f.relaxed = xs.back() < xs.front();
  return f;
}

bool strictly_decreasing(const std::vector<double>& xs) { return monotone_flags(xs).strict; }

}  // namespace

ScalarField weighted_neumann_solve(const ScalarField& m_field, const ScalarField& f) {
  require_same_grid(m_field.grid, f.grid, "weighted_neumann_solve");
  require_finite(f, "weighted_neumann_solve");
  for (double m : m_field.values)
    if (!(m > 0.0)) throw Error(ErrorKind::coefficient, "weighted_neumann_solve: m must be positive");
  require_mean_zero(f, "weighted_neumann_solve");
  NeumannPoissonSolver solver;
  solver.set_coefficients(average_to_faces(m_field));
  return solver.solve(f);
}

DualNorm::DualNorm(const GridSpec& grid) : grid_(grid) { solver_.set_coefficients(VectorField(grid, 1.0)); }

double DualNorm::operator()(const ScalarField& f) const {
  require_same_grid(grid_, f.grid, "dual_h1_norm");
  const double mean = field_norm(f, NormKind::mean);
  const ScalarField f0 = minus_mean(f);
  const double zero_part = std::max(0.0, inner(f0, solver_.solve(f0)));
  return std::sqrt(zero_part + mean * mean * grid_.area());
}

double dual_h1_norm(const ScalarField& f) { return DualNorm(f.grid)(f); }

GammaTable gamma_check(const ScalarField& phi, const std::vector<double>& eps_list, double threshold,
                       std::optional<double> reference) {
  if (eps_list.empty()) throw Error(ErrorKind::parameter, "gamma_check: empty eps list");
  GammaTable table;
  table.threshold = threshold;
  const double e0 = reference ? *reference : energy_local_e0(phi);
  std::vector<double> errors;
  for (double eps : eps_list) {
    const KernelOperator kop = KernelOperator::build(phi.grid, build_mollifier(2, eps));
    GammaRow row;
    row.eps = eps;
    row.e0_eps = energy_nonlocal_e0(kop, phi);
    row.e0 = e0;
    row.rel_error = e0 != 0.0 ? std::abs(row.e0_eps - e0) / std::abs(e0) : std::abs(row.e0_eps);
    row.under_resolved = kop.under_resolved();
    errors.push_back(row.rel_error);
    table.rows.push_back(row);
  }
  table.monotone = strictly_decreasing(errors);
  table.final_within = errors.back() <= threshold;
  return table;
}

double nonlocal_bilinear(const KernelOperator& kop, const ScalarField& phi, const ScalarField& zeta) {
  return inner(kop.nonlocal_operator(phi), zeta);
}

OperatorTable operator_check(const ScalarField& phi, const ScalarField& zeta, const std::vector<double>& eps_list,
                             double threshold, std::optional<double> reference) {
  if (eps_list.empty()) throw Error(ErrorKind::parameter, "operator_check: empty eps list");
  require_same_grid(phi.grid, zeta.grid, "operator_check");
  OperatorTable table;
  table.threshold = threshold;
  const double target = reference ? *reference : inner(apply_gradient(phi), apply_gradient(zeta));
  std::vector<double> errors;
  for (double eps : eps_list) {
    const KernelOperator kop = KernelOperator::build(phi.grid, build_mollifier(2, eps));
    OperatorRow row;
    row.eps = eps;
    row.b_eps = nonlocal_bilinear(kop, phi, zeta);
    row.target = target;
    row.error = std::abs(row.b_eps - target);
    row.rel_error = target != 0.0 ? row.error / std::abs(target) : row.error;
    row.under_resolved = kop.under_resolved();
    errors.push_back(row.error);
    table.rows.push_back(row);
  }
  table.monotone = strictly_decreasing(errors);
  table.final_within = table.rows.back().rel_error <= threshold;
  return table;
}

Lemma34Record lemma34_diagnostic(const ScalarField& phi1, const ScalarField& phi2, double e01, double e02,
                                 double delta, const DualNorm& norm) {
  require_same_grid(phi1.grid, phi2.grid, "lemma34_diagnostic");
  if (!(delta > 0.0)) throw Error(ErrorKind::parameter, "lemma34_diagnostic: delta must be positive");
  const ScalarField diff = phi1 - phi2;
  Lemma34Record r;
  r.lhs = inner(diff, diff);
  r.energy_term = delta * (e01 + e02);
  const double d = norm(diff);
  r.dual_term = d * d;
  const double num = std::max(0.0, r.lhs - r.energy_term);
  if (num == 0.0)
    r.c_impl = 0.0;
  else if (r.dual_term == 0.0)
    r.c_impl = std::numeric_limits<double>::infinity();
  else
    r.c_impl = num / r.dual_term;
  return r;
}

Lemma34Record lemma34_diagnostic(const ScalarField& phi1, const ScalarField& phi2, double e01, double e02,
                                 double delta) {
  return lemma34_diagnostic(phi1, phi2, e01, e02, delta, DualNorm(phi1.grid));
}

AuditRecord energy_audit(const EnergyRecord& initial, const std::vector<EnergyRecord>& history) {
  AuditRecord a;
  a.initial_energy = initial.total();
  a.tolerance = 1e-8 * (1.0 + std::abs(a.initial_energy));
  a.max_violation = history.empty() ? 0.0 : -std::numeric_limits<double>::infinity();
  double previous = a.initial_energy;
  for (const EnergyRecord& r : history) {
    a.max_violation = std::max(a.max_violation, r.total() + r.dissipation_cum - a.initial_energy);
    if (r.total() > previous + a.tolerance) a.energy_monotone = false;
    previous = r.total();
  }
  return a;
}

bool SweepReport::complete() const {
  if (reference_failed) return false;
  return std::none_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.failed; });
}

bool SweepReport::passed() const {
  if (!complete() || !reference_audit_passed) return false;
  for (const SweepRow& r : rows)
    if (!r.audit_passed) return false;
  const auto ok = [](const MonotoneFlags& f) { return f.strict || f.relaxed; };
  return ok(phi) && ok(v) && ok(energy_gap) && lemma34_finite;
}

SweepReport convergence_sweep(const RunConfig& base, std::vector<double> eps_list, const SweepOptions& options,
                              const StepObserver& progress) {
  if (eps_list.empty()) throw Error(ErrorKind::parameter, "sweep: empty eps list");
  for (double e : eps_list)
    if (!(e > 0.0)) throw Error(ErrorKind::parameter, "sweep: eps values must be positive");
  std::sort(eps_list.begin(), eps_list.end(), std::greater<>());
  if (std::adjacent_find(eps_list.begin(), eps_list.end()) != eps_list.end())
    throw Error(ErrorKind::parameter, "sweep: eps values must be distinct");

  RunConfig ref_cfg = base;
  ref_cfg.variant = ModelVariant::local();
  ref_cfg.validate();

  const ScalarField phi0 = make_initial_phi(base.grid, base.preset, base.seed);
  const VectorField v0(base.grid);

  Simulation reference(ref_cfg, phi0, v0);
  struct Run {
    std::optional<Simulation> sim;
    double sum_v = 0.0;
    double sum_mu = 0.0;
    double prev_v = 0.0;
    double prev_mu = 0.0;
  };
  SweepReport report;
  report.eps_list = eps_list;
  std::vector<Run> runs(eps_list.size());
  report.rows.resize(eps_list.size());
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    RunConfig c = base;
    c.variant = options.control_local ? ModelVariant::local() : ModelVariant::nonlocal(eps_list[i]);
    SweepRow& row = report.rows[i];
    row.eps = eps_list[i];
    runs[i].sim.emplace(c, phi0, v0);
    if (const KernelOperator* k = runs[i].sim->kernel()) row.under_resolved = k->under_resolved();
  }

  const auto distances = [&](std::size_t i) {
    const SimState& a = runs[i].sim->state();
    const SimState& b = reference.state();
    const ScalarField dphi = a.phi - b.phi;
    const ScalarField dmu = a.mu - b.mu;
    const double dv = l2_distance(a.v, b.v);
    SweepRow& row = report.rows[i];
    row.sup_l2_phi = std::max(row.sup_l2_phi, std::sqrt(inner(dphi, dphi)));
    return std::pair{dv * dv, inner(dmu, dmu)};
  };
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto [v2, mu2] = distances(i);
    runs[i].prev_v = v2;
    runs[i].prev_mu = mu2;
  }

  const int n = base.step_count();
  report.steps = n;
  const std::vector<int> sample_steps = snapshot_steps(n, base.snapshot_count);
  const DualNorm dual(base.grid);
  const auto sample_lemma34 = [&] {
    for (std::size_t i = 0; i < runs.size(); ++i)
      for (std::size_t j = i + 1; j < runs.size(); ++j) {
        if (report.rows[i].failed || report.rows[j].failed) continue;
        const SimState& a = runs[i].sim->state();
        const SimState& b = runs[j].sim->state();
        const double ea = a.energy_history.empty() ? a.initial.e0 : a.energy_history.back().e0;
        const double eb = b.energy_history.empty() ? b.initial.e0 : b.energy_history.back().e0;
        report.lemma34.push_back({eps_list[i], eps_list[j], a.t,
                                  lemma34_diagnostic(a.phi, b.phi, ea, eb, options.lemma34_delta, dual)});
      }
  };
  sample_lemma34();
  std::size_t next_sample = 1;

  for (int k = 1; k <= n; ++k) {
    const double dt = (k == n) ? base.T - (n - 1) * base.dt : base.dt;
    try {
      reference.step(dt);
    } catch (const StepFailure& e) {
      report.reference_failed = true;
      report.reference_failure = e.what();
      break;
    }
    for (std::size_t i = 0; i < runs.size(); ++i) {
      SweepRow& row = report.rows[i];
      if (row.failed) continue;
      try {
        runs[i].sim->step(dt);
      } catch (const StepFailure& e) {
        row.failed = true;
        row.failure = e.what();
        continue;
      }
      const auto [v2, mu2] = distances(i);
      runs[i].sum_v += 0.5 * dt * (runs[i].prev_v + v2);
      runs[i].sum_mu += 0.5 * dt * (runs[i].prev_mu + mu2);
      runs[i].prev_v = v2;
      runs[i].prev_mu = mu2;
    }
    if (next_sample < sample_steps.size() && sample_steps[next_sample] == k) {
      sample_lemma34();
      ++next_sample;
    }
    if (progress) progress(reference.state(), k, n);
  }

  const AuditRecord ref_audit = energy_audit(reference.state());
  report.reference_audit_max = ref_audit.max_violation;
  report.reference_audit_passed = ref_audit.passed();
  const double ref_energy0 = reference.state().initial.total();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    SweepRow& row = report.rows[i];
    const SimState& s = runs[i].sim->state();
    row.l2qt_v = std::sqrt(runs[i].sum_v);
    row.l2l2_mu = std::sqrt(runs[i].sum_mu);
    row.e0_final = s.energy_history.empty() ? s.initial.e0 : s.energy_history.back().e0;
    row.init_energy_gap = std::abs(s.initial.total() - ref_energy0);
    const AuditRecord audit = energy_audit(s);
    row.audit_max = audit.max_violation;
    row.audit_passed = audit.passed();
  }

  std::vector<double> phi_col, v_col, gap_col;
  for (const SweepRow& r : report.rows) {
    phi_col.push_back(r.sup_l2_phi);
    v_col.push_back(r.l2qt_v);
    gap_col.push_back(r.init_energy_gap);
  }
  report.phi = monotone_flags(phi_col);
  report.v = monotone_flags(v_col);
  report.energy_gap = monotone_flags(gap_col);
  for (const Lemma34Sample& sample : report.lemma34) {
    const double c = sample.record.c_impl;
    if (!std::isfinite(c)) report.lemma34_finite = false;
    else report.lemma34_max_c = std::max(report.lemma34_max_c, c);
  }
  return report;
}

}  // namespace nscheps
