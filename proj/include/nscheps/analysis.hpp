#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nscheps/coupled.hpp"
#include "nscheps/grid.hpp"
#include "nscheps/linear_solvers.hpp"

namespace nscheps {

/// Mean-zero u with  -div(m grad u) = f  (so that  int m grad u . grad psi = <f, psi>).
/// Throws Error(compatibility) if |mean(f)| > 1e-10 (1 + max|f|).
ScalarField weighted_neumann_solve(const ScalarField& m_field, const ScalarField& f);

/// (H^1)' norm: sqrt(<f0, N f0> + mean(f)^2 |Omega|), f0 = f - mean(f),
/// N the unit-coefficient Neumann inverse.
double dual_h1_norm(const ScalarField& f);

/// Same norm with the factorization kept between calls.
class DualNorm {
 public:
  explicit DualNorm(const GridSpec& grid);
  double operator()(const ScalarField& f) const;

 private:
  GridSpec grid_;
  NeumannPoissonSolver solver_;
};

struct GammaRow {
  double eps = 0.0;
  double e0_eps = 0.0;
  double e0 = 0.0;
  double rel_error = 0.0;
  bool under_resolved = false;
};

struct GammaTable {
  std::vector<GammaRow> rows;
  bool monotone = false;         // errors strictly decreasing along the list
  bool final_within = false;     // last error <= threshold
  double threshold = 0.0;
  bool passed() const { return monotone && final_within; }
};

/// E0_eps(phi) against E0(phi) for each eps. `reference` replaces the
/// discrete local energy (e.g. an analytic value).
GammaTable gamma_check(const ScalarField& phi, const std::vector<double>& eps_list, double threshold,
                       std::optional<double> reference = std::nullopt);

struct OperatorRow {
  double eps = 0.0;
  double b_eps = 0.0;
  double target = 0.0;
  double error = 0.0;      // |b_eps - target|
  double rel_error = 0.0;  // error / |target| (error itself if target = 0)
  bool under_resolved = false;
};

struct OperatorTable {
  std::vector<OperatorRow> rows;
  bool monotone = false;
  bool final_within = false;
  double threshold = 0.0;
  bool passed() const { return monotone && final_within; }
};

/// b_eps(phi, zeta) = <a phi - J * phi, zeta> against <grad phi, grad zeta>.
double nonlocal_bilinear(const KernelOperator& kop, const ScalarField& phi, const ScalarField& zeta);
OperatorTable operator_check(const ScalarField& phi, const ScalarField& zeta, const std::vector<double>& eps_list,
                             double threshold, std::optional<double> reference = std::nullopt);

struct Lemma34Record {
  double lhs = 0.0;          // |phi1 - phi2|_{L2}^2
  double energy_term = 0.0;  // delta (e01 + e02)
  double dual_term = 0.0;    // |phi1 - phi2|_{(H1)'}^2
  double c_impl = 0.0;       // max(0, lhs - energy_term) / dual_term
};

Lemma34Record lemma34_diagnostic(const ScalarField& phi1, const ScalarField& phi2, double e01, double e02,
                                 double delta);
Lemma34Record lemma34_diagnostic(const ScalarField& phi1, const ScalarField& phi2, double e01, double e02,
                                 double delta, const DualNorm& norm);

struct AuditRecord {
  double initial_energy = 0.0;
  double max_violation = 0.0;  // max_n E(t_n) + sum_{k<=n} D_k - E(0)
  double tolerance = 0.0;      // 1e-8 (1 + E(0))
  bool energy_monotone = true;
  bool passed() const { return max_violation <= tolerance; }
};

AuditRecord energy_audit(const EnergyRecord& initial, const std::vector<EnergyRecord>& history);
inline AuditRecord energy_audit(const SimState& s) { return energy_audit(s.initial, s.energy_history); }

/// Interpolation diagnostic between the runs at eps1 > eps2 at time t.
struct Lemma34Sample {
  double eps1 = 0.0;
  double eps2 = 0.0;
  double t = 0.0;
  Lemma34Record record;
};

struct SweepRow {
  double eps = 0.0;
  double sup_l2_phi = 0.0;
  double l2qt_v = 0.0;
  double l2l2_mu = 0.0;
  double e0_final = 0.0;
  double init_energy_gap = 0.0;
  double audit_max = 0.0;
  bool audit_passed = false;
  bool under_resolved = false;
  bool failed = false;
  std::string failure;
};

struct SweepOptions {
  double lemma34_delta = 0.5;
  /// Run the local model in place of every nonlocal run (self-comparison).
  bool control_local = false;
};

struct MonotoneFlags {
  bool strict = false;   // strictly decreasing along the rows
  bool relaxed = false;  // last < first
};

struct SweepReport {
  std::vector<double> eps_list;  // decreasing
  std::vector<SweepRow> rows;
  double reference_audit_max = 0.0;
  bool reference_audit_passed = false;
  bool reference_failed = false;
  std::string reference_failure;
  MonotoneFlags phi;
  MonotoneFlags v;
  MonotoneFlags energy_gap;
  std::vector<Lemma34Sample> lemma34;
  double lemma34_max_c = 0.0;
  bool lemma34_finite = true;
  int steps = 0;

  bool complete() const;
  /// Columns decrease (strictly, or relaxed to last < first) and every audit passes.
  bool passed() const;
};

/// Runs the local reference and one nonlocal run per eps in lockstep from the
/// same discrete initial data and compares them after every step.
SweepReport convergence_sweep(const RunConfig& base, std::vector<double> eps_list, const SweepOptions& options = {},
                              const StepObserver& progress = {});

}  // namespace nscheps
