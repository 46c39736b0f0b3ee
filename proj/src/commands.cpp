#include "nscheps/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <ostream>

#include "nscheps/analysis.hpp"
#include "nscheps/output.hpp"
#include "nscheps/plots.hpp"

namespace nscheps {

namespace fs = std::filesystem;

namespace {

struct Context {
  const AppConfig& cfg;
  fs::path dir;
  bool quiet;
  std::ostream& log;
  std::ostream& err;

  void say(const std::string& line) const {
    if (!quiet) log << line << '\n';
  }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

std::string fmt(const char* pattern, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, x);
  return buf;
}

std::string verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

StepObserver progress_printer(const Context& ctx, const char* label) {
  if (ctx.quiet) return {};
  return [&ctx, label, last = -1](const SimState& s, int step, int total) mutable {
    const int decile = total > 0 ? (10 * step) / total : 10;
    if (decile == last) return;
    last = decile;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s: step %d/%d  t = %.6g", label, step, total, s.t);
    ctx.log << buf << '\n' << std::flush;
  };
}

int cmd_validate(const Context& ctx) {
  const RunConfig& run = ctx.cfg.run;
  ctx.say("config ok: " + run.variant.label() + ", grid " + std::to_string(run.grid.nx) + "x" +
          std::to_string(run.grid.ny) + ", " + std::to_string(run.step_count()) + " steps");
  if (run.variant.is_nonlocal() && run.variant.eps < 2.0 * run.grid.h())
    ctx.say("warning: eps < 2h, kernel support is under-resolved");
  return exit_ok;
}

int cmd_simulate(const Context& ctx) {
  const RunConfig& run = ctx.cfg.run;
  const RunResult result = run_simulation(run, progress_printer(ctx, "simulate"));
  write_timeseries(result.timeseries, ctx.path("timeseries.csv"));
  write_text(ctx.path("energy.svg"), energy_plot_svg(result.timeseries));
  for (std::size_t k = 0; k < result.snapshots.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%04zu.epsf", k);
    write_snapshot(result.snapshots[k], ctx.path(name));
  }
  if (result.failure) {
    ctx.err << "solver failure: " << *result.failure << '\n';
    return exit_solver;
  }
  const AuditRecord audit = energy_audit(result.final_state);
  const double mass0 = result.final_state.initial.mass_mean;
  double drift = 0.0, max_phi = result.final_state.initial.max_abs_phi, div = 0.0;
  for (const EnergyRecord& r : result.final_state.energy_history) {
    drift = std::max(drift, std::abs(r.mass_mean - mass0));
    max_phi = std::max(max_phi, r.max_abs_phi);
    div = std::max(div, r.div_v_norm);
  }
  const bool ok_audit = audit.passed();
  const bool ok_mass = drift <= 1e-10;
  const bool ok_phi = max_phi < 1.0;
  const bool ok_div = div <= 1e-9;
  ctx.say(verdict(ok_audit) + " energy audit max " + fmt("%.3e", audit.max_violation) + " (tol " +
          fmt("%.3e", audit.tolerance) + ")");
  ctx.say(verdict(ok_mass) + " mass drift " + fmt("%.3e", drift));
  ctx.say(verdict(ok_phi) + " max |phi| " + fmt("%.12f", max_phi));
  ctx.say(verdict(ok_div) + " max |div v| " + fmt("%.3e", div));
  return ok_audit && ok_mass && ok_phi && ok_div ? exit_ok : exit_assertion;
}

SweepReport run_sweep(const Context& ctx) {
  SweepOptions opts;
  opts.lemma34_delta = ctx.cfg.sweep.lemma34_delta;
  return convergence_sweep(ctx.cfg.run, ctx.cfg.sweep.eps_list, opts, progress_printer(ctx, "sweep"));
}

int cmd_sweep(const Context& ctx) {
  const SweepReport report = run_sweep(ctx);
  write_sweep_report(report, ctx.path("sweep.csv"));
  write_text(ctx.path("sweep.svg"), sweep_plot_svg(report));
  write_text(ctx.path("lemma34.csv"), lemma34_csv(report));
  if (!report.complete()) {
    if (report.reference_failed) ctx.err << "local reference failed: " << report.reference_failure << '\n';
    for (const SweepRow& r : report.rows)
      if (r.failed) ctx.err << "run eps = " << r.eps << " failed: " << r.failure << '\n';
    return exit_solver;
  }
  for (const SweepRow& r : report.rows) {
    ctx.say("eps " + fmt("%-8g", r.eps) + " phi " + fmt("%.6e", r.sup_l2_phi) + "  v " + fmt("%.6e", r.l2qt_v) +
            "  mu " + fmt("%.6e", r.l2l2_mu) + "  gap " + fmt("%.6e", r.init_energy_gap) + "  audit " +
            fmt("%.3e", r.audit_max) + (r.under_resolved ? "  (under-resolved)" : ""));
  }
  auto column = [&](const char* name, const MonotoneFlags& f) {
    if (f.strict) ctx.say(std::string("PASS ") + name + " column strictly decreasing");
    else if (f.relaxed) ctx.say(std::string("PASS ") + name + " column not monotone; relaxed check last < first holds");
    else ctx.say(std::string("FAIL ") + name + " column does not decrease");
  };
  column("phi", report.phi);
  column("v", report.v);
  column("initial-energy gap", report.energy_gap);
  bool audits = report.reference_audit_passed;
  for (const SweepRow& r : report.rows) audits = audits && r.audit_passed;
  ctx.say(verdict(audits) + " energy audits");
  ctx.say(verdict(report.lemma34_finite) + " interpolation constants finite (max " +
          fmt("%.4g", report.lemma34_max_c) + ")");
  return report.passed() ? exit_ok : exit_assertion;
}

int cmd_lemma34(const Context& ctx) {
  const SweepReport report = run_sweep(ctx);
  write_text(ctx.path("lemma34.csv"), lemma34_csv(report));
  if (!report.complete()) {
    ctx.err << "a run failed; diagnostic incomplete\n";
    return exit_solver;
  }
  ctx.say(std::to_string(report.lemma34.size()) + " sample pairs, max C_impl " + fmt("%.6g", report.lemma34_max_c));
  ctx.say(verdict(report.lemma34_finite) + " all C_impl finite");
  return report.lemma34_finite ? exit_ok : exit_assertion;
}

// Analytic gradient energy of amplitude * cos(pi x/lx) cos(pi y/ly).
double sinusoid_e0(const RunConfig& run) {
  const double a = run.preset.amplitude;
  const double lx = run.grid.lx;
  const double ly = run.grid.ly;
  return a * a * std::numbers::pi * std::numbers::pi * lx * ly * (1.0 / (lx * lx) + 1.0 / (ly * ly)) / 8.0;
}

int cmd_gamma(const Context& ctx) {
  const RunConfig& run = ctx.cfg.run;
  const ScalarField phi = make_initial_phi(run.grid, run.preset, run.seed);
  std::optional<double> reference;
  if (run.preset.kind == PresetKind::sinusoid) reference = sinusoid_e0(run);
  const GammaTable table = gamma_check(phi, ctx.cfg.checks.eps_list, ctx.cfg.checks.threshold, reference);
  write_text(ctx.path("gamma.csv"), gamma_csv(table));
  write_text(ctx.path("gamma.svg"), gamma_plot_svg(table));
  for (const GammaRow& r : table.rows)
    ctx.say("eps " + fmt("%-8g", r.eps) + " E0_eps " + fmt("%.10f", r.e0_eps) + "  rel error " +
            fmt("%.4e", r.rel_error) + (r.under_resolved ? "  (under-resolved)" : ""));
  ctx.say(verdict(table.monotone) + " errors strictly decreasing");
  ctx.say(verdict(table.final_within) + " final error <= " + fmt("%g", table.threshold));
  return table.passed() ? exit_ok : exit_assertion;
}

int cmd_operator(const Context& ctx) {
  const GridSpec& g = ctx.cfg.run.grid;
  const double lx = g.lx;
  const ScalarField phi =
      ScalarField::sample(g, [lx](double x, double) { return std::cos(std::numbers::pi * x / lx); });
  const double target = std::numbers::pi * std::numbers::pi / (lx * lx) * 0.5 * lx * g.ly;
  const OperatorTable table = operator_check(phi, phi, ctx.cfg.checks.eps_list, ctx.cfg.checks.threshold, target);
  write_text(ctx.path("operator.csv"), operator_csv(table));
  write_text(ctx.path("operator.svg"), operator_plot_svg(table));
  for (const OperatorRow& r : table.rows)
    ctx.say("eps " + fmt("%-8g", r.eps) + " b_eps " + fmt("%.10f", r.b_eps) + "  rel error " +
            fmt("%.4e", r.rel_error) + (r.under_resolved ? "  (under-resolved)" : ""));
  ctx.say(verdict(table.monotone) + " errors strictly decreasing");
  ctx.say(verdict(table.final_within) + " final error <= " + fmt("%g", table.threshold));
  return table.passed() ? exit_ok : exit_assertion;
}

}  // namespace

bool is_command(const std::string& name) {
  for (const char* c : command_names)
    if (name == c) return true;
  return false;
}

int exit_code_for(ErrorKind kind) { return kind == ErrorKind::solver ? exit_solver : exit_config; }

int run_command(const std::string& name, AppConfig cfg, const CommandOptions& options, std::ostream& log,
                std::ostream& err) {
  if (!is_command(name)) {
    err << "unknown subcommand '" << name << "'\n";
    return exit_config;
  }
  try {
    if (options.output_dir) cfg.run.output_dir = *options.output_dir;
    if (options.seed) cfg.run.seed = *options.seed;
    cfg.run.validate();
    Context ctx{cfg, fs::path(cfg.run.output_dir), options.quiet, log, err};
    if (name == "validate") return cmd_validate(ctx);

    std::error_code ec;
    fs::create_directories(ctx.dir, ec);
    if (ec) throw Error(ErrorKind::io, "cannot create output directory '" + ctx.dir.string() + "': " + ec.message());
    write_text(ctx.path("config.json"), config_to_json(cfg));
    if (name == "simulate") return cmd_simulate(ctx);
    if (name == "sweep") return cmd_sweep(ctx);
    if (name == "gamma-check") return cmd_gamma(ctx);
    if (name == "operator-check") return cmd_operator(ctx);
    return cmd_lemma34(ctx);
  } catch (const Error& e) {
    err << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code_for(e.kind());
  }
}

int run_command(const std::string& name, const std::string& config_path, const CommandOptions& options,
                std::ostream& log, std::ostream& err) {
  if (!is_command(name)) {
    err << "unknown subcommand '" << name << "'\n";
    return exit_config;
  }
  AppConfig cfg;
  try {
    cfg = parse_config(config_path);
  } catch (const Error& e) {
    err << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_config;
  }
  return run_command(name, std::move(cfg), options, log, err);
}

}  // namespace nscheps
