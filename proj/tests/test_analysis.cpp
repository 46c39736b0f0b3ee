#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nscheps/analysis.hpp"
#include "nscheps/error.hpp"
#include "oracles.hpp"

using namespace nscheps;
using std::numbers::pi;

namespace {

GridSpec unit(int n) { return GridSpec::make(n, n, 1.0, 1.0); }

double neumann_error(int n) {
  const GridSpec g = unit(n);
  const ScalarField f = ScalarField::sample(g, [](double x, double) { return std::cos(pi * x); });
  const ScalarField u = weighted_neumann_solve(ScalarField(g, 1.0), f);
  return max_abs(u - (1.0 / (pi * pi)) * f);
}

RunConfig sweep_config() {
  RunConfig cfg;
  cfg.variant = ModelVariant::local();
  cfg.grid = unit(16);
  cfg.dt = 1e-4;
  cfg.T = 2e-3;
  cfg.preset.kind = PresetKind::sinusoid;
  return cfg;
}

}  // namespace

TEST_CASE("weighted Neumann solve") {
  const GridSpec g = unit(16);
  CHECK(max_abs(weighted_neumann_solve(ScalarField(g, 1.0), ScalarField(g))) == 0.0);
  const double e32 = neumann_error(32), e64 = neumann_error(64), e128 = neumann_error(128);
  CHECK(std::log2(e32 / e64) >= 1.9);
  CHECK(std::log2(e64 / e128) >= 1.9);
  CHECK_THROWS_AS(weighted_neumann_solve(ScalarField(g, 1.0), ScalarField(g, 1.0)), Error);
  CHECK_THROWS_AS(weighted_neumann_solve(ScalarField(g, -1.0), ScalarField(g)), Error);

  const ScalarField m = oracle::random_field(g, 3, 0.5, 2.0);
  ScalarField f = oracle::random_field(g, 4);
  const double mean = field_norm(f, NormKind::mean);
  for (double& x : f.values) x -= mean;
  const ScalarField u = weighted_neumann_solve(m, f);
  CHECK(max_abs(laplace_neumann(u, m) + f) <= 1e-10 * max_abs(f) * 256);
}

TEST_CASE("dual norm") {
  CHECK(dual_h1_norm(ScalarField(unit(16))) == 0.0);
  const GridSpec g = unit(256);
  const ScalarField f = ScalarField::sample(g, [](double x, double) { return std::cos(pi * x); });
  CHECK(dual_h1_norm(f) == doctest::Approx(1.0 / (pi * std::sqrt(2.0))).epsilon(0.01));
  const GridSpec s = unit(32);
  const ScalarField a = oracle::random_field(s, 1), b = oracle::random_field(s, 2);
  CHECK(dual_h1_norm(-2.5 * a) == doctest::Approx(2.5 * dual_h1_norm(a)).epsilon(1e-12));
  CHECK(dual_h1_norm(a + b) <= dual_h1_norm(a) + dual_h1_norm(b) + 1e-14);
  const DualNorm cached(s);
  CHECK(cached(a) == doctest::Approx(dual_h1_norm(a)).epsilon(1e-12));
}

TEST_CASE("interpolation diagnostic") {
  const GridSpec g = unit(16);
  const ScalarField a = oracle::random_field(g, 5, -0.5, 0.5);
  const Lemma34Record same = lemma34_diagnostic(a, a, 1.0, 2.0, 0.5);
  CHECK(same.lhs == 0.0);
  CHECK(same.c_impl == 0.0);
  const Lemma34Record shift = lemma34_diagnostic(a + ScalarField(g, 0.3), a, 1.0, 2.0, 0.5);
  CHECK(shift.lhs == doctest::Approx(0.09).epsilon(1e-12));
  CHECK(shift.dual_term == doctest::Approx(0.09).epsilon(1e-12));
  CHECK(shift.c_impl <= 1.0);
  CHECK_THROWS_AS(lemma34_diagnostic(a, a, 1.0, 1.0, 0.0), Error);
}

TEST_CASE("gamma and operator checks") {
  const GridSpec g = unit(64);
  const GammaTable flat = gamma_check(ScalarField(g, 0.4), {0.2, 0.1}, 0.05);
  for (const GammaRow& r : flat.rows) {
    CHECK(std::abs(r.e0_eps) <= 1e-10);
    CHECK(r.e0 == 0.0);
  }
  const ScalarField phi = ScalarField::sample(g, [](double x, double) { return std::cos(pi * x); });
  const OperatorTable zero = operator_check(phi, ScalarField(g, 1.0), {0.2, 0.1}, 0.05, 0.0);
  for (const OperatorRow& r : zero.rows) CHECK(std::abs(r.b_eps) <= 1e-10);
  const OperatorTable table = operator_check(phi, phi, {0.2, 0.1, 0.05}, 0.05, pi * pi / 2.0);
  CHECK(table.monotone);
  CHECK_THROWS_AS(gamma_check(phi, {0.005}, 0.05), Error);
}

TEST_CASE("energy audit") {
  EnergyRecord init;
  init.kinetic = 1.0;
  std::vector<EnergyRecord> hist(1, init);
  CHECK(energy_audit(init, hist).max_violation <= 1e-14);
  hist[0].kinetic = 0.5;
  hist[0].dissipation_cum = 0.4;
  const AuditRecord ok = energy_audit(init, hist);
  CHECK(ok.max_violation == doctest::Approx(-0.1));
  CHECK(ok.passed());
  hist[0].dissipation_cum = 0.6;
  CHECK_FALSE(energy_audit(init, hist).passed());
}

TEST_CASE("sweep") {
  SUBCASE("local control runs coincide with the reference") {
    SweepOptions opts;
    opts.control_local = true;
    const SweepReport r = convergence_sweep(sweep_config(), {0.3, 0.25}, opts);
    REQUIRE(r.complete());
    for (const SweepRow& row : r.rows) {
      CHECK(row.sup_l2_phi == 0.0);
      CHECK(row.l2qt_v == 0.0);
      CHECK(row.l2l2_mu == 0.0);
    }
  }
  SUBCASE("a row does not depend on the other entries") {
    const SweepReport both = convergence_sweep(sweep_config(), {0.3, 0.25});
    const SweepReport one = convergence_sweep(sweep_config(), {0.25});
    REQUIRE(both.complete());
    REQUIRE(one.complete());
    CHECK(both.rows[1].sup_l2_phi == one.rows[0].sup_l2_phi);
    CHECK(both.rows[1].l2qt_v == one.rows[0].l2qt_v);
    CHECK(both.rows[1].l2l2_mu == one.rows[0].l2l2_mu);
    CHECK(both.rows[1].init_energy_gap == one.rows[0].init_energy_gap);
    CHECK(both.lemma34_finite);
    CHECK_FALSE(both.lemma34.empty());
  }
  CHECK_THROWS_AS(convergence_sweep(sweep_config(), {0.3, 0.3}), Error);
}
