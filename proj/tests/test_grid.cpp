#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nscheps/error.hpp"
#include "nscheps/grid.hpp"
#include "oracles.hpp"

using namespace nscheps;
using std::numbers::pi;

namespace {

GridSpec unit(int n) { return GridSpec::make(n, n, 1.0, 1.0); }

double grad_error(int n) {
  const GridSpec g = unit(n);
  const ScalarField f = ScalarField::sample(g, [](double x, double) { return std::cos(pi * x); });
  const VectorField d = apply_gradient(f);
  double err = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i) err = std::max(err, std::abs(d.U(i, j) + pi * std::sin(pi * i * g.h())));
  return err;
}

double laplace_error(int n) {
  const GridSpec g = unit(n);
  const ScalarField f = ScalarField::sample(g, [](double x, double) { return std::cos(pi * x); });
  const ScalarField lap = laplace_neumann(f, ScalarField(g, 1.0));
  double err = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) err = std::max(err, std::abs(lap(i, j) + pi * pi * f(i, j)));
  return err;
}

}  // namespace

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(GridSpec::make(3, 8, 1.0, 1.0), Error);
  CHECK_THROWS_AS(GridSpec::make(8, 8, 1.0, 2.0), Error);
  const GridSpec g = GridSpec::make(8, 4, 2.0, 1.0);
  CHECK(g.h() == doctest::Approx(0.25));
  CHECK(g.u_faces() == 36);
  CHECK(g.v_faces() == 40);
}

TEST_CASE("gradient") {
  const GridSpec g = unit(16);
  SUBCASE("constant field") {
    const VectorField d = apply_gradient(ScalarField(g, 3.5));
    CHECK(max_abs(d) == 0.0);
  }
  SUBCASE("linear field is exact on interior faces") {
    const VectorField d = apply_gradient(ScalarField::sample(g, [](double x, double) { return x; }));
    for (int j = 0; j < g.ny; ++j)
      for (int i = 1; i < g.nx; ++i) CHECK(d.U(i, j) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(d.U(0, 3) == 0.0);
    CHECK(d.U(g.nx, 3) == 0.0);
  }
  SUBCASE("second order") {
    const double e32 = grad_error(32), e64 = grad_error(64), e128 = grad_error(128);
    CHECK(std::log2(e32 / e64) >= 1.9);
    CHECK(std::log2(e64 / e128) >= 1.9);
    CHECK(e128 <= 0.5 * std::pow(1.0 / 128, 2) * pi * pi * pi);
  }
}

TEST_CASE("divergence") {
  const GridSpec g = unit(24);
  CHECK(max_abs(apply_divergence(VectorField(g, 2.0))) < 1e-12);
  const ScalarField f = oracle::random_field(g, 7);
  const ScalarField div = apply_divergence(apply_gradient(f));
  double total = 0.0;
  for (double x : div.values) total += x * g.h() * g.h();
  CHECK(std::abs(total) < 1e-12);
}

TEST_CASE("Neumann Laplacian") {
  const GridSpec g = unit(16);
  CHECK(max_abs(laplace_neumann(ScalarField(g, 4.0), oracle::random_field(g, 3, 0.5, 2.0))) < 1e-12);
  const double e32 = laplace_error(32), e64 = laplace_error(64), e128 = laplace_error(128);
  CHECK(std::log2(e32 / e64) >= 1.9);
  CHECK(std::log2(e64 / e128) >= 1.9);
}

TEST_CASE("norms") {
  const GridSpec g = unit(64);
  const ScalarField one(g, 1.0);
  CHECK(field_norm(one, NormKind::L2) == doctest::Approx(1.0));
  CHECK(field_norm(one, NormKind::H1_semi) == 0.0);
  CHECK(field_norm(one, NormKind::mean) == doctest::Approx(1.0));
  const GridSpec fine = unit(256);
  const ScalarField c = ScalarField::sample(fine, [](double x, double) { return std::cos(pi * x); });
  CHECK(field_norm(c, NormKind::L2) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-4));
  CHECK(field_norm(c, NormKind::H1_semi) == doctest::Approx(pi / std::sqrt(2.0)).epsilon(1e-3));
}

TEST_CASE("shape errors") {
  const ScalarField a(unit(8)), b(unit(16));
  CHECK_THROWS_AS(a + b, Error);
  ScalarField bad(unit(8));
  bad.values[5] = std::nan("");
  CHECK_THROWS_AS(require_finite(bad, "test"), Error);
}
