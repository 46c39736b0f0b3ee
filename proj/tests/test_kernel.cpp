#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nscheps/error.hpp"
#include "nscheps/kernel.hpp"
#include "oracles.hpp"

using namespace nscheps;
using std::numbers::pi;

namespace {

double rel_diff(const ScalarField& a, const ScalarField& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    num = std::max(num, std::abs(a.values[k] - b.values[k]));
    den = std::max(den, std::abs(b.values[k]));
  }
  return num / den;
}

}  // namespace

TEST_CASE("mollifier normalization") {
  for (double eps : {0.2, 0.1, 0.05, 0.02}) {
    const MollifierFamily m = build_mollifier(2, eps);
    CHECK(m.amplitude == 48.0 / pi);
    CHECK(std::abs(m.moment() - 2.0 / pi) <= 1e-10);
    CHECK(m.interior_mass() == doctest::Approx(16.0 / (eps * eps)).epsilon(1e-13));
  }
  const MollifierFamily m3 = build_mollifier(3, 0.1);
  CHECK(m3.amplitude == doctest::Approx(945.0 / (16.0 * pi)).epsilon(1e-15));
  CHECK(m3.amplitude * 8.0 / 315.0 == doctest::Approx(2.0 / (4.0 * pi / 3.0)).epsilon(1e-14));
  CHECK(MollifierFamily::sphere_constant(2) == doctest::Approx(pi));
  CHECK_THROWS_AS(build_mollifier(2, -1.0), Error);
}

TEST_CASE("a_eps") {
  const GridSpec g = GridSpec::make(256, 256, 1.0, 1.0);
  const KernelOperator op = KernelOperator::build(g, build_mollifier(2, 0.1));
  CHECK(op.a_eps()(128, 128) == doctest::Approx(1600.0).epsilon(1e-3));
  CHECK(op.a_eps()(0, 0) / op.interior_mass() == doctest::Approx(0.25).epsilon(0.05));
  CHECK_THROWS_AS(KernelOperator::build(GridSpec::make(8, 8, 1.0, 1.0), build_mollifier(2, 0.1)), Error);
}

TEST_CASE("convolution") {
  const GridSpec g = GridSpec::make(32, 32, 1.0, 1.0);
  const KernelOperator op = KernelOperator::build(g, build_mollifier(2, 0.2));
  SUBCASE("indicator gives a_eps") {
    const ScalarField c = op.convolve(ScalarField(g, 1.0));
    CHECK(rel_diff(c, op.a_eps()) <= 1e-12);
  }
  SUBCASE("direct summation oracle") {
    const ScalarField phi = oracle::random_field(g, 11);
    CHECK(rel_diff(op.convolve(phi), oracle::direct_convolution(phi, 0.2)) <= 1e-12);
  }
  SUBCASE("positivity") {
    const ScalarField c = op.convolve(oracle::random_field(g, 5, 0.0, 1.0));
    for (double x : c.values) CHECK(x >= -1e-12);
  }
  SUBCASE("constants are in the null space") {
    CHECK(max_abs(op.nonlocal_operator(ScalarField(g, 0.7))) <= 1e-12 * op.interior_mass());
  }
}

TEST_CASE("nonlocal operator tends to the Dirichlet form") {
  const GridSpec g = GridSpec::make(128, 128, 1.0, 1.0);
  const ScalarField phi = ScalarField::sample(g, [](double x, double) { return std::cos(pi * x); });
  double prev = 1e300;
  for (double eps : {0.2, 0.1, 0.05}) {
    const KernelOperator op = KernelOperator::build(g, build_mollifier(2, eps));
    const double err = std::abs(inner(op.nonlocal_operator(phi), phi) - pi * pi / 2.0);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("laplacian bound") {
  const GridSpec g = GridSpec::make(24, 20, 1.2, 1.0);
  for (double eps : {0.25, 0.15}) {
    const KernelOperator op = KernelOperator::build(g, build_mollifier(2, eps));
    CHECK(op.laplacian_bound() == doctest::Approx(oracle::path_bound(g, eps)).epsilon(1e-12));
    const Eigen::MatrixXd N = oracle::dense_nonlocal(g, eps);
    const Eigen::MatrixXd A = oracle::dense_neg_laplacian(g);
    for (unsigned seed = 0; seed < 10; ++seed) {
      const ScalarField f = oracle::random_field(g, seed);
      const Eigen::Map<const Eigen::VectorXd> x(f.values.data(), static_cast<Eigen::Index>(f.size()));
      CHECK(x.dot(N * x) <= op.laplacian_bound() * x.dot(A * x));
    }
    const ScalarField lowest =
        ScalarField::sample(g, [](double x, double) { return std::cos(pi * x / 1.2); });
    const Eigen::Map<const Eigen::VectorXd> x(lowest.values.data(), static_cast<Eigen::Index>(lowest.size()));
    CHECK(x.dot(N * x) <= op.laplacian_bound() * x.dot(A * x));
  }
}
