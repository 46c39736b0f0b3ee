#include <doctest.h>

#include <cmath>

#include "nscheps/error.hpp"
#include "nscheps/newton.hpp"

using namespace nscheps;

namespace {

// theta atanh(x) = target in one cell.
class InverseF0 final : public NewtonProblem {
 public:
  explicit InverseF0(double target) : target_(target) {}
  void residual(std::span<const double> x, std::span<double> r) override { r[0] = std::atanh(x[0]) - target_; }
  void solve_linearized(std::span<const double> x, std::span<const double> r, std::span<double> dx) override {
    dx[0] = -r[0] * (1.0 - x[0] * x[0]);
  }
  bool admissible(std::span<const double> x) const override { return std::abs(x[0]) < 1.0; }

 private:
  double target_;
};

// A x - b with A = [[4, 1], [1, 3]].
class Affine final : public NewtonProblem {
 public:
  void residual(std::span<const double> x, std::span<double> r) override {
    r[0] = 4 * x[0] + x[1] - 1.0;
    r[1] = x[0] + 3 * x[1] - 2.0;
  }
  void solve_linearized(std::span<const double>, std::span<const double> r, std::span<double> dx) override {
    const double det = 11.0;
    dx[0] = -(3 * r[0] - r[1]) / det;
    dx[1] = -(-r[0] + 4 * r[1]) / det;
  }
};

class Hopeless final : public NewtonProblem {
 public:
  void residual(std::span<const double> x, std::span<double> r) override { r[0] = x[0] * x[0] + 1.0; }
  void solve_linearized(std::span<const double> x, std::span<const double> r, std::span<double> dx) override {
    dx[0] = -r[0] / (2 * x[0] + 1e-3);
  }
};

}  // namespace

TEST_CASE("zero residual at the guess") {
  InverseF0 p(0.0);
  const NewtonResult r = newton_solve(p, {0.0}, {});
  CHECK(r.iterations == 0);
  CHECK(r.x[0] == 0.0);
}

TEST_CASE("scalar inverse of F0'") {
  InverseF0 p(1.0);
  const NewtonResult r = newton_solve(p, {0.0}, {1e-14, 50, 40});
  CHECK(r.x[0] == doctest::Approx((std::exp(2.0) - 1) / (std::exp(2.0) + 1)).epsilon(1e-13));
  CHECK(r.x[0] == doctest::Approx(0.76159).epsilon(1e-5));
}

TEST_CASE("affine residual converges in one iteration") {
  Affine p;
  const NewtonResult r = newton_solve(p, {10.0, -3.0}, {1e-12, 50, 40});
  CHECK(r.iterations == 1);
  CHECK(r.x[0] == doctest::Approx(1.0 / 11.0).epsilon(1e-12));
  CHECK(r.x[1] == doctest::Approx(7.0 / 11.0).epsilon(1e-12));
}

TEST_CASE("exhaustion reports the residual") {
  Hopeless p;
  try {
    newton_solve(p, {0.5}, {1e-12, 5, 10});
    FAIL("expected StepFailure");
  } catch (const StepFailure& e) {
    CHECK(e.residual() >= 1.0);
    CHECK(e.kind() == ErrorKind::solver);
  }
}
