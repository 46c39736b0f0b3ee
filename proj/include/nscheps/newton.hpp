#pragma once

#include <optional>
#include <span>
#include <vector>

namespace nscheps {

struct NewtonOptions {
  double tol = 1e-10;
  int max_iter = 50;
  int max_backtracks = 40;
};

/// Nonlinear system R(x) = 0 for the damped Newton driver.
///
/// residual_norm and merit are always called on the residual most recently
/// produced by residual(), so implementations may cache per-point data there.
class NewtonProblem {
 public:
  virtual ~NewtonProblem() = default;
  virtual void residual(std::span<const double> x, std::span<double> r) = 0;
  /// Norm used for the convergence test; defaults to the max norm.
  virtual double residual_norm(std::span<const double> r) const;
  /// Smooth merit function for the line search; defaults to the Euclidean norm.
  virtual double merit(std::span<const double> r) const;
  /// Solves J(x) dx = -r.
  virtual void solve_linearized(std::span<const double> x, std::span<const double> r, std::span<double> dx) = 0;
  /// Largest step length the line search starts from; defaults to 1.
  virtual double max_step(std::span<const double> /*x*/, std::span<const double> /*dx*/) const { return 1.0; }
  /// Trial point along dx; defaults to x + alpha dx. Any curve tangent to dx
  /// at alpha = 0 keeps the Armijo tests meaningful.
  virtual void retract(std::span<const double> x, std::span<const double> dx, double alpha, std::span<double> out) const;
  /// Iterates failing this test are rejected by the line search.
  virtual bool admissible(std::span<const double> /*x*/) const { return true; }
  /// Optional convex objective whose stationary points are the roots of R.
  virtual std::optional<double> objective(std::span<const double> /*x*/) const { return std::nullopt; }
  /// Derivative of the objective along dx at x, given r = R(x).
  virtual double objective_slope(std::span<const double> /*x*/, std::span<const double> /*r*/,
                                 std::span<const double> /*dx*/) const {
    return 0.0;
  }
};

struct NewtonResult {
  std::vector<double> x;
  int iterations = 0;
  double residual = 0.0;
};

/// Damped Newton with backtracking. A trial point is accepted when it is
/// admissible and either the merit function or, if present, the objective
/// satisfies the Armijo condition. Throws StepFailure on iteration or
/// backtracking exhaustion.
NewtonResult newton_solve(NewtonProblem& problem, std::vector<double> x0, const NewtonOptions& options);

}  // namespace nscheps
