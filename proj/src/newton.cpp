#include "nscheps/newton.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nscheps/error.hpp"

namespace nscheps {

double NewtonProblem::residual_norm(std::span<const double> r) const {
  double m = 0.0;
  for (double x : r) m = std::max(m, std::abs(x));
  return m;
}

double NewtonProblem::merit(std::span<const double> r) const {
  double s = 0.0;
  for (double x : r) s += x * x;
  return std::sqrt(s);
}

void NewtonProblem::retract(std::span<const double> x, std::span<const double> dx, double alpha,
                            std::span<double> out) const {
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + alpha * dx[i];
}

NewtonResult newton_solve(NewtonProblem& problem, std::vector<double> x0, const NewtonOptions& options) {
  constexpr double armijo = 1e-4;
  const std::size_t n = x0.size();
  NewtonResult result;
  result.x = std::move(x0);
  if (!problem.admissible(result.x)) throw StepFailure("newton: initial guess is not admissible", INFINITY);

  std::vector<double> r(n), dx(n), trial(n), r_trial(n);
  problem.residual(result.x, r);
  double norm = problem.residual_norm(r);
  double merit = problem.merit(r);
  std::optional<double> objective = problem.objective(result.x);

  while (!(norm <= options.tol)) {
    if (!std::isfinite(norm)) throw StepFailure("newton: residual is not finite", norm);
    if (result.iterations >= options.max_iter) {
      std::ostringstream os;
      os << "newton: no convergence after " << options.max_iter << " iterations (residual " << norm << ")";
      throw StepFailure(os.str(), norm);
    }
    problem.solve_linearized(result.x, r, dx);
    const double slope = objective ? problem.objective_slope(result.x, r, dx) : 0.0;

    double alpha = std::min(1.0, problem.max_step(result.x, dx));
    bool accepted = false;
    for (int k = 0; k <= options.max_backtracks; ++k, alpha *= 0.5) {
      problem.retract(result.x, dx, alpha, trial);
      if (!problem.admissible(trial)) continue;
      problem.residual(trial, r_trial);
      const double trial_norm = problem.residual_norm(r_trial);
      const double trial_merit = problem.merit(r_trial);
      bool ok = trial_norm <= options.tol || trial_merit <= (1.0 - armijo * alpha) * merit;
      std::optional<double> trial_objective;
      if (objective) {
        trial_objective = problem.objective(trial);
        ok = ok || (slope < 0.0 && *trial_objective <= *objective + armijo * alpha * slope);
      }
      if (ok) {
        result.x.swap(trial);
        r.swap(r_trial);
        norm = trial_norm;
        merit = trial_merit;
        objective = trial_objective;
        accepted = true;
        break;
      }
    }
    ++result.iterations;
    if (!accepted) {
      std::ostringstream os;
      os << "newton: line search failed (residual " << norm << ")";
      throw StepFailure(os.str(), norm);
    }
  }
  result.residual = norm;
  return result;
}

}  // namespace nscheps
