#include "nscheps/linear_solvers.hpp"

#include "nscheps/error.hpp"

namespace nscheps {

void NeumannPoissonSolver::set_coefficients(const VectorField& face_coeff) {
  if (factorized_ && coeff_.grid == face_coeff.grid && coeff_.u == face_coeff.u && coeff_.v == face_coeff.v) return;
  const GridSpec& g = face_coeff.grid;
  if (analyzed_ && !(coeff_.grid == g)) analyzed_ = false;
  coeff_ = face_coeff;

  const int n = static_cast<int>(g.cells());
  const double inv_h2 = 1.0 / (g.h() * g.h());
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(n) * 5);
  // Row/column 0 is pinned to the identity.
  auto link = [&](int a, int b, double c) {
    if (!(c > 0.0)) throw Error(ErrorKind::coefficient, "Neumann solve: face coefficient must be positive");
    const double w = c * inv_h2;
    if (a != 0) t.emplace_back(a, a, w);
    if (b != 0) t.emplace_back(b, b, w);
    if (a != 0 && b != 0) {
      t.emplace_back(a, b, -w);
      t.emplace_back(b, a, -w);
    }
  };
  t.emplace_back(0, 0, 1.0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i)
      link(static_cast<int>(g.cell(i - 1, j)), static_cast<int>(g.cell(i, j)), face_coeff.U(i, j));
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      link(static_cast<int>(g.cell(i, j - 1)), static_cast<int>(g.cell(i, j)), face_coeff.V(i, j));

  SparseMatrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  if (!analyzed_) {
    llt_.analyzePattern(m);
    analyzed_ = true;
  }
  llt_.factorize(m);
  if (llt_.info() != Eigen::Success) throw Error(ErrorKind::solver, "Neumann solve: factorization failed");
  factorized_ = true;
}

ScalarField NeumannPoissonSolver::solve(const ScalarField& f) const {
  if (!factorized_) throw Error(ErrorKind::solver, "Neumann solve: coefficients not set");
  require_same_grid(f.grid, coeff_.grid, "Neumann solve");
  const int n = static_cast<int>(f.size());
  double mean = 0.0;
  for (double x : f.values) mean += x;
  mean /= n;
  Eigen::VectorXd rhs(n);
  for (int k = 0; k < n; ++k) rhs[k] = f.values[k] - mean;
  rhs[0] = 0.0;
  Eigen::VectorXd x = llt_.solve(rhs);
  ScalarField u(f.grid);
  double umean = 0.0;
  for (int k = 0; k < n; ++k) umean += x[k];
  umean /= n;
  for (int k = 0; k < n; ++k) u.values[k] = x[k] - umean;
  return u;
}

}  // namespace nscheps
