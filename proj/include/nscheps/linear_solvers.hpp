#pragma once

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <vector>

#include "nscheps/grid.hpp"

namespace nscheps {

/// Direct solver for  -div(c grad u) = f  with homogeneous Neumann conditions
/// and face coefficients c > 0. The null space is removed by pinning one cell;
/// the returned solution has mean zero.
///
/// The symbolic factorization is kept between calls on the same grid, and
/// the numeric one is reused while the coefficients are unchanged.
class NeumannPoissonSolver {
 public:
  void set_coefficients(const VectorField& face_coeff);
  /// `f` must have zero mean up to rounding; the residual mean is removed.
  ScalarField solve(const ScalarField& f) const;
  const VectorField& coefficients() const { return coeff_; }
  bool ready() const { return factorized_; }

 private:
  using SparseMatrix = Eigen::SparseMatrix<double>;
  VectorField coeff_;
  Eigen::SimplicialLLT<SparseMatrix> llt_;
  bool analyzed_ = false;
  bool factorized_ = false;
};

}  // namespace nscheps
