// Brute-force reference computations shared by the unit and acceptance tests.
// Everything here is built from the closed-form kernel and plain loops, never
// from the FFT operator or the sparse solvers under test.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "nscheps/grid.hpp"
#include "nscheps/physics.hpp"

namespace oracle {

using nscheps::GridSpec;
using nscheps::ScalarField;

inline double kernel(double r, double eps) {
  const double s = r / eps;
  if (s >= 1.0) return 0.0;
  const double b = (1.0 - s * s) * (1.0 - s * s);
  return 48.0 / std::numbers::pi * std::pow(eps, -4) * b;
}

/// Lattice factor: analytic interior mass 16/eps^2 over the raw sum of samples.
inline double lattice_scale(const GridSpec& g, double eps) {
  const double h = g.h();
  const int reach = static_cast<int>(std::floor(eps / h));
  double sum = 0.0;
  for (int dj = -reach; dj <= reach; ++dj)
    for (int di = -reach; di <= reach; ++di) sum += kernel(h * std::hypot(di, dj), eps) * h * h;
  return 16.0 / (eps * eps) / sum;
}

/// (J * phi)_i = sum_j J(x_i - x_j) phi_j h^2, scaled, restricted to the domain.
inline ScalarField direct_convolution(const ScalarField& phi, double eps) {
  const GridSpec& g = phi.grid;
  const double h = g.h();
  const double s = lattice_scale(g, eps);
  ScalarField out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      double acc = 0.0;
      for (int q = 0; q < g.ny; ++q)
        for (int p = 0; p < g.nx; ++p) acc += kernel(h * std::hypot(i - p, j - q), eps) * phi(p, q);
      out(i, j) = s * acc * h * h;
    }
  return out;
}

/// Dense matrix of N = a_eps - J* on the cells.
inline Eigen::MatrixXd dense_nonlocal(const GridSpec& g, double eps) {
  const int n = static_cast<int>(g.cells());
  const double h = g.h();
  const double s = lattice_scale(g, eps);
  Eigen::MatrixXd N = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const int ia = a % g.nx, ja = a / g.nx, ib = b % g.nx, jb = b / g.nx;
      const double w = s * kernel(h * std::hypot(ia - ib, ja - jb), eps) * h * h;
      N(a, a) += w;
      N(a, b) -= w;
    }
  return N;
}

/// Dense -Lap_h with homogeneous Neumann walls (5-point, mirror ghosts).
inline Eigen::MatrixXd dense_neg_laplacian(const GridSpec& g) {
  const int n = static_cast<int>(g.cells());
  const double c = 1.0 / (g.h() * g.h());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  auto link = [&](int a, int b) {
    A(a, a) += c;
    A(b, b) += c;
    A(a, b) -= c;
    A(b, a) -= c;
  };
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int a = j * g.nx + i;
      if (i + 1 < g.nx) link(a, a + 1);
      if (j + 1 < g.ny) link(a, a + g.nx);
    }
  return A;
}

/// Smallest kappa the path bound certifies: 1/2 sum_d w_d |d|_1 |d_x| h^2, at least 1.
inline double path_bound(const GridSpec& g, double eps) {
  const double h = g.h();
  const double s = lattice_scale(g, eps);
  const int rx = std::min(static_cast<int>(std::floor(eps / h)), g.nx - 1);
  const int ry = std::min(static_cast<int>(std::floor(eps / h)), g.ny - 1);
  double sum = 0.0;
  for (int dj = -ry; dj <= ry; ++dj)
    for (int di = -rx; di <= rx; ++di)
      sum += s * kernel(h * std::hypot(di, dj), eps) * h * h * (std::abs(di) + std::abs(dj)) * std::abs(di);
  return std::max(1.0, 0.5 * sum * h * h);
}

/// One nonlocal CH step at rest with constant unit mobility, solved by dense
/// Newton on phi directly:
///   phi - phi_n + dt A mu(phi) = 0,
///   mu(phi) = theta atanh(phi) + kappa A phi - theta_c phi_n - (kappa A - N) phi_n.
struct DenseStep {
  Eigen::VectorXd phi;
  Eigen::VectorXd mu;
  int iterations = 0;
};

inline DenseStep dense_nonlocal_step(const ScalarField& phi_n, double eps, double dt, double theta,
                                     double theta_c) {
  const GridSpec& g = phi_n.grid;
  const int n = static_cast<int>(g.cells());
  const Eigen::MatrixXd A = dense_neg_laplacian(g);
  const Eigen::MatrixXd N = dense_nonlocal(g, eps);
  const double kappa = path_bound(g, eps);
  const Eigen::VectorXd p0 = Eigen::Map<const Eigen::VectorXd>(phi_n.values.data(), n);
  const Eigen::VectorXd rhs = -theta_c * p0 - (kappa * A - N) * p0;

  DenseStep out;
  Eigen::VectorXd phi = p0;
  auto mu_of = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd m = kappa * A * p + rhs;
    for (int k = 0; k < n; ++k) m(k) += theta * std::atanh(p(k));
    return m;
  };
  for (int it = 0; it < 100; ++it) {
    const Eigen::VectorXd r = phi - p0 + dt * A * mu_of(phi);
    if (r.lpNorm<Eigen::Infinity>() < 1e-14) break;
    Eigen::MatrixXd H = kappa * A;
    for (int k = 0; k < n; ++k) H(k, k) += theta / (1.0 - phi(k) * phi(k));
    const Eigen::MatrixXd Jac = Eigen::MatrixXd::Identity(n, n) + dt * A * H;
    Eigen::VectorXd step = Jac.fullPivLu().solve(-r);
    double alpha = 1.0;
    while ((phi + alpha * step).lpNorm<Eigen::Infinity>() >= 1.0) alpha *= 0.5;
    phi += alpha * step;
    out.iterations = it + 1;
  }
  out.phi = phi;
  out.mu = mu_of(phi);
  return out;
}

inline ScalarField random_field(const GridSpec& g, unsigned seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  ScalarField f(g);
  for (double& x : f.values) x = u(rng);
  return f;
}

}  // namespace oracle
