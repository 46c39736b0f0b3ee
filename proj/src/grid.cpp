#include "nscheps/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nscheps/error.hpp"

namespace nscheps {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parameter: return "parameter error";
    case ErrorKind::range: return "range error";
    case ErrorKind::shape: return "shape error";
    case ErrorKind::domain: return "domain error";
    case ErrorKind::resolution: return "resolution error";
    case ErrorKind::compatibility: return "compatibility error";
    case ErrorKind::coefficient: return "coefficient-positivity error";
    case ErrorKind::config: return "configuration error";
    case ErrorKind::io: return "i/o error";
    case ErrorKind::format: return "format error";
    case ErrorKind::solver: return "solver failure";
  }
  return "error";
}

GridSpec GridSpec::make(int nx, int ny, double lx, double ly) {
  if (nx < 4 || ny < 4) {
    std::ostringstream os;
    os << "grid needs nx, ny >= 4 (got " << nx << " x " << ny << ")";
    throw Error(ErrorKind::parameter, os.str());
  }
  if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly))
    throw Error(ErrorKind::parameter, "domain side lengths must be positive and finite");
  const double hx = lx / nx;
  const double hy = ly / ny;
  if (std::abs(hx - hy) > 1e-12 * std::max(hx, hy))
    throw Error(ErrorKind::parameter, "cells must be square: lx/nx must equal ly/ny");
  return GridSpec{nx, ny, lx, ly};
}

void VectorField::zero_boundary() {
  for (int j = 0; j < grid.ny; ++j) {
    U(0, j) = 0.0;
    U(grid.nx, j) = 0.0;
  }
  for (int i = 0; i < grid.nx; ++i) {
    V(i, 0) = 0.0;
    V(i, grid.ny) = 0.0;
  }
}

bool VectorField::boundary_is_zero() const {
  for (int j = 0; j < grid.ny; ++j)
    if (U(0, j) != 0.0 || U(grid.nx, j) != 0.0) return false;
  for (int i = 0; i < grid.nx; ++i)
    if (V(i, 0) != 0.0 || V(i, grid.ny) != 0.0) return false;
  return true;
}

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* where) {
  if (!(a == b)) throw Error(ErrorKind::shape, std::string(where) + ": fields live on different grids");
}

void require_finite(const ScalarField& f, const char* where) {
  for (double x : f.values)
    if (!std::isfinite(x)) throw Error(ErrorKind::range, std::string(where) + ": non-finite value");
}

VectorField apply_gradient(const ScalarField& f) {
  const GridSpec& g = f.grid;
  const double inv_h = 1.0 / g.h();
  VectorField out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i) out.U(i, j) = (f(i, j) - f(i - 1, j)) * inv_h;
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) out.V(i, j) = (f(i, j) - f(i, j - 1)) * inv_h;
  return out;
}

ScalarField apply_divergence(const VectorField& w) {
  const GridSpec& g = w.grid;
  const double inv_h = 1.0 / g.h();
  ScalarField out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      out(i, j) = (w.U(i + 1, j) - w.U(i, j) + w.V(i, j + 1) - w.V(i, j)) * inv_h;
  return out;
}

VectorField average_to_faces(const ScalarField& f) {
  const GridSpec& g = f.grid;
  VectorField out(g);
  for (int j = 0; j < g.ny; ++j) {
    out.U(0, j) = f(0, j);
    out.U(g.nx, j) = f(g.nx - 1, j);
    for (int i = 1; i < g.nx; ++i) out.U(i, j) = 0.5 * (f(i, j) + f(i - 1, j));
  }
  for (int i = 0; i < g.nx; ++i) {
    out.V(i, 0) = f(i, 0);
    out.V(i, g.ny) = f(i, g.ny - 1);
  }
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) out.V(i, j) = 0.5 * (f(i, j) + f(i, j - 1));
  return out;
}

ScalarField laplace_neumann_faces(const ScalarField& f, const VectorField& face_coeff) {
  require_same_grid(f.grid, face_coeff.grid, "laplace_neumann");
  VectorField flux = apply_gradient(f);
  for (std::size_t k = 0; k < flux.u.size(); ++k) flux.u[k] *= face_coeff.u[k];
  for (std::size_t k = 0; k < flux.v.size(); ++k) flux.v[k] *= face_coeff.v[k];
  return apply_divergence(flux);
}

ScalarField laplace_neumann(const ScalarField& f, const ScalarField& coeff) {
  require_same_grid(f.grid, coeff.grid, "laplace_neumann");
  for (double c : coeff.values)
    if (!(c > 0.0)) throw Error(ErrorKind::coefficient, "laplace_neumann: coefficient must be positive");
  return laplace_neumann_faces(f, average_to_faces(coeff));
}

double inner(const ScalarField& f, const ScalarField& g) {
  require_same_grid(f.grid, g.grid, "inner");
  double s = 0.0;
  for (std::size_t k = 0; k < f.values.size(); ++k) s += f.values[k] * g.values[k];
  const double h = f.grid.h();
  return s * h * h;
}

double inner(const VectorField& a, const VectorField& b) {
  require_same_grid(a.grid, b.grid, "inner");
  double s = 0.0;
  for (std::size_t k = 0; k < a.u.size(); ++k) s += a.u[k] * b.u[k];
  for (std::size_t k = 0; k < a.v.size(); ++k) s += a.v[k] * b.v[k];
  const double h = a.grid.h();
  return s * h * h;
}

double field_norm(const ScalarField& f, NormKind kind) {
  switch (kind) {
    case NormKind::L2:
      return std::sqrt(inner(f, f));
    case NormKind::H1_semi: {
      const VectorField g = apply_gradient(f);
      return std::sqrt(inner(g, g));
    }
    case NormKind::mean: {
      double s = 0.0;
      for (double x : f.values) s += x;
      const double h = f.grid.h();
      return s * h * h / f.grid.area();
    }
  }
  return 0.0;
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid, b.grid, "operator+");
  ScalarField out(a.grid);
  for (std::size_t k = 0; k < a.size(); ++k) out.values[k] = a.values[k] + b.values[k];
  return out;
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid, b.grid, "operator-");
  ScalarField out(a.grid);
  for (std::size_t k = 0; k < a.size(); ++k) out.values[k] = a.values[k] - b.values[k];
  return out;
}

ScalarField operator*(double s, const ScalarField& a) {
  ScalarField out(a.grid);
  for (std::size_t k = 0; k < a.size(); ++k) out.values[k] = s * a.values[k];
  return out;
}

double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double x : f.values) m = std::max(m, std::abs(x));
  return m;
}

double max_abs(const VectorField& w) {
  double m = 0.0;
  for (double x : w.u) m = std::max(m, std::abs(x));
  for (double x : w.v) m = std::max(m, std::abs(x));
  return m;
}

double l2_distance(const VectorField& a, const VectorField& b) {
  require_same_grid(a.grid, b.grid, "l2_distance");
  double s = 0.0;
  for (std::size_t k = 0; k < a.u.size(); ++k) s += (a.u[k] - b.u[k]) * (a.u[k] - b.u[k]);
  for (std::size_t k = 0; k < a.v.size(); ++k) s += (a.v[k] - b.v[k]) * (a.v[k] - b.v[k]);
  const double h = a.grid.h();
  return std::sqrt(s) * h;
}

}  // namespace nscheps
