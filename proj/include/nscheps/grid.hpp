#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nscheps {

/// Uniform rectangular grid on [0,lx] x [0,ly] with square cells.
struct GridSpec {
  int nx = 0;
  int ny = 0;
  double lx = 1.0;
  double ly = 1.0;

  /// Validates and returns a grid; throws on non-square cells or nx, ny < 4.
  static GridSpec make(int nx, int ny, double lx, double ly);

  double h() const { return lx / nx; }
  double area() const { return lx * ly; }
  std::size_t cells() const { return static_cast<std::size_t>(nx) * ny; }
  std::size_t u_faces() const { return static_cast<std::size_t>(nx + 1) * ny; }
  std::size_t v_faces() const { return static_cast<std::size_t>(nx) * (ny + 1); }

  std::size_t cell(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
  std::size_t u_face(int i, int j) const { return static_cast<std::size_t>(j) * (nx + 1) + i; }
  std::size_t v_face(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }

  double x_center(int i) const { return (i + 0.5) * h(); }
  double y_center(int j) const { return (j + 0.5) * h(); }

  bool operator==(const GridSpec&) const = default;
};

/// Cell-centered scalar; values stored row-major (x fastest).
struct ScalarField {
  GridSpec grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const GridSpec& g, double fill = 0.0) : grid(g), values(g.cells(), fill) {}

  double& operator()(int i, int j) { return values[grid.cell(i, j)]; }
  double operator()(int i, int j) const { return values[grid.cell(i, j)]; }
  std::size_t size() const { return values.size(); }

  template <class F>
  static ScalarField sample(const GridSpec& g, F&& f) {
    ScalarField out(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) out(i, j) = f(g.x_center(i), g.y_center(j));
    return out;
  }
};

/// Staggered (MAC) vector field: u on vertical faces, v on horizontal faces.
struct VectorField {
  GridSpec grid;
  std::vector<double> u;  // (nx+1) * ny, face (i,j) at x = i h, y = (j+1/2) h
  std::vector<double> v;  // nx * (ny+1), face (i,j) at x = (i+1/2) h, y = j h

  VectorField() = default;
  explicit VectorField(const GridSpec& g, double fill = 0.0)
      : grid(g), u(g.u_faces(), fill), v(g.v_faces(), fill) {}

  double& U(int i, int j) { return u[grid.u_face(i, j)]; }
  double U(int i, int j) const { return u[grid.u_face(i, j)]; }
  double& V(int i, int j) { return v[grid.v_face(i, j)]; }
  double V(int i, int j) const { return v[grid.v_face(i, j)]; }

  /// Sets every wall-normal boundary face to zero.
  void zero_boundary();
  bool boundary_is_zero() const;
};

enum class NormKind { L2, H1_semi, mean };

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* where);
void require_finite(const ScalarField& f, const char* where);

/// Face-centered central differences; wall faces carry zero (mirror ghost cell).
VectorField apply_gradient(const ScalarField& f);
/// Staggered divergence (flux difference / h).
ScalarField apply_divergence(const VectorField& w);
/// div(coeff_f grad f), coefficient averaged arithmetically onto faces.
ScalarField laplace_neumann(const ScalarField& f, const ScalarField& coeff);
/// div(face_coeff grad f) with a coefficient already living on faces.
ScalarField laplace_neumann_faces(const ScalarField& f, const VectorField& face_coeff);
/// Arithmetic mean of a cell field onto faces. Wall faces take the adjacent cell value.
VectorField average_to_faces(const ScalarField& f);

double field_norm(const ScalarField& f, NormKind kind);
/// sum f g h^2
double inner(const ScalarField& f, const ScalarField& g);
/// sum over all faces of w1 . w2 h^2
double inner(const VectorField& a, const VectorField& b);

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double s, const ScalarField& a);
double max_abs(const ScalarField& f);
double max_abs(const VectorField& w);
/// L2 distance of two staggered fields (sum over faces, weight h^2).
double l2_distance(const VectorField& a, const VectorField& b);

}  // namespace nscheps
