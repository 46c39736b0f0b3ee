#include "nscheps/kernel.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>

#include "nscheps/error.hpp"

namespace nscheps {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

template <class T>
std::unique_ptr<T[], FftwFree> fftw_buffer(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (!p) throw std::bad_alloc();
  return std::unique_ptr<T[], FftwFree>(p);
}

// int_0^1 s^k (1 - s^2)^2 ds
double bump_moment(int k) { return 1.0 / (k + 1) - 2.0 / (k + 3) + 1.0 / (k + 5); }

}  // namespace

double MollifierFamily::bump(double s) {
  const double a = std::abs(s);
  if (a >= 1.0) return 0.0;
  const double t = 1.0 - a * a;
  return t * t;
}

double MollifierFamily::sphere_constant(int d) {
  if (d == 2) return std::numbers::pi;
  if (d == 3) return 4.0 * std::numbers::pi / 3.0;
  throw Error(ErrorKind::parameter, "mollifier dimension must be 2 or 3");
}

double MollifierFamily::eta(double r) const {
  const double s = std::abs(r) / eps;
  return std::pow(eps, -d) * amplitude * s * s * bump(s);
}

double MollifierFamily::kernel(double r) const {
  return amplitude * std::pow(eps, -d - 2) * bump(std::abs(r) / eps);
}

double MollifierFamily::moment() const {
  // 8-point Gauss-Legendre on [0, eps]; the integrand is a polynomial of degree d+5.
  static constexpr std::array<double, 4> nodes{0.1834346424956498, 0.5255324099163290,
                                               0.7966664774136267, 0.9602898564975363};
  static constexpr std::array<double, 4> weights{0.3626837833783620, 0.3137066458778873,
                                                 0.2223810344533745, 0.1012285362903763};
  double sum = 0.0;
  const double half = 0.5 * eps;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    for (double sign : {-1.0, 1.0}) {
      const double r = half * (1.0 + sign * nodes[k]);
      sum += weights[k] * eta(r) * std::pow(r, d - 1);
    }
  }
  return sum * half;
}

double MollifierFamily::interior_mass() const {
  // |S^(d-1)| A eps^-2 int_0^1 s^(d-1) psi(s) ds
  const double sphere_area = d == 2 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi;
  return sphere_area * amplitude * bump_moment(d - 1) / (eps * eps);
}

MollifierFamily build_mollifier(int d, double eps) {
  if (d != 2 && d != 3) throw Error(ErrorKind::parameter, "mollifier dimension must be 2 or 3");
  if (!(eps > 0.0) || !std::isfinite(eps)) throw Error(ErrorKind::parameter, "eps must be positive");
  MollifierFamily fam;
  fam.d = d;
  fam.eps = eps;
  // A * int_0^1 s^(d+1) psi(s) ds = 2 / C_d
  fam.amplitude = d == 2 ? 48.0 / std::numbers::pi : 945.0 / (16.0 * std::numbers::pi);
  return fam;
}

struct KernelOperator::FftPlans {
  int px = 0;
  int py = 0;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  FftPlans(int px_, int py_) : px(px_), py(py_) {
    const std::size_t n = static_cast<std::size_t>(px) * py;
    const std::size_t nc = static_cast<std::size_t>(py) * (px / 2 + 1);
    auto real = fftw_buffer<double>(n);
    auto spec = fftw_buffer<fftw_complex>(nc);
    std::lock_guard lock(planner_mutex());
    forward = fftw_plan_dft_r2c_2d(py, px, real.get(), spec.get(), FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_2d(py, px, spec.get(), real.get(), FFTW_ESTIMATE);
    if (!forward || !backward) throw Error(ErrorKind::solver, "FFTW planning failed");
  }
  ~FftPlans() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;

  std::size_t real_size() const { return static_cast<std::size_t>(px) * py; }
  std::size_t spectral_size() const { return static_cast<std::size_t>(py) * (px / 2 + 1); }
};

double KernelOperator::weight(int di, int dj) const {
  const double h = grid_.h();
  const double r = h * std::hypot(static_cast<double>(di), static_cast<double>(dj));
  return lattice_scale_ * family_.kernel(r) * h * h;
}

KernelOperator KernelOperator::build(const GridSpec& grid, const MollifierFamily& family) {
  if (family.d != 2) throw Error(ErrorKind::parameter, "kernel operator supports d = 2 only");
  const double h = grid.h();
  if (family.eps < h)
    throw Error(ErrorKind::resolution, "eps is smaller than one cell: kernel support is under-resolved");

  KernelOperator op;
  op.grid_ = grid;
  op.family_ = family;
  op.under_resolved_ = family.eps < 2.0 * h;
  op.interior_mass_ = family.interior_mass();

  const int reach = static_cast<int>(std::floor(family.eps / h));
  double lattice_sum = 0.0;
  for (int dj = -reach; dj <= reach; ++dj)
    for (int di = -reach; di <= reach; ++di)
      lattice_sum += family.kernel(h * std::hypot(static_cast<double>(di), static_cast<double>(dj))) * h * h;
  op.lattice_scale_ = op.interior_mass_ / lattice_sum;

  const int px = 2 * grid.nx;
  const int py = 2 * grid.ny;
  op.plans_ = std::make_shared<const FftPlans>(px, py);
  const FftPlans& plans = *op.plans_;

  auto real = fftw_buffer<double>(plans.real_size());
  std::memset(real.get(), 0, sizeof(double) * plans.real_size());
  const int rx = std::min(reach, grid.nx - 1);
  const int ry = std::min(reach, grid.ny - 1);
  for (int dj = -ry; dj <= ry; ++dj) {
    const int jj = (dj + py) % py;
    for (int di = -rx; di <= rx; ++di) {
      const int ii = (di + px) % px;
      real[static_cast<std::size_t>(jj) * px + ii] = op.weight(di, dj);
    }
  }
  auto spec = fftw_buffer<fftw_complex>(plans.spectral_size());
  fftw_execute_dft_r2c(plans.forward, real.get(), spec.get());
  const double norm = 1.0 / static_cast<double>(plans.real_size());
  op.multiplier_.resize(plans.spectral_size());
  for (std::size_t k = 0; k < plans.spectral_size(); ++k)
    op.multiplier_[k] = std::complex<double>(spec[k][0], spec[k][1]) * norm;

  double path_sum = 0.0;
  for (int dj = -ry; dj <= ry; ++dj)
    for (int di = -rx; di <= rx; ++di)
      path_sum += op.weight(di, dj) * (std::abs(di) + std::abs(dj)) * std::abs(di);
  op.laplacian_bound_ = std::max(1.0, 0.5 * path_sum * h * h);

  op.a_eps_ = op.convolve(ScalarField(grid, 1.0));
  return op;
}

ScalarField KernelOperator::convolve(const ScalarField& phi) const {
  require_same_grid(phi.grid, grid_, "convolve");
  const FftPlans& plans = *plans_;
  const int px = plans.px;
  auto real = fftw_buffer<double>(plans.real_size());
  std::memset(real.get(), 0, sizeof(double) * plans.real_size());
  for (int j = 0; j < grid_.ny; ++j)
    for (int i = 0; i < grid_.nx; ++i) real[static_cast<std::size_t>(j) * px + i] = phi(i, j);

  auto spec = fftw_buffer<fftw_complex>(plans.spectral_size());
  fftw_execute_dft_r2c(plans.forward, real.get(), spec.get());
  for (std::size_t k = 0; k < plans.spectral_size(); ++k) {
    const std::complex<double> z = std::complex<double>(spec[k][0], spec[k][1]) * multiplier_[k];
    spec[k][0] = z.real();
    spec[k][1] = z.imag();
  }
  fftw_execute_dft_c2r(plans.backward, spec.get(), real.get());

  ScalarField out(grid_);
  for (int j = 0; j < grid_.ny; ++j)
    for (int i = 0; i < grid_.nx; ++i) out(i, j) = real[static_cast<std::size_t>(j) * px + i];
  return out;
}

ScalarField KernelOperator::nonlocal_operator(const ScalarField& phi) const {
  ScalarField out = convolve(phi);
  for (std::size_t k = 0; k < out.size(); ++k)
    out.values[k] = a_eps_.values[k] * phi.values[k] - out.values[k];
  return out;
}

}  // namespace nscheps
