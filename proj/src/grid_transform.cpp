#include "pgv/grid_transform.hpp"

#include <cmath>
#include <mutex>

#include "pgv/errors.hpp"

namespace pgv {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

bool smooth_size(int n) {
  for (int p : {2, 3, 5})
    while (n % p == 0) n /= p;
  return n == 1;
}
}  // namespace

int dealiased_grid_size(int kmax) {
  int n = std::max(3 * kmax + 1, 2);
  while (n % 2 != 0 || !smooth_size(n)) ++n;
  return n;
}

GridTransform::GridTransform(const ModeShape& t_shape, const ModeShape& v_shape,
                             const CouplingMatrices& cm, double lx, double ly, int mx, int my)
    : t_shape_(t_shape),
      v_shape_(v_shape),
      cm_(cm),
      lx_(lx),
      ly_(ly),
      mx_(mx),
      my_(my),
      myh_(my / 2 + 1),
      nq_(cm.nq) {
  if (mx < 3 * t_shape.kx_max + 1 || my < 3 * t_shape.ky_max + 1)
    throw InvalidArgument("GridTransform: grid " + std::to_string(mx) + "x" + std::to_string(my) +
                          " is too small to dealias |k| <= " + std::to_string(t_shape.kx_max) +
                          "," + std::to_string(t_shape.ky_max));
  if (t_shape.kx_max != v_shape.kx_max || t_shape.ky_max != v_shape.ky_max)
    throw InvalidArgument("GridTransform: temperature and velocity horizontal modes differ");

  std::vector<Complex> spec(static_cast<std::size_t>(nq_) * mx_ * myh_);
  std::vector<double> real(grid_size());
  const int n[2] = {mx_, my_};
  std::lock_guard<std::mutex> lock(planner_mutex());
  c2r_ = fftw_plan_many_dft_c2r(2, n, nq_, reinterpret_cast<fftw_complex*>(spec.data()), nullptr,
                                1, mx_ * myh_, real.data(), nullptr, 1, mx_ * my_,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
  r2c_ = fftw_plan_many_dft_r2c(2, n, nq_, real.data(), nullptr, 1, mx_ * my_,
                                reinterpret_cast<fftw_complex*>(spec.data()), nullptr, 1,
                                mx_ * myh_, FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!c2r_ || !r2c_) throw std::runtime_error("GridTransform: FFTW planning failed");
}

GridTransform::~GridTransform() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (c2r_) fftw_destroy_plan(c2r_);
  if (r2c_) fftw_destroy_plan(r2c_);
}

void GridTransform::synthesize(const Complex* coeffs, const ModeShape& shape,
                               const std::vector<double>& basis, Op op, std::span<double> out,
                               Scratch& s) const {
  const std::size_t spec_size = static_cast<std::size_t>(nq_) * mx_ * myh_;
  s.spec.assign(spec_size, Complex{});
  const int nz = shape.nz;
  const double scale = 1.0 / std::sqrt(lx_ * ly_);
  const double two_pi = 2.0 * std::numbers::pi;
  for (int kx = -shape.kx_max; kx <= shape.kx_max; ++kx) {
    const int ixf = kx < 0 ? kx + mx_ : kx;
    for (int ky = 0; ky <= shape.ky_max; ++ky) {
      Complex mult(scale, 0.0);
      if (op == Op::Dx) mult = Complex(0.0, scale * two_pi * kx / lx_);
      if (op == Op::Dy) mult = Complex(0.0, scale * two_pi * ky / ly_);
      const Complex* col = coeffs + shape.slot(kx, ky, 0);
      Complex* dst = s.spec.data() + static_cast<std::size_t>(ixf) * myh_ + ky;
      for (int q = 0; q < nq_; ++q) {
        const double* row = basis.data() + static_cast<std::size_t>(q) * nz;
        double re = 0.0, im = 0.0;
        for (int m = 0; m < nz; ++m) {
          re += row[m] * col[m].real();
          im += row[m] * col[m].imag();
        }
        dst[static_cast<std::size_t>(q) * mx_ * myh_] = mult * Complex(re, im);
      }
    }
  }
  fftw_execute_dft_c2r(c2r_, reinterpret_cast<fftw_complex*>(s.spec.data()), out.data());
}

void GridTransform::analyze(std::span<const double> in, const ModeShape& shape,
                            const std::vector<double>& basis, Complex* coeffs, Scratch& s) const {
  s.spec.resize(static_cast<std::size_t>(nq_) * mx_ * myh_);
  // r2c leaves its input intact for out-of-place transforms.
  fftw_execute_dft_r2c(r2c_, const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(s.spec.data()));
  const int nz = shape.nz;
  const double factor = std::sqrt(lx_ * ly_) / (static_cast<double>(mx_) * my_);
  for (int kx = -shape.kx_max; kx <= shape.kx_max; ++kx) {
    const int ixf = kx < 0 ? kx + mx_ : kx;
    for (int ky = 0; ky <= shape.ky_max; ++ky) {
      if (ky == 0 && kx < 0) continue;
      Complex* col = coeffs + shape.slot(kx, ky, 0);
      const Complex* src = s.spec.data() + static_cast<std::size_t>(ixf) * myh_ + ky;
      for (int m = 0; m < nz; ++m) col[m] = Complex{};
      for (int q = 0; q < nq_; ++q) {
        const Complex v = src[static_cast<std::size_t>(q) * mx_ * myh_] * cm_.weights[q];
        const double* row = basis.data() + static_cast<std::size_t>(q) * nz;
        for (int m = 0; m < nz; ++m) col[m] += row[m] * v;
      }
      for (int m = 0; m < nz; ++m) col[m] *= factor;
      if (kx == 0 && ky == 0)
        for (int m = 0; m < nz; ++m) col[m] = Complex(col[m].real(), 0.0);
    }
  }
  // Mirror into the lower half plane.
  for (int kx = -shape.kx_max; kx <= shape.kx_max; ++kx)
    for (int ky = -shape.ky_max; ky <= 0; ++ky) {
      if (ky == 0 && kx >= 0) continue;
      for (int m = 0; m < nz; ++m)
        coeffs[shape.slot(kx, ky, m)] = std::conj(coeffs[shape.slot(-kx, -ky, m)]);
    }
}

void GridTransform::to_grid(const TemperatureField& t, Op op, std::span<double> out,
                            Scratch& s) const {
  if (t.shape() != t_shape_) throw InvalidArgument("to_grid: temperature shape mismatch");
  synthesize(t.data(), t_shape_, op == Op::Dz ? cm_.dphi : cm_.phi,
             op == Op::Dz ? Op::Value : op, out, s);
}

void GridTransform::to_grid(const SpectralField<VelocityTag>& v, std::span<double> out,
                            Scratch& s) const {
  if (v.shape() != v_shape_) throw InvalidArgument("to_grid: velocity shape mismatch");
  synthesize(v.data(), v_shape_, cm_.psi, Op::Value, out, s);
}

void GridTransform::to_grid(const WField& w, std::span<double> out, Scratch& s) const {
  if (w.shape() != v_shape_) throw InvalidArgument("to_grid: w shape mismatch");
  synthesize(w.data(), v_shape_, cm_.chi, Op::Value, out, s);
}

void GridTransform::from_grid(std::span<const double> in, TemperatureField& out,
                              Scratch& s) const {
  if (out.shape() != t_shape_) out = TemperatureField(t_shape_);
  analyze(in, t_shape_, cm_.phi, out.data(), s);
}

void GridTransform::from_grid(std::span<const double> in, SpectralField<VelocityTag>& out,
                              Scratch& s) const {
  if (out.shape() != v_shape_) out = SpectralField<VelocityTag>(v_shape_);
  analyze(in, v_shape_, cm_.psi, out.data(), s);
}

void GridTransform::from_grid(std::span<const double> in, WField& out, Scratch& s) const {
  if (out.shape() != v_shape_) out = WField(v_shape_);
  analyze(in, v_shape_, cm_.chi, out.data(), s);
}

double GridTransform::integrate(std::span<const double> values) const {
  const double cell = lx_ * ly_ / (static_cast<double>(mx_) * my_);
  double total = 0.0;
  for (int q = 0; q < nq_; ++q) {
    double level = 0.0;
    const double* p = values.data() + static_cast<std::size_t>(q) * mx_ * my_;
    for (int i = 0; i < mx_ * my_; ++i) level += p[i];
    total += cm_.weights[q] * level;
  }
  return total * cell;
}

}  // namespace pgv
