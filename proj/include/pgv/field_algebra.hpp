#ifndef PGV_FIELD_ALGEBRA_HPP
#define PGV_FIELD_ALGEBRA_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "pgv/spectral_basis.hpp"

namespace pgv {

using Complex = std::complex<double>;

struct TemperatureTag {};
struct VelocityTag {};
struct VerticalVelocityTag {};
struct SurfaceTag {};

/// Complex spectral coefficients of a real field in the fixed
/// (k_x, k_y, m) layout. The field is real-valued, so coefficients obey
/// c(-kappa, m) = conj(c(kappa, m)); operations here preserve that.
///
/// The physical field is sum_s c_s e^{i kappa.x} / sqrt(Lx Ly) b_m(z) for
/// an L2(-1,0)-normalized vertical basis b, so the L2(O) inner product of two
/// fields is the real part of the coefficient dot product.
template <class Tag>
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(const ModeShape& shape) : shape_(shape), c_(shape.size()) {}

  const ModeShape& shape() const { return shape_; }
  std::size_t size() const { return c_.size(); }

  Complex& operator[](std::size_t s) { return c_[s]; }
  const Complex& operator[](std::size_t s) const { return c_[s]; }
  Complex* data() { return c_.data(); }
  const Complex* data() const { return c_.data(); }
  std::span<Complex> coefficients() { return c_; }
  std::span<const Complex> coefficients() const { return c_; }

  void set_zero() { std::fill(c_.begin(), c_.end(), Complex{}); }

  SpectralField& operator+=(const SpectralField& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  SpectralField& operator-=(const SpectralField& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  SpectralField& operator*=(double a) {
    for (auto& x : c_) x *= a;
    return *this;
  }
  /// this += a * x
  void axpy(double a, const SpectralField& x) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += a * x.c_[i];
  }

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double a, SpectralField b) { return b *= a; }

  bool operator==(const SpectralField&) const = default;

 private:
  ModeShape shape_;
  std::vector<Complex> c_;
};

using TemperatureField = SpectralField<TemperatureTag>;
using WField = SpectralField<VerticalVelocityTag>;
/// Surface pressure: one vertical slot; the kappa = 0 entry is the gauge and
/// held at zero.
using SurfacePressure = SpectralField<SurfaceTag>;

/// Horizontal velocity over the cosine basis psi_m, m >= 1 (no barotropic
/// slot).
struct VelocityField {
  SpectralField<VelocityTag> v1;
  SpectralField<VelocityTag> v2;

  VelocityField() = default;
  explicit VelocityField(const ModeShape& shape) : v1(shape), v2(shape) {}
  const ModeShape& shape() const { return v1.shape(); }
};

/// Real part of the coefficient dot product, i.e. the L2(O) inner product.
template <class Tag>
double inner_h(const SpectralField<Tag>& a, const SpectralField<Tag>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (std::conj(a[i]) * b[i]).real();
  return s;
}

double norm_h(const TemperatureField& t);
double norm_v(const ModeTable& table, const TemperatureField& t);
double norm_da(const ModeTable& table, const TemperatureField& t);
/// sum lambda |c|^2, i.e. ||T||^2 = (AT, T).
double norm_v2(const ModeTable& table, const TemperatureField& t);
/// V inner product (AT, S).
double inner_v(const ModeTable& table, const TemperatureField& a, const TemperatureField& b);

/// H^1 and H^2 seminorms of a velocity with the velocity-table weights
/// |kappa|^2 + (m pi)^2.
double norm_h1(const ModeTable& vtable, const VelocityField& v);
double norm_h2(const ModeTable& vtable, const VelocityField& v);
double norm_l2(const VelocityField& v);

/// Largest |c(kappa) - conj(c(-kappa))| over all slots; zero for real fields.
template <class Tag>
double hermitian_defect(const SpectralField<Tag>& f) {
  const ModeShape& s = f.shape();
  double worst = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const std::size_t p = s.slot(-s.kx_of(i), -s.ky_of(i), s.m_of(i));
    worst = std::max(worst, std::abs(f[i] - std::conj(f[p])));
  }
  return worst;
}

/// Coordinates of a field in the real orthonormal eigenbasis enumerated by
/// the table (indexed by slot, see ModeTable). This map is an isometry from
/// H to R^n.
std::vector<double> real_coordinates(const ModeTable& table, const TemperatureField& t);
void real_coordinates(const ModeTable& table, const TemperatureField& t, std::span<double> out);
TemperatureField from_real_coordinates(const ModeTable& table, std::span<const double> x);
void from_real_coordinates(const ModeTable& table, std::span<const double> x,
                           TemperatureField& out);

/// Multiplies real eigen-coordinate s by d[s] without leaving coefficient
/// space; correct even when d differs between the cos and sin partners.
void scale_real_modes(const ModeTable& table, std::span<const double> d, TemperatureField& t);

/// H-orthogonal projection onto the span of the n_keep lowest eigenmodes.
/// Throws InvalidArgument when n_keep exceeds the table size.
TemperatureField project_low(const ModeTable& table, const TemperatureField& t,
                             std::size_t n_keep);

/// Vertical integrals linking the three bases, and the bases evaluated at
/// the quadrature nodes.
struct CouplingMatrices {
  int nz_t = 0;
  int nz_v = 0;
  int nq = 0;
  /// c_int[mv * nz_t + mt] = < int_{-1}^z phi_mt, psi_mv >
  std::vector<double> c_int;
  /// c_ps[mt] = int_{-1}^0 z phi_mt(z) dz
  std::vector<double> c_ps;
  /// Diagonal of D_w: int_{-1}^z psi_m = d_w[m] chi_m
  std::vector<double> d_w;
  /// Basis values at nodes, row-major [q * nz + m].
  std::vector<double> phi;
  std::vector<double> dphi;
  std::vector<double> psi;
  std::vector<double> chi;
  std::vector<double> weights;
  std::vector<double> nodes;

  double int_tv(int mv, int mt) const { return c_int[static_cast<std::size_t>(mv) * nz_t + mt]; }
};

/// Throws InvalidArgument when the quadrature is below the floor for the
/// given bases.
CouplingMatrices coupling_matrices(const VerticalBasisT& bt, const VerticalBasisV& bv,
                                   const VerticalBasisW& bw, const VerticalQuadrature& quad);

}  // namespace pgv

#endif  // PGV_FIELD_ALGEBRA_HPP
