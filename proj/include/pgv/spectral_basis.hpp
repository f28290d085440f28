#ifndef PGV_SPECTRAL_BASIS_HPP
#define PGV_SPECTRAL_BASIS_HPP

// Eigenstructure of the temperature operator A on T^2 x (-1, 0):
// horizontal Fourier modes times vertical Robin/Neumann eigenfunctions,
// plus the cosine and sine bases used for horizontal and vertical velocity.

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

namespace pgv {

/// Roots of mu tan(mu) = robin_alpha, the m-th (1-based) in
/// ((m-1)pi, (m-1)pi + pi/2). Bracketed bisection followed by a Newton polish.
std::vector<double> robin_eigenvalues(double robin_alpha, int count);

/// Gauss-Legendre rule mapped to (-1, 0).
struct VerticalQuadrature {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }

  template <class F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (std::size_t q = 0; q < nodes.size(); ++q) s += weights[q] * f(nodes[q]);
    return s;
  }
};

/// Smallest quadrature size that keeps products of retained vertical modes
/// alias-free.
int quadrature_floor(int max_vertical_modes);

/// Gauss-Legendre nodes on (-1, 0). Throws InvalidArgument when nz_quad is
/// below quadrature_floor(max_vertical_modes).
VerticalQuadrature vertical_quadrature(int nz_quad, int max_vertical_modes);

/// phi_m(z) = cos(mu_m (z+1)) / norm_m, satisfying dT/dz + alpha T = 0 at z=0
/// and dT/dz = 0 at z=-1. Index m is 0-based here.
class VerticalBasisT {
 public:
  VerticalBasisT(double robin_alpha, int count);

  int size() const { return static_cast<int>(roots_.size()); }
  double robin_alpha() const { return robin_alpha_; }
  const std::vector<double>& roots() const { return roots_; }
  const std::vector<double>& norms() const { return norms_; }

  double value(int m, double z) const;
  double derivative(int m, double z) const;
  /// Closed form of int_{-1}^{z} phi_m.
  double antiderivative(int m, double z) const;

 private:
  double robin_alpha_;
  std::vector<double> roots_;
  std::vector<double> norms_;
};

/// psi_m(z) = sqrt(2) cos(m pi (z+1)), m = 1..count (0-based index m-1).
/// The constant (barotropic) mode is deliberately absent.
class VerticalBasisV {
 public:
  explicit VerticalBasisV(int count) : count_(count) {}
  int size() const { return count_; }
  double wavenumber(int m) const { return (m + 1) * std::numbers::pi; }
  double value(int m, double z) const;
  double derivative(int m, double z) const;

 private:
  int count_;
};

/// chi_m(z) = sqrt(2) sin(m pi (z+1)), m = 1..count.
class VerticalBasisW {
 public:
  explicit VerticalBasisW(int count) : count_(count) {}
  int size() const { return count_; }
  double wavenumber(int m) const { return (m + 1) * std::numbers::pi; }
  double value(int m, double z) const;
  double derivative(int m, double z) const;

 private:
  int count_;
};

/// Layout of a spectral coefficient array: k_x in [-kx_max, kx_max],
/// k_y in [-ky_max, ky_max], vertical index m; m fastest, then k_y, then k_x.
struct ModeShape {
  int kx_max = 0;
  int ky_max = 0;
  int nz = 0;

  int nkx() const { return 2 * kx_max + 1; }
  int nky() const { return 2 * ky_max + 1; }
  std::size_t horizontal_count() const { return static_cast<std::size_t>(nkx()) * nky(); }
  std::size_t size() const { return horizontal_count() * nz; }

  std::size_t slot(int kx, int ky, int m) const {
    return (static_cast<std::size_t>(kx + kx_max) * nky() + (ky + ky_max)) * nz + m;
  }
  std::size_t horizontal_index(int kx, int ky) const {
    return static_cast<std::size_t>(kx + kx_max) * nky() + (ky + ky_max);
  }
  int kx_of(std::size_t s) const { return static_cast<int>(s / nz / nky()) - kx_max; }
  int ky_of(std::size_t s) const { return static_cast<int>((s / nz) % nky()) - ky_max; }
  int m_of(std::size_t s) const { return static_cast<int>(s % nz); }

  bool operator==(const ModeShape&) const = default;
};

/// Retained wavenumber bound for a horizontal resolution: the Nyquist
/// wavenumber of an even resolution is dropped so that every retained mode
/// has its conjugate partner.
int retained_wavenumber(int resolution);

/// Enumeration of the eigenbasis e_n of a diagonal operator
/// lambda(kappa, m) = |kappa|^2 + vertical_eig[m].
///
/// Every slot of the complex coefficient array stands for one real
/// eigenfunction: kappa = 0 gives phi_m, a slot in the upper half plane
/// gives sqrt(2) cos(kappa.x) phi_m, and its mirror slot gives
/// sqrt(2) sin(kappa.x) phi_m. The sort order n -> slot is by ascending
/// lambda with lexicographic (k_x, k_y, m) tie-break.
class ModeTable {
 public:
  ModeTable(int nx, int ny, double lx, double ly, std::vector<double> vertical_eigs);

  const ModeShape& shape() const { return shape_; }
  std::size_t size() const { return shape_.size(); }
  double lx() const { return lx_; }
  double ly() const { return ly_; }

  double kappa_x(int kx) const { return 2.0 * std::numbers::pi * kx / lx_; }
  double kappa_y(int ky) const { return 2.0 * std::numbers::pi * ky / ly_; }
  double kappa2(int kx, int ky) const {
    const double a = kappa_x(kx), b = kappa_y(ky);
    return a * a + b * b;
  }

  double lambda(std::size_t slot) const { return lambda_[slot]; }
  const std::vector<double>& lambdas() const { return lambda_; }

  /// 0-based sort rank of a slot; rank n is the eigenpair usually written
  /// with 1-based index n+1.
  std::size_t rank_of(std::size_t slot) const { return rank_[slot]; }
  std::size_t slot_at(std::size_t rank) const { return order_[rank]; }

  double lambda1() const { return lambda_[order_.front()]; }
  /// The (count+1)-th smallest eigenvalue, i.e. the first one outside P_count.
  double lambda_after(std::size_t count) const;

  /// Slot of (-kappa, m).
  std::size_t partner(std::size_t slot) const;
  /// +1 for the upper half plane (k_x > 0, or k_x = 0 and k_y > 0), 0 for
  /// kappa = 0, -1 otherwise.
  int half_plane(std::size_t slot) const;

 private:
  ModeShape shape_;
  double lx_;
  double ly_;
  std::vector<double> lambda_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> rank_;
};

}  // namespace pgv

#endif  // PGV_SPECTRAL_BASIS_HPP
