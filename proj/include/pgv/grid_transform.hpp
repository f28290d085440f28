#ifndef PGV_GRID_TRANSFORM_HPP
#define PGV_GRID_TRANSFORM_HPP

#include <fftw3.h>

#include <span>
#include <vector>

#include "pgv/field_algebra.hpp"

namespace pgv {

/// Smallest even 2^a 3^b 5^c size that keeps quadratic products of modes
/// |k| <= kmax alias-free (>= 3 kmax + 1).
int dealiased_grid_size(int kmax);

/// Physical grid: Mx x My uniform points horizontally, quadrature nodes
/// vertically. Real arrays are laid out [q][ix][iy] with iy fastest.
///
/// Plans are created once (under a global lock) and executed through the
/// new-array interface, so one GridTransform may be shared by threads as
/// long as each thread owns its Scratch.
class GridTransform {
 public:
  enum class Op { Value, Dx, Dy, Dz };

  struct Scratch {
    std::vector<Complex> spec;
  };

  GridTransform(const ModeShape& t_shape, const ModeShape& v_shape, const CouplingMatrices& cm,
                double lx, double ly, int mx, int my);
  ~GridTransform();
  GridTransform(const GridTransform&) = delete;
  GridTransform& operator=(const GridTransform&) = delete;

  int mx() const { return mx_; }
  int my() const { return my_; }
  int nq() const { return nq_; }
  std::size_t grid_size() const { return static_cast<std::size_t>(nq_) * mx_ * my_; }
  std::vector<double> make_grid() const { return std::vector<double>(grid_size()); }

  void to_grid(const TemperatureField& t, Op op, std::span<double> out, Scratch& s) const;
  void to_grid(const SpectralField<VelocityTag>& v, std::span<double> out, Scratch& s) const;
  void to_grid(const WField& w, std::span<double> out, Scratch& s) const;

  /// L2 projection onto the retained temperature modes.
  void from_grid(std::span<const double> in, TemperatureField& out, Scratch& s) const;
  void from_grid(std::span<const double> in, SpectralField<VelocityTag>& out, Scratch& s) const;
  void from_grid(std::span<const double> in, WField& out, Scratch& s) const;

  /// Quadrature of a gridded scalar over the cylinder.
  double integrate(std::span<const double> values) const;

 private:
  void synthesize(const Complex* coeffs, const ModeShape& shape, const std::vector<double>& basis,
                  Op op, std::span<double> out, Scratch& s) const;
  void analyze(std::span<const double> in, const ModeShape& shape,
               const std::vector<double>& basis, Complex* coeffs, Scratch& s) const;

  ModeShape t_shape_;
  ModeShape v_shape_;
  const CouplingMatrices& cm_;
  double lx_;
  double ly_;
  int mx_;
  int my_;
  int myh_;
  int nq_;
  fftw_plan c2r_ = nullptr;
  fftw_plan r2c_ = nullptr;
};

}  // namespace pgv

#endif  // PGV_GRID_TRANSFORM_HPP
