#ifndef PGV_MODEL_HPP
#define PGV_MODEL_HPP

#include <memory>
#include <numbers>

#include "pgv/field_algebra.hpp"
#include "pgv/grid_transform.hpp"
#include "pgv/spectral_basis.hpp"

namespace pgv {

struct DomainConfig {
  double lx = 2.0 * std::numbers::pi;
  double ly = 2.0 * std::numbers::pi;
};

struct Resolution {
  int nx = 16;
  int ny = 16;
  int nz_t = 8;
  int nz_v = 8;
  /// 0 selects the default size.
  int nz_quad = 0;
};

struct PhysicsConfig {
  double f = 1.0;
  double robin_alpha = 1.0;
};

struct ModelConfig {
  DomainConfig domain;
  Resolution resolution;
  PhysicsConfig physics;
};

/// Default vertical quadrature size for the given vertical resolutions.
int default_quadrature_size(int nz_t, int nz_v);

ModeTable build_mode_table(const DomainConfig& domain, const Resolution& res, double robin_alpha);

/// Immutable discretization: bases, quadrature, mode tables, coupling
/// matrices and FFT plans. Shared read-only across trajectories.
class Model {
 public:
  explicit Model(const ModelConfig& config);

  const ModelConfig& config() const { return config_; }
  double coriolis() const { return config_.physics.f; }
  double robin_alpha() const { return config_.physics.robin_alpha; }

  const VerticalQuadrature& quadrature() const { return quad_; }
  const VerticalBasisT& basis_t() const { return basis_t_; }
  const VerticalBasisV& basis_v() const { return basis_v_; }
  const VerticalBasisW& basis_w() const { return basis_w_; }
  /// Eigenstructure of A on temperature fields.
  const ModeTable& modes() const { return t_modes_; }
  /// |kappa|^2 + (m pi)^2 on the velocity (and w) layout.
  const ModeTable& velocity_modes() const { return v_modes_; }
  const CouplingMatrices& coupling() const { return coupling_; }
  const GridTransform& grid() const { return *grid_; }

  TemperatureField zero_temperature() const { return TemperatureField(t_modes_.shape()); }
  VelocityField zero_velocity() const { return VelocityField(v_modes_.shape()); }
  WField zero_w() const { return WField(v_modes_.shape()); }

 private:
  ModelConfig config_;
  VerticalQuadrature quad_;
  VerticalBasisT basis_t_;
  VerticalBasisV basis_v_;
  VerticalBasisW basis_w_;
  ModeTable t_modes_;
  ModeTable v_modes_;
  CouplingMatrices coupling_;
  std::unique_ptr<GridTransform> grid_;
};

}  // namespace pgv

#endif  // PGV_MODEL_HPP
