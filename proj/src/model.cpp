#include "pgv/model.hpp"

#include <algorithm>
#include <cmath>

#include "pgv/errors.hpp"

namespace pgv {

namespace {
std::vector<double> squared(const std::vector<double>& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (double x : v) out.push_back(x * x);
  return out;
}

std::vector<double> cosine_eigs(int count) {
  std::vector<double> out;
  for (int m = 1; m <= count; ++m) out.push_back(std::pow(m * std::numbers::pi, 2));
  return out;
}

int checked_quadrature(const Resolution& r) {
  return r.nz_quad > 0 ? r.nz_quad : default_quadrature_size(r.nz_t, r.nz_v);
}
}  // namespace

int default_quadrature_size(int nz_t, int nz_v) { return 6 * std::max(nz_t, nz_v); }

ModeTable build_mode_table(const DomainConfig& domain, const Resolution& res,
                           double robin_alpha) {
  return ModeTable(res.nx, res.ny, domain.lx, domain.ly,
                   squared(robin_eigenvalues(robin_alpha, res.nz_t)));
}

Model::Model(const ModelConfig& config)
    : config_(config),
      quad_(vertical_quadrature(checked_quadrature(config.resolution),
                                std::max(config.resolution.nz_t, config.resolution.nz_v))),
      basis_t_(config.physics.robin_alpha, config.resolution.nz_t),
      basis_v_(config.resolution.nz_v),
      basis_w_(config.resolution.nz_v),
      t_modes_(build_mode_table(config.domain, config.resolution, config.physics.robin_alpha)),
      v_modes_(config.resolution.nx, config.resolution.ny, config.domain.lx, config.domain.ly,
               cosine_eigs(config.resolution.nz_v)),
      coupling_(coupling_matrices(basis_t_, basis_v_, basis_w_, quad_)) {
  if (!std::isfinite(config.physics.f))
    throw InvalidArgument("Model: Coriolis parameter must be finite");
  const ModeShape& s = t_modes_.shape();
  grid_ = std::make_unique<GridTransform>(s, v_modes_.shape(), coupling_, config.domain.lx,
                                          config.domain.ly, dealiased_grid_size(s.kx_max),
                                          dealiased_grid_size(s.ky_max));
}

}  // namespace pgv
