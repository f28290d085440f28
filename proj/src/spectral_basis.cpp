#include "pgv/spectral_basis.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <tuple>

#include "pgv/errors.hpp"

namespace pgv {

namespace {

constexpr double kPi = std::numbers::pi;

// mu sin(mu) - alpha cos(mu): same roots as mu tan(mu) = alpha inside the
// brackets, without the pole at (m-1)pi + pi/2.
double robin_residual(double mu, double alpha) {
  return mu * std::sin(mu) - alpha * std::cos(mu);
}

double tan_residual(double mu, double alpha) {
  return std::abs(mu * std::tan(mu) - alpha);
}

}  // namespace

std::vector<double> robin_eigenvalues(double robin_alpha, int count) {
  if (!(robin_alpha > 0.0) || !std::isfinite(robin_alpha))
    throw InvalidArgument("robin_eigenvalues: robin_alpha must be positive");
  if (count < 1) throw InvalidArgument("robin_eigenvalues: count must be >= 1");

  std::vector<double> roots;
  roots.reserve(count);
  for (int m = 1; m <= count; ++m) {
    const double lo0 = (m - 1) * kPi;
    const double hi0 = lo0 + 0.5 * kPi;
    double lo = lo0, hi = hi0;
    double flo = robin_residual(lo, robin_alpha);
    // The bracket endpoints have opposite signs: f(lo0) = -alpha (-1)^(m-1),
    // f(hi0) = hi0 (-1)^(m-1).
    for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi0;
         ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = robin_residual(mid, robin_alpha);
      if ((fm < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    double mu = 0.5 * (lo + hi);
    for (int it = 0; it < 4; ++it) {
      const double f = robin_residual(mu, robin_alpha);
      const double df = std::sin(mu) + mu * std::cos(mu) + robin_alpha * std::sin(mu);
      if (df == 0.0) break;
      const double next = mu - f / df;
      if (!(next > lo0 && next < hi0)) break;
      mu = next;
    }
    // Pick the representable neighbour with the smallest residual.
    double best = mu;
    double best_res = tan_residual(mu, robin_alpha);
    double cand = mu;
    for (int k = 0; k < 4; ++k) {
      cand = std::nextafter(cand, hi0);
      if (const double r = tan_residual(cand, robin_alpha); r < best_res && cand < hi0) {
        best = cand;
        best_res = r;
      }
    }
    cand = mu;
    for (int k = 0; k < 4; ++k) {
      cand = std::nextafter(cand, lo0);
      if (const double r = tan_residual(cand, robin_alpha); r < best_res && cand > lo0) {
        best = cand;
        best_res = r;
      }
    }
    roots.push_back(best);
  }
  return roots;
}

int quadrature_floor(int max_vertical_modes) { return 2 * max_vertical_modes + 2; }

VerticalQuadrature vertical_quadrature(int nz_quad, int max_vertical_modes) {
  if (max_vertical_modes < 1)
    throw InvalidArgument("vertical_quadrature: need at least one vertical mode");
  if (nz_quad < quadrature_floor(max_vertical_modes))
    throw InvalidArgument("vertical_quadrature: nz_quad=" + std::to_string(nz_quad) +
                          " below the dealiasing floor " +
                          std::to_string(quadrature_floor(max_vertical_modes)));

  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)>
      table(gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(nz_quad)),
            &gsl_integration_glfixed_table_free);
  VerticalQuadrature quad;
  quad.nodes.resize(nz_quad);
  quad.weights.resize(nz_quad);
  for (int i = 0; i < nz_quad; ++i) {
    double x = 0.0, w = 0.0;
    gsl_integration_glfixed_point(-1.0, 0.0, static_cast<std::size_t>(i), &x, &w, table.get());
    quad.nodes[i] = x;
    quad.weights[i] = w;
  }
  // Ascending node order, deterministic regardless of the table's layout.
  std::vector<int> idx(nz_quad);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return quad.nodes[a] < quad.nodes[b]; });
  VerticalQuadrature sorted;
  for (int i : idx) {
    sorted.nodes.push_back(quad.nodes[i]);
    sorted.weights.push_back(quad.weights[i]);
  }
  return sorted;
}

VerticalBasisT::VerticalBasisT(double robin_alpha, int count)
    : robin_alpha_(robin_alpha), roots_(robin_eigenvalues(robin_alpha, count)) {
  norms_.reserve(roots_.size());
  for (double mu : roots_) {
    // int_0^1 cos^2(mu u) du
    norms_.push_back(std::sqrt(0.5 + std::sin(2.0 * mu) / (4.0 * mu)));
  }
}

double VerticalBasisT::value(int m, double z) const {
  return std::cos(roots_[m] * (z + 1.0)) / norms_[m];
}

double VerticalBasisT::derivative(int m, double z) const {
  return -roots_[m] * std::sin(roots_[m] * (z + 1.0)) / norms_[m];
}

double VerticalBasisT::antiderivative(int m, double z) const {
  return std::sin(roots_[m] * (z + 1.0)) / (roots_[m] * norms_[m]);
}

double VerticalBasisV::value(int m, double z) const {
  return std::numbers::sqrt2 * std::cos(wavenumber(m) * (z + 1.0));
}

double VerticalBasisV::derivative(int m, double z) const {
  return -std::numbers::sqrt2 * wavenumber(m) * std::sin(wavenumber(m) * (z + 1.0));
}

double VerticalBasisW::value(int m, double z) const {
  return std::numbers::sqrt2 * std::sin(wavenumber(m) * (z + 1.0));
}

double VerticalBasisW::derivative(int m, double z) const {
  return std::numbers::sqrt2 * wavenumber(m) * std::cos(wavenumber(m) * (z + 1.0));
}

int retained_wavenumber(int resolution) { return (resolution - 1) / 2; }

ModeTable::ModeTable(int nx, int ny, double lx, double ly, std::vector<double> vertical_eigs)
    : lx_(lx), ly_(ly) {
  if (nx < 1 || ny < 1 || vertical_eigs.empty())
    throw InvalidArgument("ModeTable: resolutions must be >= 1");
  if (!(lx > 0.0) || !(ly > 0.0)) throw InvalidArgument("ModeTable: domain lengths must be > 0");
  shape_ = ModeShape{retained_wavenumber(nx), retained_wavenumber(ny),
                     static_cast<int>(vertical_eigs.size())};
  const std::size_t n = shape_.size();
  lambda_.resize(n);
  for (std::size_t s = 0; s < n; ++s)
    lambda_[s] = kappa2(shape_.kx_of(s), shape_.ky_of(s)) + vertical_eigs[shape_.m_of(s)];

  order_.resize(n);
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
    return std::make_tuple(lambda_[a], shape_.kx_of(a), shape_.ky_of(a), shape_.m_of(a)) <
           std::make_tuple(lambda_[b], shape_.kx_of(b), shape_.ky_of(b), shape_.m_of(b));
  });
  rank_.resize(n);
  for (std::size_t r = 0; r < n; ++r) rank_[order_[r]] = r;
}

double ModeTable::lambda_after(std::size_t count) const {
  if (count >= order_.size()) return std::numeric_limits<double>::infinity();
  return lambda_[order_[count]];
}

std::size_t ModeTable::partner(std::size_t slot) const {
  return shape_.slot(-shape_.kx_of(slot), -shape_.ky_of(slot), shape_.m_of(slot));
}

int ModeTable::half_plane(std::size_t slot) const {
  const int kx = shape_.kx_of(slot), ky = shape_.ky_of(slot);
  if (kx == 0 && ky == 0) return 0;
  if (kx > 0 || (kx == 0 && ky > 0)) return 1;
  return -1;
}

}  // namespace pgv
