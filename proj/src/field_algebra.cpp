#include "pgv/field_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pgv/errors.hpp"

namespace pgv {

namespace {
constexpr double kSqrt2 = std::numbers::sqrt2;

template <class Tag>
double weighted_sum(const std::vector<double>& lambda, const SpectralField<Tag>& f, int power) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double w = power == 0 ? 1.0 : (power == 1 ? lambda[i] : lambda[i] * lambda[i]);
    s += w * std::norm(f[i]);
  }
  return s;
}
}  // namespace

double norm_h(const TemperatureField& t) {
  double s = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) s += std::norm(t[i]);
  return std::sqrt(s);
}

double norm_v2(const ModeTable& table, const TemperatureField& t) {
  return weighted_sum(table.lambdas(), t, 1);
}

double norm_v(const ModeTable& table, const TemperatureField& t) {
  return std::sqrt(norm_v2(table, t));
}

double norm_da(const ModeTable& table, const TemperatureField& t) {
  return std::sqrt(weighted_sum(table.lambdas(), t, 2));
}

double inner_v(const ModeTable& table, const TemperatureField& a, const TemperatureField& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += table.lambda(i) * (std::conj(a[i]) * b[i]).real();
  return s;
}

double norm_h1(const ModeTable& vtable, const VelocityField& v) {
  return std::sqrt(weighted_sum(vtable.lambdas(), v.v1, 1) +
                   weighted_sum(vtable.lambdas(), v.v2, 1));
}

double norm_h2(const ModeTable& vtable, const VelocityField& v) {
  return std::sqrt(weighted_sum(vtable.lambdas(), v.v1, 2) +
                   weighted_sum(vtable.lambdas(), v.v2, 2));
}

double norm_l2(const VelocityField& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.v1.size(); ++i) s += std::norm(v.v1[i]) + std::norm(v.v2[i]);
  return std::sqrt(s);
}

void real_coordinates(const ModeTable& table, const TemperatureField& t, std::span<double> out) {
  const std::size_t n = table.size();
  for (std::size_t s = 0; s < n; ++s) {
    switch (table.half_plane(s)) {
      case 0:
        out[s] = t[s].real();
        break;
      case 1:
        out[s] = kSqrt2 * t[s].real();
        break;
      default:
        out[s] = -kSqrt2 * t[table.partner(s)].imag();
        break;
    }
  }
}

std::vector<double> real_coordinates(const ModeTable& table, const TemperatureField& t) {
  std::vector<double> x(table.size());
  real_coordinates(table, t, x);
  return x;
}

void from_real_coordinates(const ModeTable& table, std::span<const double> x,
                           TemperatureField& out) {
  const std::size_t n = table.size();
  for (std::size_t s = 0; s < n; ++s) {
    switch (table.half_plane(s)) {
      case 0:
        out[s] = Complex(x[s], 0.0);
        break;
      case 1: {
        const std::size_t p = table.partner(s);
        out[s] = Complex(x[s], -x[p]) / kSqrt2;
        break;
      }
      default: {
        const std::size_t p = table.partner(s);
        out[s] = Complex(x[p], x[s]) / kSqrt2;
        break;
      }
    }
  }
}

TemperatureField from_real_coordinates(const ModeTable& table, std::span<const double> x) {
  TemperatureField t(table.shape());
  from_real_coordinates(table, x, t);
  return t;
}

void scale_real_modes(const ModeTable& table, std::span<const double> d, TemperatureField& t) {
  const std::size_t n = table.size();
  for (std::size_t s = 0; s < n; ++s) {
    const int hp = table.half_plane(s);
    if (hp == 0) {
      t[s] *= d[s];
    } else if (hp == 1) {
      const std::size_t p = table.partner(s);
      t[s] = Complex(t[s].real() * d[s], t[s].imag() * d[p]);
      t[p] = std::conj(t[s]);
    }
  }
}

TemperatureField project_low(const ModeTable& table, const TemperatureField& t,
                             std::size_t n_keep) {
  if (n_keep > table.size())
    throw InvalidArgument("project_low: N=" + std::to_string(n_keep) + " exceeds " +
                          std::to_string(table.size()) + " modes");
  std::vector<double> x = real_coordinates(table, t);
  for (std::size_t s = 0; s < x.size(); ++s)
    if (table.rank_of(s) >= n_keep) x[s] = 0.0;
  return from_real_coordinates(table, x);
}

CouplingMatrices coupling_matrices(const VerticalBasisT& bt, const VerticalBasisV& bv,
                                   const VerticalBasisW& bw, const VerticalQuadrature& quad) {
  const int nzmax = std::max(bt.size(), bv.size());
  if (bw.size() != bv.size())
    throw InvalidArgument("coupling_matrices: W and V bases must have the same size");
  if (static_cast<int>(quad.size()) < quadrature_floor(nzmax))
    throw InvalidArgument("coupling_matrices: quadrature of size " + std::to_string(quad.size()) +
                          " does not resolve the bases");

  CouplingMatrices cm;
  cm.nz_t = bt.size();
  cm.nz_v = bv.size();
  cm.nq = static_cast<int>(quad.size());
  cm.nodes = quad.nodes;
  cm.weights = quad.weights;

  const auto fill = [&](std::vector<double>& dst, int nz, auto&& f) {
    dst.resize(static_cast<std::size_t>(cm.nq) * nz);
    for (int q = 0; q < cm.nq; ++q)
      for (int m = 0; m < nz; ++m) dst[static_cast<std::size_t>(q) * nz + m] = f(m, quad.nodes[q]);
  };
  fill(cm.phi, cm.nz_t, [&](int m, double z) { return bt.value(m, z); });
  fill(cm.dphi, cm.nz_t, [&](int m, double z) { return bt.derivative(m, z); });
  fill(cm.psi, cm.nz_v, [&](int m, double z) { return bv.value(m, z); });
  fill(cm.chi, cm.nz_v, [&](int m, double z) { return bw.value(m, z); });

  // The antiderivative is exact in closed form; the projection onto psi is
  // by quadrature so it matches what the grid transforms see.
  cm.c_int.resize(static_cast<std::size_t>(cm.nz_v) * cm.nz_t);
  for (int mv = 0; mv < cm.nz_v; ++mv)
    for (int mt = 0; mt < cm.nz_t; ++mt)
      cm.c_int[static_cast<std::size_t>(mv) * cm.nz_t + mt] =
          quad.integrate([&](double z) { return bt.antiderivative(mt, z) * bv.value(mv, z); });

  cm.c_ps.resize(cm.nz_t);
  for (int mt = 0; mt < cm.nz_t; ++mt)
    cm.c_ps[mt] = quad.integrate([&](double z) { return z * bt.value(mt, z); });

  cm.d_w.resize(cm.nz_v);
  for (int m = 0; m < cm.nz_v; ++m) cm.d_w[m] = 1.0 / bv.wavenumber(m);
  return cm;
}

}  // namespace pgv
