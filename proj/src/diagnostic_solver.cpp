#include "pgv/diagnostic_solver.hpp"

#include <algorithm>
#include <cmath>

namespace pgv {

namespace {
const Complex kI(0.0, 1.0);

// int_{-1}^z T projected on psi_mv, for one horizontal column.
Complex column_forcing(const CouplingMatrices& cm, const Complex* t_col, int mv) {
  Complex s{};
  for (int mt = 0; mt < cm.nz_t; ++mt) s += cm.int_tv(mv, mt) * t_col[mt];
  return s;
}
}  // namespace

SurfacePressure surface_pressure(const Model& model, const TemperatureField& t) {
  const ModeShape& ts = model.modes().shape();
  const CouplingMatrices& cm = model.coupling();
  SurfacePressure p(ModeShape{ts.kx_max, ts.ky_max, 1});
  for (int kx = -ts.kx_max; kx <= ts.kx_max; ++kx)
    for (int ky = -ts.ky_max; ky <= ts.ky_max; ++ky) {
      if (kx == 0 && ky == 0) continue;
      Complex s{};
      for (int m = 0; m < ts.nz; ++m) s += cm.c_ps[m] * t[ts.slot(kx, ky, m)];
      p[p.shape().slot(kx, ky, 0)] = -s;
    }
  return p;
}

void solve_velocity(const Model& model, const TemperatureField& t, double f, VelocityField& out) {
  const ModeTable& vm = model.velocity_modes();
  const ModeShape& ts = model.modes().shape();
  const ModeShape& vs = vm.shape();
  const CouplingMatrices& cm = model.coupling();
  if (out.shape() != vs) out = VelocityField(vs);
  for (int kx = -vs.kx_max; kx <= vs.kx_max; ++kx)
    for (int ky = -vs.ky_max; ky <= vs.ky_max; ++ky) {
      const Complex* tcol = t.data() + ts.slot(kx, ky, 0);
      const double ax = vm.kappa_x(kx), ay = vm.kappa_y(ky);
      for (int mv = 0; mv < vs.nz; ++mv) {
        const std::size_t s = vs.slot(kx, ky, mv);
        if (kx == 0 && ky == 0) {
          out.v1[s] = out.v2[s] = Complex{};
          continue;
        }
        const Complex g = column_forcing(cm, tcol, mv);
        const Complex r1 = kI * ax * g;
        const Complex r2 = kI * ay * g;
        const double lam = vm.lambda(s);
        const double det = lam * lam + f * f;
        out.v1[s] = (lam * r1 + f * r2) / det;
        out.v2[s] = (lam * r2 - f * r1) / det;
      }
    }
}

void vertical_velocity(const Model& model, const VelocityField& v, WField& out) {
  const ModeTable& vm = model.velocity_modes();
  const ModeShape& vs = vm.shape();
  const CouplingMatrices& cm = model.coupling();
  if (out.shape() != vs) out = WField(vs);
  for (std::size_t s = 0; s < vs.size(); ++s) {
    const double ax = vm.kappa_x(vs.kx_of(s)), ay = vm.kappa_y(vs.ky_of(s));
    const Complex div = kI * (ax * v.v1[s] + ay * v.v2[s]);
    out[s] = -div * cm.d_w[vs.m_of(s)];
  }
}

WField vertical_velocity(const Model& model, const VelocityField& v) {
  WField w(model.velocity_modes().shape());
  vertical_velocity(model, v, w);
  return w;
}

double momentum_residual(const Model& model, const TemperatureField& t, const SurfacePressure& p_s,
                         const VelocityField& v, double f) {
  const ModeTable& vm = model.velocity_modes();
  const ModeShape& ts = model.modes().shape();
  const ModeShape& vs = vm.shape();
  const CouplingMatrices& cm = model.coupling();
  double worst = 0.0, scale = 0.0;
  for (int kx = -vs.kx_max; kx <= vs.kx_max; ++kx)
    for (int ky = -vs.ky_max; ky <= vs.ky_max; ++ky) {
      const Complex* tcol = t.data() + ts.slot(kx, ky, 0);
      const double ax = vm.kappa_x(kx), ay = vm.kappa_y(ky);
      // Constant mode: grad p_s - grad <int_{-1}^z T, 1>, with
      // <int_{-1}^z T, 1> = -int z T dz; the barotropic velocity is zero.
      Complex mean_int{};
      for (int mt = 0; mt < cm.nz_t; ++mt) mean_int -= cm.c_ps[mt] * tcol[mt];
      const Complex ps = p_s[p_s.shape().slot(kx, ky, 0)];
      const Complex g0 = ps - mean_int;
      worst = std::max(worst, std::hypot(std::abs(ax * g0), std::abs(ay * g0)));
      scale = std::max(scale, std::hypot(std::abs(ax * mean_int), std::abs(ay * mean_int)));
      for (int mv = 0; mv < vs.nz; ++mv) {
        const std::size_t s = vs.slot(kx, ky, mv);
        const Complex g = column_forcing(cm, tcol, mv);
        const double lam = vm.lambda(s);
        const Complex e1 = lam * v.v1[s] - f * v.v2[s] - kI * ax * g;
        const Complex e2 = lam * v.v2[s] + f * v.v1[s] - kI * ay * g;
        worst = std::max(worst, std::hypot(std::abs(e1), std::abs(e2)));
        scale = std::max(scale, std::hypot(std::abs(ax * g), std::abs(ay * g)));
      }
    }
  return scale > 0.0 ? worst / scale : worst;
}

DiagnosticState velocity_from_temperature(const Model& model, const TemperatureField& t,
                                          double f) {
  DiagnosticState d;
  d.p_s = surface_pressure(model, t);
  solve_velocity(model, t, f, d.v);
  vertical_velocity(model, d.v, d.w);
  d.residual = momentum_residual(model, t, d.p_s, d.v, f);
  return d;
}

}  // namespace pgv
