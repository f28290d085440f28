#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "pgv/diagnostic_solver.hpp"
#include "pgv/errors.hpp"
#include "pgv/integrator.hpp"
#include "pgv/stochastic_forcing.hpp"
#include "pgv/validation.hpp"
#include "test_util.hpp"

using namespace pgv;

namespace {

NoiseConfig silent_noise(double dt_w = 1e-3) {
  NoiseConfig c;
  c.sigma = 0.0;
  c.dt_w = dt_w;
  return c;
}

TemperatureField random_field(const Model& model, std::uint64_t seed, double scale = 1.0,
                              double power = 0.5) {
  NormalStream rng(seed, Stream::Sampling);
  TemperatureField t = random_smooth_field(model.modes(), rng, power);
  t *= scale;
  return t;
}

TemperatureField uniform_mode(const Model& model, double value) {
  TemperatureField t = model.zero_temperature();
  t[model.modes().shape().slot(0, 0, 0)] = value;
  return t;
}

// B projected on the retained modes, by direct summation over wavevector
// pairs with triple vertical integrals from an independent quadrature.
TemperatureField convolution_oracle(const Model& model, const TemperatureField& t,
                                    const DiagnosticState& d) {
  const ModeTable& tab = model.modes();
  const ModeShape& ts = tab.shape();
  const ModeShape& vs = model.velocity_modes().shape();
  const int nt = ts.nz, nv = vs.nz;
  const VerticalBasisT& bt = model.basis_t();
  std::vector<double> i_adv(static_cast<std::size_t>(nv * nt * nt));
  std::vector<double> i_w(i_adv.size());
  for (int a = 0; a < nv; ++a)
    for (int b = 0; b < nt; ++b)
      for (int m = 0; m < nt; ++m) {
        const std::size_t k = (static_cast<std::size_t>(a) * nt + b) * nt + m;
        i_adv[k] = test::composite_gauss(
            [&](double z) { return model.basis_v().value(a, z) * bt.value(b, z) * bt.value(m, z); },
            -1, 0, 128);
        i_w[k] = test::composite_gauss(
            [&](double z) {
              return model.basis_w().value(a, z) * bt.derivative(b, z) * bt.value(m, z);
            },
            -1, 0, 128);
      }
  const double inv_sqrt_area = 1.0 / std::sqrt(tab.lx() * tab.ly());
  TemperatureField out = model.zero_temperature();
  for (int px = -vs.kx_max; px <= vs.kx_max; ++px)
    for (int py = -vs.ky_max; py <= vs.ky_max; ++py)
      for (int qx = -ts.kx_max; qx <= ts.kx_max; ++qx)
        for (int qy = -ts.ky_max; qy <= ts.ky_max; ++qy) {
          const int kx = px + qx, ky = py + qy;
          if (std::abs(kx) > ts.kx_max || std::abs(ky) > ts.ky_max) continue;
          const Complex ix(0, tab.kappa_x(qx)), iy(0, tab.kappa_y(qy));
          for (int a = 0; a < nv; ++a) {
            const Complex adv = d.v.v1[vs.slot(px, py, a)] * ix + d.v.v2[vs.slot(px, py, a)] * iy;
            const Complex wa = d.w[vs.slot(px, py, a)];
            for (int b = 0; b < nt; ++b) {
              const Complex tb = t[ts.slot(qx, qy, b)];
              for (int m = 0; m < nt; ++m) {
                const std::size_t k = (static_cast<std::size_t>(a) * nt + b) * nt + m;
                out[ts.slot(kx, ky, m)] += inv_sqrt_area * tb * (adv * i_adv[k] + wa * i_w[k]);
              }
            }
          }
        }
  return out;
}

}  // namespace

TEST(NonlinearTerm, MatchesCoefficientSpaceConvolution) {
  const Model model(test::small_config(8, 4));
  const TemperatureField t = random_field(model, 31);
  const DiagnosticState d = velocity_from_temperature(model, t);
  const TemperatureField b = nonlinear_term(model, t, d);
  const TemperatureField o = convolution_oracle(model, t, d);
  double worst = 0.0, scale = 0.0;
  for (std::size_t s = 0; s < b.size(); ++s) {
    worst = std::max(worst, std::abs(b[s] - o[s]));
    scale = std::max(scale, std::abs(o[s]));
  }
  EXPECT_GT(scale, 1e-3);
  EXPECT_LT(worst, 1e-11 * scale);
}

TEST(NonlinearTerm, IsSkewInTheAdvectedField) {
  const Model model(test::small_config(8, 4));
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const TemperatureField t = random_field(model, seed);
    const TemperatureField s = random_field(model, seed + 100);
    const DiagnosticState d = velocity_from_temperature(model, t);
    Workspace ws(model);
    TemperatureField bs = model.zero_temperature(), bt = model.zero_temperature();
    nonlinear_term(model, d.v, d.w, s, bs, ws);
    nonlinear_term(model, d.v, d.w, t, bt, ws);
    const double scale = norm_h(bs) * norm_h(s);
    EXPECT_LT(std::abs(inner_h(bs, s)), 1e-10 * scale);
    EXPECT_LT(std::abs(inner_h(bs, t) + inner_h(bt, s)), 1e-10 * scale);
  }
}

TEST(NonlinearTerm, VanishesForZeroVelocity) {
  const Model model(test::small_config(8, 4));
  const TemperatureField t = random_field(model, 3);
  Workspace ws(model);
  TemperatureField out = model.zero_temperature();
  nonlinear_term(model, model.zero_velocity(), model.zero_w(), t, out, ws);
  EXPECT_EQ(norm_h(out), 0.0);
}

TEST(Phi1, MatchesClosedFormAndLimit) {
  EXPECT_DOUBLE_EQ(phi1(0.0), 1.0);
  EXPECT_NEAR(phi1(1e-9), 1.0 - 0.5e-9, 1e-16);
  for (double x : {1e-3, 0.5, 3.0, 40.0}) EXPECT_NEAR(phi1(x), -std::expm1(-x) / x, 1e-15);
}

TEST(Trajectory, LinearHeatStepIsExactForBothSchemes) {
  const Model model(test::small_config(8, 4));
  const NoiseOperator noise(model.modes(), silent_noise());
  const double lam = model.modes().lambda1();
  for (Scheme scheme : {Scheme::ImexH, Scheme::ExpEulerDirect}) {
    IntegratorConfig cfg;
    cfg.scheme = scheme;
    cfg.dt = 1e-3;
    Trajectory traj(model, noise, cfg, WienerPath(1, 1e-3), uniform_mode(model, 2.0));
    traj.advance(10);
    const double expect = scheme == Scheme::ImexH ? 2.0 * std::pow(1.0 + lam * 1e-3, -10)
                                                  : 2.0 * std::exp(-lam * 1e-2);
    EXPECT_NEAR(traj.temperature()[model.modes().shape().slot(0, 0, 0)].real(), expect, 1e-14);
    EXPECT_NEAR(traj.time(), 1e-2, 1e-15);
  }
}

TEST(Trajectory, EnergyIdentityDriftIsFirstOrder) {
  const Model model(test::small_config(8, 4));
  const TemperatureField t0 = random_field(model, 4, 2.0, 1.0);
  IntegratorConfig cfg;
  cfg.dt = 2e-3;
  const double d1 = energy_identity_drift(model, cfg, t0, 1.0);
  cfg.dt = 1e-3;
  const double d2 = energy_identity_drift(model, cfg, t0, 1.0);
  EXPECT_LT(d2, 5.0 * cfg.dt);
  EXPECT_GT(d1 / d2, 1.6);
  EXPECT_LT(d1 / d2, 2.4);
}

TEST(Trajectory, SelfConvergenceIsFirstOrder) {
  const Model model(test::small_config(8, 4));
  const TemperatureField t0 = random_field(model, 5, 3.0);
  std::vector<TemperatureField> finals;
  for (double dt : {4e-3, 2e-3, 1e-3}) {
    const NoiseOperator noise(model.modes(), silent_noise(dt));
    IntegratorConfig cfg;
    cfg.dt = dt;
    Trajectory traj(model, noise, cfg, WienerPath(1, dt), t0);
    traj.advance(static_cast<int>(std::lround(0.4 / dt)));
    finals.push_back(traj.temperature());
  }
  const double e1 = norm_h(finals[0] - finals[1]);
  const double e2 = norm_h(finals[1] - finals[2]);
  EXPECT_GE(std::log2(e1 / e2), 0.9);
}

TEST(Trajectory, SchemesAgreeToFirstOrderWithNoise) {
  const Model model(test::small_config(8, 4));
  const TemperatureField t0 = random_field(model, 6, 2.0);
  std::vector<double> gaps;
  for (double dt : {2e-3, 1e-3}) {
    NoiseConfig nc;
    nc.dt_w = 1e-3;
    const NoiseOperator noise(model.modes(), nc);
    IntegratorConfig a, b;
    a.dt = b.dt = dt;
    b.scheme = Scheme::ExpEulerDirect;
    Trajectory ta(model, noise, a, WienerPath(8, nc.dt_w), t0);
    Trajectory tb(model, noise, b, WienerPath(8, nc.dt_w), t0);
    const int steps = static_cast<int>(std::lround(1.0 / dt));
    ta.advance(steps);
    tb.advance(steps);
    gaps.push_back(norm_h(ta.temperature() - tb.temperature()));
  }
  EXPECT_GT(gaps[0] / gaps[1], 1.6);
  EXPECT_LT(gaps[1], 1e-2 * norm_h(t0));
}

TEST(Trajectory, StartingLaterEqualsShiftedPath) {
  const Model model(test::small_config(8, 4));
  const NoiseOperator noise(model.modes(), NoiseConfig{});
  const TemperatureField t0 = random_field(model, 7);
  IntegratorConfig cfg;
  const WienerPath path(9, 1e-3);
  Trajectory late(model, noise, cfg, path, t0, 300);
  Trajectory shifted(model, noise, cfg, wiener_shift(path, 0.3), t0, 0);
  late.advance(50);
  shifted.advance(50);
  EXPECT_EQ(late.temperature(), shifted.temperature());
}

TEST(Trajectory, RunsAreBitwiseReproducible) {
  const Model model(test::small_config(8, 4));
  const NoiseOperator noise(model.modes(), NoiseConfig{});
  const TemperatureField t0 = random_field(model, 8);
  IntegratorConfig cfg;
  Trajectory a(model, noise, cfg, WienerPath(4, 1e-3), t0);
  Trajectory b(model, noise, cfg, WienerPath(4, 1e-3), t0);
  a.advance(40);
  b.advance(40);
  EXPECT_EQ(a.temperature(), b.temperature());
}

TEST(Trajectory, DistinctInitialDataStayDistinct) {
  const Model model(test::small_config(8, 4));
  const NoiseOperator noise(model.modes(), NoiseConfig{});
  const TemperatureField t0 = random_field(model, 9);
  TemperatureField t1 = t0;
  t1.axpy(1e-3, random_field(model, 10));
  IntegratorConfig cfg;
  Trajectory a(model, noise, cfg, WienerPath(4, 1e-3), t0);
  Trajectory b(model, noise, cfg, WienerPath(4, 1e-3), t1);
  for (int k = 0; k < 20; ++k) {
    a.advance(50);
    b.advance(50);
    EXPECT_GT(norm_h(a.temperature() - b.temperature()), 0.0);
  }
}

TEST(Trajectory, BlowUpIsReportedWithNorms) {
  const Model model(test::small_config(8, 4));
  const NoiseOperator noise(model.modes(), silent_noise());
  IntegratorConfig cfg;
  try {
    Trajectory t(model, noise, cfg, WienerPath(1, 1e-3), uniform_mode(model, 2e8));
    FAIL() << "expected BlowUp";
  } catch (const BlowUp& e) {
    EXPECT_NEAR(e.norm_h(), 2e8, 1.0);
    EXPECT_EQ(e.time(), 0.0);
  }
  // Explicit advection far beyond its stability limit.
  const NoiseOperator loud(model.modes(), silent_noise(0.5));
  cfg.dt = 0.5;
  Trajectory wild(model, loud, cfg, WienerPath(1, 0.5), random_field(model, 11, 1e4, 0.0));
  EXPECT_THROW(wild.advance(2000), BlowUp);
}

TEST(CoupledTrajectory, IdenticalStartsNeverSeparate) {
  const Model model(test::small_config(8, 4));
  NoiseConfig nc;
  nc.n_active = 0;
  const NoiseOperator noise(model.modes(), nc);
  IntegratorConfig cfg;
  cfg.coupling_gain = 50.0;
  cfg.coupling_modes = 10;
  const TemperatureField t0 = random_field(model, 12);
  CoupledTrajectory c(model, noise, cfg, WienerPath(2, 1e-3), t0, t0);
  c.advance(100);
  EXPECT_EQ(norm_h(c.difference()), 0.0);
  EXPECT_EQ(c.control_cost(), 0.0);
}

TEST(CoupledTrajectory, WithoutControlTracksAnIndependentCopy) {
  const Model model(test::small_config(8, 4));
  const NoiseOperator noise(model.modes(), NoiseConfig{});
  IntegratorConfig cfg;
  const TemperatureField t0 = random_field(model, 13);
  const TemperatureField u0 = random_field(model, 14);
  for (Scheme scheme : {Scheme::ImexH, Scheme::ExpEulerDirect}) {
    cfg.scheme = scheme;
    CoupledTrajectory c(model, noise, cfg, WienerPath(2, 1e-3), t0, u0);
    Trajectory other(model, noise, cfg, WienerPath(2, 1e-3), u0);
    c.advance(200);
    other.advance(200);
    EXPECT_LT(norm_h(c.tilde() - other.temperature()), 1e-11 * norm_h(u0));
    EXPECT_EQ(c.control_cost(), 0.0);
  }
}

TEST(CoupledTrajectory, ControlledLowModeDecaysAtLambdaPlusGain) {
  const Model model(test::small_config(8, 4));
  NoiseConfig nc;
  nc.sigma = 1e-100;  // non-degenerate but negligible forcing
  const NoiseOperator noise(model.modes(), nc);
  IntegratorConfig cfg;
  cfg.coupling_gain = 20.0;
  cfg.coupling_modes = 1;
  const double dt = cfg.dt, lam = model.modes().lambda1();
  const std::size_t s0 = model.modes().slot_at(0);
  CoupledTrajectory c(model, noise, cfg, WienerPath(2, 1e-3), model.zero_temperature(),
                      uniform_mode(model, 1.0));
  double cost = 0.0, r = 1.0;
  const double g = noise.amplitude(s0);
  for (int k = 0; k < 5; ++k) {
    cost += dt * cfg.coupling_gain * cfg.coupling_gain * (r / g) * (r / g);
    r /= 1.0 + (lam + cfg.coupling_gain) * dt;
  }
  c.advance(5);
  EXPECT_NEAR(c.difference()[s0].real(), r, 1e-14);
  EXPECT_NEAR(c.control_cost(), cost, 1e-12 * cost);
}

TEST(Tangent, IsLinearAndMatchesFiniteDifferences) {
  const Model model(test::small_config(8, 4));
  const NoiseOperator noise(model.modes(), NoiseConfig{});
  IntegratorConfig cfg;
  const Trajectory start(model, noise, cfg, WienerPath(3, 1e-3), random_field(model, 15, 2.0));
  const TemperatureField chi = random_field(model, 16);
  const auto one = tangent_flow(start, chi, 20).second;
  const auto two = tangent_flow(start, 2.0 * chi, 20).second;
  EXPECT_LT(norm_h(two - 2.0 * one), 1e-13 * norm_h(two));
  EXPECT_EQ(norm_h(tangent_flow(start, model.zero_temperature(), 20).second), 0.0);
  // Central differences: error quarters when eps halves, down to roundoff.
  const double e1 = tangent_fd_error(start, chi, 0.1, 20);
  const double e2 = tangent_fd_error(start, chi, 0.05, 20);
  EXPECT_GT(e1 / e2, 3.8);
  EXPECT_LT(e1 / e2, 4.2);
  EXPECT_LT(tangent_fd_error(start, chi, 1e-3, 20), 1e-10);
}

TEST(Tangent, AroundRestIsTheHeatFlow) {
  const Model model(test::small_config(8, 4));
  const NoiseOperator noise(model.modes(), silent_noise());
  IntegratorConfig cfg;
  const Trajectory start(model, noise, cfg, WienerPath(3, 1e-3), model.zero_temperature());
  const TemperatureField chi = random_field(model, 17);
  const auto out = tangent_flow(start, chi, 10).second;
  for (std::size_t s = 0; s < chi.size(); ++s) {
    const double f = std::pow(1.0 + model.modes().lambda(s) * cfg.dt, -10);
    EXPECT_LT(std::abs(out[s] - f * chi[s]), 1e-15);
  }
}

TEST(Tangent, ReorthonormalizationGivesAnOrthonormalFrame) {
  const Model model(test::small_config(8, 4));
  std::vector<TemperatureField> vs;
  for (int j = 0; j < 4; ++j) vs.push_back(random_field(model, 40 + j));
  TangentSystem sys(model, vs);
  const auto logs = sys.reorthonormalize();
  ASSERT_EQ(logs.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      EXPECT_NEAR(inner_v(model.modes(), sys.vectors()[i], sys.vectors()[j]), i == j ? 1.0 : 0.0,
                  1e-12);
  EXPECT_NEAR(logs[0], std::log(norm_v(model.modes(), vs[0])), 1e-12);
}
