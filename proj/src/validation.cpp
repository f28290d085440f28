#include "pgv/validation.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <limits>
#include <cmath>

#include "pgv/diagnostic_solver.hpp"
#include "pgv/errors.hpp"
#include "pgv/experiments.hpp"
#include "pgv/statistics.hpp"

namespace pgv {

namespace {
const Complex kI(0.0, 1.0);
}

TemperatureField random_smooth_field(const ModeTable& table, NormalStream& rng, double power) {
  std::vector<double> x(table.size());
  for (std::size_t r = 0; r < table.size(); ++r) {
    const std::size_t s = table.slot_at(r);
    x[s] = rng() * std::pow(table.lambda(s), -power);
  }
  return from_real_coordinates(table, x);
}

double robin_root_residual(const Model& model) {
  double worst = 0.0;
  for (double mu : model.basis_t().roots())
    worst = std::max(worst, std::abs(mu * std::tan(mu) - model.robin_alpha()));
  return worst;
}

double gram_defect(const Model& model, int nz_quad) {
  const VerticalBasisT& bt = model.basis_t();
  const VerticalBasisV& bv = model.basis_v();
  const VerticalBasisW& bw = model.basis_w();
  const VerticalQuadrature q = vertical_quadrature(nz_quad, std::max(bt.size(), bv.size()));
  double worst = 0.0;
  const auto gram = [&](int n, auto&& f) {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const double g = q.integrate([&](double z) { return f(a, z) * f(b, z); });
        worst = std::max(worst, std::abs(g - (a == b ? 1.0 : 0.0)));
      }
  };
  gram(bt.size(), [&](int m, double z) { return bt.value(m, z); });
  gram(bv.size(), [&](int m, double z) { return bv.value(m, z); });
  gram(bw.size(), [&](int m, double z) { return bw.value(m, z); });
  return worst;
}

DiagnosticChecks diagnostic_checks(const Model& model, double f, std::uint64_t seed,
                                   int samples) {
  const ModeTable& table = model.modes();
  const ModeTable& vm = model.velocity_modes();
  const ModeShape& vs = vm.shape();
  const CouplingMatrices& cm = model.coupling();
  NormalStream rng(seed, Stream::Sampling);
  DiagnosticChecks out;
  for (int k = 0; k < samples; ++k) {
    const TemperatureField t1 = random_smooth_field(table, rng);
    const TemperatureField t2 = random_smooth_field(table, rng);
    const DiagnosticState d = velocity_from_temperature(model, t1, f);
    out.residual = std::max(out.residual, d.residual);

    // Vertical mean of v per horizontal mode, by quadrature.
    for (int kx = -vs.kx_max; kx <= vs.kx_max; ++kx)
      for (int ky = -vs.ky_max; ky <= vs.ky_max; ++ky) {
        Complex m1{}, m2{};
        for (int q = 0; q < cm.nq; ++q) {
          Complex a{}, b{};
          for (int m = 0; m < vs.nz; ++m) {
            const double psi = cm.psi[static_cast<std::size_t>(q) * cm.nz_v + m];
            a += psi * d.v.v1[vs.slot(kx, ky, m)];
            b += psi * d.v.v2[vs.slot(kx, ky, m)];
          }
          m1 += cm.weights[q] * a;
          m2 += cm.weights[q] * b;
        }
        out.barotropic = std::max(out.barotropic, std::hypot(std::abs(m1), std::abs(m2)));
      }

    // dw/dz = (m pi) w_m psi_m on the cosine basis.
    double worst = 0.0, scale = 0.0;
    for (std::size_t s = 0; s < vs.size(); ++s) {
      const double ax = vm.kappa_x(vs.kx_of(s)), ay = vm.kappa_y(vs.ky_of(s));
      const Complex div = kI * (ax * d.v.v1[s] + ay * d.v.v2[s]);
      const double kz = model.basis_w().wavenumber(vs.m_of(s));
      worst = std::max(worst, std::abs(kz * d.w[s] + div));
      scale = std::max(scale, std::abs(div));
    }
    out.divergence = std::max(out.divergence, scale > 0.0 ? worst / scale : worst);

    const double a = 0.75, b = -1.25;
    const DiagnosticState d2 = velocity_from_temperature(model, t2, f);
    const DiagnosticState dc = velocity_from_temperature(model, a * t1 + b * t2, f);
    double lw = 0.0, ls = 0.0;
    for (std::size_t s = 0; s < vs.size(); ++s) {
      const Complex e1 = dc.v.v1[s] - (a * d.v.v1[s] + b * d2.v.v1[s]);
      const Complex e2 = dc.v.v2[s] - (a * d.v.v2[s] + b * d2.v.v2[s]);
      lw = std::max(lw, std::hypot(std::abs(e1), std::abs(e2)));
      ls = std::max(ls, std::hypot(std::abs(dc.v.v1[s]), std::abs(dc.v.v2[s])));
    }
    out.linearity = std::max(out.linearity, ls > 0.0 ? lw / ls : lw);
  }
  return out;
}

RegularityReport regularity_ratios(const Model& model, double f, std::uint64_t seed,
                                   int samples) {
  const ModeTable& table = model.modes();
  const ModeTable& vm = model.velocity_modes();
  const ModeShape& ts = table.shape();
  const ModeShape& vs = vm.shape();
  const CouplingMatrices& cm = model.coupling();
  RegularityReport rep;
  rep.samples = samples;

  NormalStream rng(seed, Stream::Sampling);
  VelocityField v = model.zero_velocity();
  for (int k = 0; k < samples; ++k) {
    const TemperatureField t = random_smooth_field(table, rng);
    solve_velocity(model, t, f, v);
    rep.h1_ratio = std::max(rep.h1_ratio, norm_h1(vm, v) / norm_h(t));
    rep.h2_ratio = std::max(rep.h2_ratio, norm_h2(vm, v) / norm_v(table, t));
  }

  // T(kappa, .) -> v(kappa, .) is block diagonal in kappa.
  const int nt = ts.nz, nv = vs.nz;
  Eigen::MatrixXcd m1(2 * nv, nt), m2(2 * nv, nt);
  for (int kx = -vs.kx_max; kx <= vs.kx_max; ++kx)
    for (int ky = -vs.ky_max; ky <= vs.ky_max; ++ky) {
      if (kx == 0 && ky == 0) continue;
      const double ax = vm.kappa_x(kx), ay = vm.kappa_y(ky);
      for (int mv = 0; mv < nv; ++mv) {
        const double lam = vm.lambda(vs.slot(kx, ky, mv));
        const double det = lam * lam + f * f;
        const Complex c1 = kI * (lam * ax + f * ay) / det;
        const Complex c2 = kI * (lam * ay - f * ax) / det;
        for (int mt = 0; mt < nt; ++mt) {
          const double c = cm.int_tv(mv, mt);
          const double wt = 1.0 / std::sqrt(table.lambda(ts.slot(kx, ky, mt)));
          m1(mv, mt) = std::sqrt(lam) * c1 * c;
          m1(nv + mv, mt) = std::sqrt(lam) * c2 * c;
          m2(mv, mt) = lam * c1 * c * wt;
          m2(nv + mv, mt) = lam * c2 * c * wt;
        }
      }
      rep.h1_operator = std::max(rep.h1_operator,
                                 Eigen::JacobiSVD<Eigen::MatrixXcd>(m1).singularValues()(0));
      rep.h2_operator = std::max(rep.h2_operator,
                                 Eigen::JacobiSVD<Eigen::MatrixXcd>(m2).singularValues()(0));
    }
  return rep;
}

double skew_symmetry_defect(const Model& model, double f, std::uint64_t seed, int samples) {
  const ModeTable& table = model.modes();
  NormalStream rng(seed, Stream::Sampling);
  Workspace ws(model);
  TemperatureField b = model.zero_temperature();
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const TemperatureField t = random_smooth_field(table, rng, 0.5);
    const TemperatureField other = random_smooth_field(table, rng, 0.5);
    for (const TemperatureField* src : {&t, &other}) {
      const DiagnosticState d = velocity_from_temperature(model, *src, f);
      nonlinear_term(model, d.v, d.w, t, b, ws);
      const double nb = norm_h(b), nt = norm_h(t);
      if (nb > 0.0) worst = std::max(worst, std::abs(inner_h(b, t)) / (nb * nt));
    }
  }
  return worst;
}

double energy_identity_drift(const Model& model, const IntegratorConfig& integrator,
                             const TemperatureField& t0, double horizon) {
  const ModeTable& table = model.modes();
  NoiseConfig quiet;
  quiet.sigma = 0.0;
  quiet.dt_w = integrator.dt;
  const NoiseOperator silent(table, quiet);
  Trajectory traj(model, silent, integrator, WienerPath(0, quiet.dt_w), t0);
  const double n0 = norm_h(t0);
  const double e0 = n0 * n0;
  const int steps = static_cast<int>(std::lround(horizon / integrator.dt));
  double v2_prev = norm_v2(table, t0), dissipation = 0.0;
  for (int k = 0; k < steps; ++k) {
    traj.step();
    const double v2 = norm_v2(table, traj.temperature());
    dissipation += 0.5 * integrator.dt * (v2_prev + v2);
    v2_prev = v2;
  }
  const double nt = norm_h(traj.temperature());
  return std::abs(nt * nt + 2.0 * dissipation - e0) / e0;
}

double tangent_fd_error(const Trajectory& start, const TemperatureField& chi, double eps,
                        int steps) {
  const auto shifted = [&](double sign) {
    TemperatureField t = start.temperature();
    t.axpy(sign * eps, chi);
    std::optional<TemperatureField> z;
    if (start.config().scheme == Scheme::ImexH) z = start.z();
    Trajectory traj(start.model(), start.noise(), start.config(), start.path(), t,
                    start.index(), z);
    traj.advance(steps);
    return traj.temperature();
  };
  const TemperatureField plus = shifted(1.0), minus = shifted(-1.0);
  const TemperatureField lin = tangent_flow(start, chi, steps).second;
  TemperatureField fd = plus - minus;
  fd *= 1.0 / (2.0 * eps);
  return norm_h(fd - lin) / norm_h(lin);
}

OuCheck ou_stationary_check(const NoiseOperator& noise, double ou_alpha, std::uint64_t seed,
                            int samples) {
  const ModeTable& table = noise.table();
  NormalStream rng(seed, Stream::Stationary);
  std::vector<double> az2(static_cast<std::size_t>(samples));
  for (auto& v : az2) {
    const OUState z = stationary_ou_sample(rng, noise, ou_alpha);
    double s = 0.0;
    for (std::size_t slot = 0; slot < z.z.size(); ++slot)
      s += table.lambda(slot) * table.lambda(slot) * std::norm(z.z[slot]);
    v = s;
  }
  const MeanEstimate e = mean_estimate(az2);
  OuCheck c;
  c.ou_alpha = ou_alpha;
  c.empirical = e.mean;
  c.se = e.se;
  c.exact = stationary_az2(noise, ou_alpha);
  c.z_score = e.se > 0.0 ? std::abs(e.mean - c.exact) / e.se : std::abs(e.mean - c.exact);
  return c;
}

ValidationReport run_validation(const Model& model, const NoiseOperator& noise,
                                const IntegratorConfig& integrator, std::uint64_t seed) {
  ValidationReport rep;
  const double f = integrator.f;
  auto add = [&](std::string name, double value, double tol) {
    rep.checks.push_back({std::move(name), value, tol, std::isfinite(value) && value <= tol});
  };
  add("robin_root_residual", robin_root_residual(model), 1e-12);
  add("gram_defect", gram_defect(model, static_cast<int>(model.quadrature().size())), 1e-10);
  const DiagnosticChecks d = diagnostic_checks(model, f, seed, 10);
  add("momentum_residual", d.residual, 1e-11);
  add("barotropic_mean", d.barotropic, 1e-14);
  add("divergence_identity", d.divergence, 1e-12);
  add("diagnostic_linearity", d.linearity, 1e-12);
  add("skew_symmetry", skew_symmetry_defect(model, f, seed, 20), 1e-10);

  double b0 = 0.0;
  for (double g : noise.amplitudes()) b0 += g * g;
  add("hilbert_schmidt_b0", std::abs(b0 - noise.b0()) / std::max(b0, 1e-300), 1e-14);

  double previous = std::numeric_limits<double>::infinity();
  bool decreasing = true;
  for (double alpha : {0.0, 10.0, 100.0}) {
    const OuCheck c = ou_stationary_check(noise, alpha, seed, 20000);
    add("ou_stationary_z_alpha_" + std::to_string(static_cast<int>(alpha)), c.z_score, 4.0);
    decreasing = decreasing && c.empirical < previous;
    previous = c.empirical;
  }
  add("ou_decreasing_in_alpha", decreasing ? 0.0 : 1.0, 0.0);

  NormalStream rng(seed, Stream::Initial);
  const TemperatureField t0 = sphere_sample(model.modes(), rng, 8, 1.0);
  add("energy_identity_drift_over_dt", energy_identity_drift(model, integrator, t0, 1.0) /
                                           integrator.dt, 5.0);

  rep.regularity = regularity_ratios(model, f, seed, 100);
  add("regularity_h1_ratio_finite", std::isfinite(rep.regularity.h1_ratio) ? 0.0 : 1.0, 0.0);
  rep.pass = std::all_of(rep.checks.begin(), rep.checks.end(), [](const Check& c) { return c.pass; });
  return rep;
}

}  // namespace pgv
