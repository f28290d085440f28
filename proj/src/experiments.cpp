#include "pgv/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pgv/diagnostic_solver.hpp"
#include "pgv/errors.hpp"
#include "pgv/log.hpp"
#include "pgv/parallel.hpp"
#include "pgv/statistics.hpp"

namespace pgv {

int steps_for(double t, double dt, const char* what) {
  const double ratio = t / dt;
  const double n = std::round(ratio);
  if (!std::isfinite(ratio) || n < 0.0 ||
      std::abs(ratio - n) > 1e-9 * std::max(1.0, std::abs(ratio)))
    throw InvalidArgument(std::string(what) + "=" + std::to_string(t) +
                          " is not a whole number of steps of dt=" + std::to_string(dt));
  return static_cast<int>(n);
}

TemperatureField sphere_sample(const ModeTable& table, NormalStream& rng, std::size_t modes,
                               double radius, bool v_norm) {
  if (modes == 0 || modes > table.size())
    throw InvalidArgument("sphere_sample: mode count out of range");
  std::vector<double> x(table.size(), 0.0);
  double n2 = 0.0;
  for (std::size_t r = 0; r < modes; ++r) {
    const std::size_t s = table.slot_at(r);
    x[s] = rng();
    n2 += (v_norm ? table.lambda(s) : 1.0) * x[s] * x[s];
  }
  const double scale = n2 > 0.0 ? radius / std::sqrt(n2) : 0.0;
  for (double& v : x) v *= scale;
  return from_real_coordinates(table, x);
}

EnergyLedger::EnergyLedger(double b0, double h2_0, double v2_0)
    : b0_(b0), h2_(h2_0), v2_(v2_0), sup_(h2_0) {}

void EnergyLedger::advance(double dt, double h2, double v2) {
  dissipation_ += 0.5 * dt * (v2_ + v2);
  // Uniform steps are the common case; multiplying keeps t on the grid.
  if (dt == dt_) {
    ++steps_;
  } else {
    t0_ = t_;
    dt_ = dt;
    steps_ = 1;
  }
  t_ = t0_ + std::round(static_cast<double>(steps_) * dt_ * 1e12) / 1e12;
  h2_ = h2;
  v2_ = v2;
  sup_ = std::max(sup_, h2_ + dissipation_ - b0_ * t_);
}

EnergyRow EnergyLedger::row() const {
  return EnergyRow{t_, h2_, v2_, dissipation_, h2_ + dissipation_, sup_};
}

namespace {

// k * dt snapped to 1e-12, so recorded times print as 1.9 and not
// 1.9000000000000001.
double grid_time(long long k, double dt) {
  return std::round(static_cast<double>(k) * dt * 1e12) / 1e12;
}

double h2_of(const TemperatureField& t) {
  const double n = norm_h(t);
  return n * n;
}

// Sorted, de-duplicated step indices at which ensemble data are recorded.
std::vector<int> record_steps(int total, int every, const std::vector<int>& extra) {
  std::vector<int> out;
  for (int k = 0; k <= total; k += std::max(every, 1)) out.push_back(k);
  out.insert(out.end(), extra.begin(), extra.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
  return v[std::min(v.size() - 1, k == 0 ? 0 : k - 1)];
}

}  // namespace

// ---------------------------------------------------------------- simulate

SimulateReport run_simulate(const ExperimentSetup& setup, const SimulateParams& params,
                            const StepObserver& observer) {
  const Model& model = *setup.model;
  const NoiseOperator& noise = *setup.noise;
  const ModeTable& table = model.modes();
  const double dt = setup.integrator.dt;
  const int steps = steps_for(params.horizon, dt, "horizon");
  const int every = std::max(1, steps_for(params.sample_every, dt, "sample_every"));

  TemperatureField t0 = model.zero_temperature();
  if (params.t0_norm > 0.0) {
    NormalStream rng(setup.seed, Stream::Initial);
    t0 = sphere_sample(table, rng, params.t0_modes, params.t0_norm);
  }
  Trajectory traj(model, noise, setup.integrator, WienerPath(setup.seed, noise.config().dt_w),
                  t0);

  SimulateReport rep;
  rep.lambda1 = table.lambda1();
  rep.b0 = noise.b0();
  EnergyLedger ledger(noise.b0(), h2_of(t0), norm_v2(table, t0));
  auto sample = [&] {
    ledger.record();
    const DiagnosticState d = velocity_from_temperature(model, traj.temperature(),
                                                        setup.integrator.f);
    rep.max_residual = std::max(rep.max_residual, d.residual);
  };
  sample();
  if (observer) observer(traj, 0);
  for (int k = 1; k <= steps; ++k) {
    traj.step();
    ledger.advance(dt, h2_of(traj.temperature()), norm_v2(table, traj.temperature()));
    if (k % every == 0) sample();
    if (observer) observer(traj, k);
  }
  rep.rows = ledger.rows();
  return rep;
}

// ---------------------------------------------------------- lyapunov-check

LyapunovCheckReport verify_lyapunov(const ExperimentSetup& setup,
                                    const LyapunovCheckParams& params) {
  const Model& model = *setup.model;
  const NoiseOperator& noise = *setup.noise;
  const ModeTable& table = model.modes();
  const double dt = setup.integrator.dt;
  if (params.members < 2 || params.exponential_members < 2)
    throw InvalidArgument("lyapunov-check needs at least two members");
  const int steps = steps_for(params.horizon, dt, "horizon");
  const int every = std::max(1, steps_for(params.sample_every, dt, "sample_every"));
  std::vector<int> cp_steps;
  for (double c : params.checkpoints) {
    const int k = steps_for(c, dt, "checkpoint");
    if (k > steps) throw InvalidArgument("checkpoint beyond the horizon");
    cp_steps.push_back(k);
  }
  const std::vector<int> rec = record_steps(steps, every, cp_steps);

  LyapunovCheckReport rep;
  rep.lambda1 = table.lambda1();
  rep.b0 = noise.b0();
  rep.c1 = rep.b0 / rep.lambda1;

  TemperatureField t0 = model.zero_temperature();
  if (params.t0_norm > 0.0) {
    NormalStream rng(setup.seed, Stream::Initial);
    t0 = sphere_sample(table, rng, params.t0_modes, params.t0_norm);
  }
  rep.t0_h2 = h2_of(t0);
  const bool exp_applicable = rep.b0 > 0.0;
  rep.gamma = exp_applicable ? params.gamma_scale * rep.lambda1 / (4.0 * rep.b0) : 0.0;

  const auto m = static_cast<std::size_t>(std::max(params.members, params.exponential_members));
  const std::size_t nrec = rec.size();
  std::vector<double> h2(m * nrec), v2(m * nrec), et(m * nrec), sup(m);

  parallel_for(m, setup.jobs, [&](std::size_t i) {
    const std::uint64_t s = derive_seed(setup.seed, i);
    Trajectory traj(model, noise, setup.integrator, WienerPath(s, noise.config().dt_w), t0);
    EnergyLedger ledger(noise.b0(), rep.t0_h2, norm_v2(table, t0));
    std::size_t next = 0;
    for (int k = 0; k <= steps; ++k) {
      if (k > 0) {
        traj.step();
        ledger.advance(dt, h2_of(traj.temperature()), norm_v2(table, traj.temperature()));
      }
      if (next < nrec && rec[next] == k) {
        const EnergyRow r = ledger.row();
        h2[i * nrec + next] = r.h2;
        v2[i * nrec + next] = r.v2;
        et[i * nrec + next] = r.e_t;
        ++next;
      }
    }
    sup[i] = ledger.row().sup_excess;
  });

  const auto bound_at = [&](double t) {
    return std::exp(-2.0 * rep.lambda1 * t) * rep.t0_h2 + rep.c1;
  };
  const auto column = [&](const std::vector<double>& v, std::size_t j, std::size_t count) {
    std::vector<double> c(count);
    for (std::size_t i = 0; i < count; ++i) c[i] = v[i * nrec + j];
    return c;
  };
  const auto ms = static_cast<std::size_t>(params.members);
  for (std::size_t j = 0; j < nrec; ++j) {
    const double t = grid_time(rec[j], dt);
    const MeanEstimate e = mean_estimate(column(h2, j, ms));
    rep.series.push_back({t, e.mean, e.se, bound_at(t), mean_estimate(column(v2, j, ms)).mean,
                          mean_estimate(column(et, j, ms)).mean});
  }
  rep.structure_pass = true;
  for (std::size_t c = 0; c < cp_steps.size(); ++c) {
    const auto j = static_cast<std::size_t>(
        std::find(rec.begin(), rec.end(), cp_steps[c]) - rec.begin());
    const double t = params.checkpoints[c];
    const MeanEstimate e = mean_estimate(column(h2, j, ms));
    CheckpointResult r{t, e.mean, e.se, bound_at(t), e.mean <= bound_at(t) + 3.0 * e.se};
    rep.structure_pass = rep.structure_pass && r.pass;
    rep.checkpoints.push_back(r);
  }

  if (exp_applicable) {
    std::vector<double> stat(static_cast<std::size_t>(params.exponential_members));
    for (std::size_t i = 0; i < stat.size(); ++i) stat[i] = std::exp(rep.gamma * sup[i]);
    const MeanEstimate e = mean_estimate(stat);
    rep.exp_mean = e.mean;
    rep.exp_se = e.se;
    rep.exp_bound = 2.0 * std::exp(rep.gamma * rep.t0_h2);
    rep.heavy_tail = !(e.se <= 0.2 * e.mean);
    rep.exponential_pass = std::isfinite(e.mean) && e.mean <= rep.exp_bound + 3.0 * e.se;
    if (rep.heavy_tail)
      log::warn("exponential estimate: relative standard error above 20%");
  } else {
    rep.exponential_pass = true;
  }
  rep.pass = rep.structure_pass && rep.exponential_pass;
  return rep;
}

// ----------------------------------------------------------------- pullback

PullbackReport run_pullback(const ExperimentSetup& setup, const PullbackParams& params) {
  const Model& model = *setup.model;
  const NoiseOperator& noise = *setup.noise;
  const ModeTable& table = model.modes();
  const double dt = setup.integrator.dt;
  if (params.starts.size() < 2) throw InvalidArgument("pullback needs at least two start times");
  if (params.members < 2) throw InvalidArgument("pullback needs at least two members");
  std::vector<int> start_steps;
  for (double s : params.starts) {
    if (!(s < 0.0)) throw InvalidArgument("pullback start times must be negative");
    start_steps.push_back(steps_for(-s, dt, "pullback start"));
  }
  const int burn = steps_for(params.burn_in, dt, "burn_in");
  const WienerPath path(setup.seed, noise.config().dt_w);
  const int sub = path.steps_in(dt);

  // Shared OU trajectory, started at rest well before the earliest start.
  const int earliest = *std::max_element(start_steps.begin(), start_steps.end());
  OUState z{model.zero_temperature(), noise.config().ou_alpha,
            -static_cast<std::int64_t>(earliest + burn) * sub};
  std::vector<TemperatureField> z_at(start_steps.size());
  for (int k = earliest + burn; k >= 0; --k) {
    for (std::size_t i = 0; i < start_steps.size(); ++i)
      if (start_steps[i] == k) z_at[i] = z.z;
    if (k > 0) ou_step_inplace(z, noise, path, dt);
  }
  const TemperatureField z0 = z.z;

  NormalStream rng(setup.seed, Stream::Initial);
  std::vector<TemperatureField> init;
  for (int i = 0; i < params.members; ++i)
    init.push_back(sphere_sample(table, rng, params.modes, params.radius, true));

  const std::size_t ns = params.starts.size(), nm = init.size();
  std::vector<TemperatureField> t_end(ns * nm), h_end(ns * nm);
  parallel_for(ns * nm, setup.jobs, [&](std::size_t task) {
    const std::size_t si = task / nm, mi = task % nm;
    Trajectory traj(model, noise, setup.integrator, path, init[mi],
                    -static_cast<std::int64_t>(start_steps[si]) * sub, z_at[si]);
    traj.advance(start_steps[si]);
    t_end[task] = traj.temperature();
    h_end[task] = traj.h();
  });

  PullbackReport rep;
  rep.lambda1 = table.lambda1();
  rep.z0_v = norm_v(table, z0);
  std::vector<double> abs_s, log_d;
  for (std::size_t si = 0; si < ns; ++si) {
    PullbackRow row;
    row.s = params.starts[si];
    for (std::size_t a = 0; a < nm; ++a) {
      const TemperatureField& ta = t_end[si * nm + a];
      row.max_v_t = std::max(row.max_v_t, norm_v(table, ta));
      row.max_v_h = std::max(row.max_v_h, norm_v(table, h_end[si * nm + a]));
      for (std::size_t b = a + 1; b < nm; ++b) {
        const TemperatureField d = ta - t_end[si * nm + b];
        row.diameter_h = std::max(row.diameter_h, norm_h(d));
        row.diameter_v = std::max(row.diameter_v, norm_v(table, d));
      }
    }
    row.r2 = row.max_v_h + rep.z0_v;
    rep.rows.push_back(row);
    abs_s.push_back(-row.s);
    log_d.push_back(std::log(row.diameter_v));
  }
  rep.fitted_rate = fit_line(abs_s, log_d).slope;
  rep.rate_threshold = -0.5 * rep.lambda1;
  rep.monotone = true;
  for (std::size_t i = 2; i < ns; ++i)
    rep.monotone = rep.monotone && rep.rows[i].diameter_v <= rep.rows[i - 1].diameter_v;
  const double ra = rep.rows[ns - 2].r2, rb = rep.rows[ns - 1].r2;
  rep.r2_relative_change = std::abs(rb - ra) / std::max(std::abs(ra), std::abs(rb));
  rep.r2_stable = rep.r2_relative_change <= 0.2;
  rep.pass = std::isfinite(rep.fitted_rate) && rep.fitted_rate <= rep.rate_threshold &&
             rep.monotone && rep.r2_stable;
  return rep;
}

// ---------------------------------------------------------------- dimension

SpectrumReport lyapunov_spectrum(const ExperimentSetup& setup, const SpectrumParams& params) {
  const Model& model = *setup.model;
  const ModeTable& table = model.modes();
  const double dt = setup.integrator.dt;
  if (params.d < 1 || static_cast<std::size_t>(params.d) > table.size())
    throw InvalidArgument("dimension: d must be in [1, number of modes]");
  if (params.reorth_every < 1) throw InvalidArgument("dimension: reorth_every must be >= 1");
  const int spin = steps_for(params.spinup, dt, "spinup");
  const int steps = steps_for(params.horizon, dt, "horizon");
  if (steps < 2 * params.reorth_every)
    throw InvalidArgument("dimension: horizon must cover several reorthonormalizations");

  NoiseConfig quiet = setup.noise->config();
  quiet.sigma = 0.0;
  const NoiseOperator silent(table, quiet);
  const NoiseOperator& noise = params.linear ? silent : *setup.noise;

  TemperatureField t0 = model.zero_temperature();
  if (!params.linear) {
    NormalStream rng(setup.seed, Stream::Initial);
    t0 = stationary_ou_sample(rng, noise, noise.config().ou_alpha).z;
  }
  Trajectory base(model, noise, setup.integrator, WienerPath(setup.seed, noise.config().dt_w),
                  t0);

  std::vector<TemperatureField> vecs;
  NormalStream trng(setup.seed, Stream::Tangent);
  std::vector<double> x(table.size());
  for (int j = 0; j < params.d; ++j) {
    for (double& v : x) v = trng();
    vecs.push_back(from_real_coordinates(table, x));
  }
  TangentSystem tangent(model, std::move(vecs));
  tangent.reorthonormalize();

  const auto d = static_cast<std::size_t>(params.d);
  std::vector<double> sum(d, 0.0), half(d, 0.0);
  SpectrumReport rep;
  for (int k = 1; k <= spin + steps; ++k) {
    base.prepare();
    tangent.step(base);
    base.commit();
    const bool qr_now = k % params.reorth_every == 0 || k == spin || k == spin + steps;
    if (!qr_now) continue;
    const std::vector<double> g = tangent.reorthonormalize();
    if (k <= spin) continue;
    for (std::size_t j = 0; j < d; ++j) sum[j] += g[j];
    const double elapsed = grid_time(k - spin, dt);
    SpectrumReport::Row row{elapsed, {}};
    for (std::size_t j = 0; j < d; ++j) row.running.push_back(sum[j] / elapsed);
    if (k - spin <= steps / 2) half = row.running;
    rep.series.push_back(std::move(row));
  }
  const double total = steps * dt;
  std::vector<double> final_avg(d);
  for (std::size_t j = 0; j < d; ++j) final_avg[j] = sum[j] / total;
  for (std::size_t j = 0; j < d; ++j) {
    const double scale = std::max(std::abs(final_avg[j]), 1e-12);
    if (std::abs(half[j] - final_avg[j]) > 0.05 * scale) rep.converged = false;
  }
  if (!rep.converged) log::warn("dimension: exponent running averages not converged");

  rep.exponents = final_avg;
  std::sort(rep.exponents.begin(), rep.exponents.end(), std::greater<>());
  double s = 0.0;
  for (double e : rep.exponents) {
    s += e;
    rep.partial_sums.push_back(s);
  }
  for (std::size_t j = 0; j < d; ++j)
    if (rep.partial_sums[j] < 0.0) {
      rep.d_star = static_cast<int>(j + 1);
      break;
    }
  if (rep.partial_sums.front() < 0.0) {
    rep.kaplan_yorke = 0.0;
  } else {
    std::size_t j = 0;
    while (j + 1 < d && rep.partial_sums[j + 1] >= 0.0) ++j;
    rep.kaplan_yorke = j + 1 < d ? static_cast<double>(j + 1) +
                                       rep.partial_sums[j] / std::abs(rep.exponents[j + 1])
                                 : static_cast<double>(d);
  }
  rep.eventually_decreasing = rep.exponents.back() < 0.0;

  for (std::size_t j = 0; j < d; ++j) rep.reference.push_back(-table.lambda(table.slot_at(j)));
  if (params.linear) {
    double worst = 0.0;
    for (std::size_t j = 0; j < d; ++j)
      worst = std::max(worst,
                       std::abs(rep.exponents[j] - rep.reference[j]) / std::abs(rep.reference[j]));
    rep.linear_error = worst;
  }
  rep.pass = rep.d_star.has_value() && rep.eventually_decreasing &&
             (!rep.linear_error || *rep.linear_error <= params.linear_tolerance);
  return rep;
}

// ------------------------------------------------------------------- mixing

Observation observe(const ModeTable& table, const Dictionary& dict, const TemperatureField& t) {
  if (dict.modes > table.size()) throw InvalidArgument("dictionary larger than the mode table");
  const std::vector<double> x = real_coordinates(table, t);
  Observation o;
  for (std::size_t r = 0; r < dict.modes; ++r) o.coords.push_back(x[table.slot_at(r)]);
  o.norm = norm_h(t);
  return o;
}

double wasserstein_estimate(std::span<const Observation> a, std::span<const Observation> b,
                            const Dictionary& dict) {
  if (a.empty() || b.empty()) throw InvalidArgument("wasserstein_estimate: empty ensemble");
  const auto mean_of = [&](std::span<const Observation> e, auto&& phi) {
    double s = 0.0;
    for (const Observation& o : e) s += phi(o);
    return s / static_cast<double>(e.size());
  };
  double best = 0.0;
  for (std::size_t n = 0; n < dict.modes; ++n) {
    const auto phi = [n](const Observation& o) { return 0.5 * std::tanh(o.coords.at(n)); };
    best = std::max(best, std::abs(mean_of(a, phi) - mean_of(b, phi)));
  }
  if (dict.include_norm) {
    const auto phi = [](const Observation& o) { return 0.5 * std::tanh(o.norm); };
    best = std::max(best, std::abs(mean_of(a, phi) - mean_of(b, phi)));
  }
  return best;
}

double wasserstein_estimate(const ModeTable& table, std::span<const TemperatureField> a,
                            std::span<const TemperatureField> b, const Dictionary& dict) {
  std::vector<Observation> oa, ob;
  for (const auto& t : a) oa.push_back(observe(table, dict, t));
  for (const auto& t : b) ob.push_back(observe(table, dict, t));
  return wasserstein_estimate(oa, ob, dict);
}

double marginal_wasserstein(std::span<const Observation> a, std::span<const Observation> b) {
  if (a.empty() || a.size() != b.size())
    throw InvalidArgument("marginal_wasserstein: ensembles must be non-empty and equal-sized");
  double best = 0.0;
  for (std::size_t n = 0; n < a.front().coords.size(); ++n) {
    std::vector<double> xa, xb;
    for (const auto& o : a) xa.push_back(o.coords[n]);
    for (const auto& o : b) xb.push_back(o.coords[n]);
    best = std::max(best, wasserstein_1d(std::move(xa), std::move(xb)));
  }
  return best;
}

std::size_t modes_below(const ModeTable& table, double threshold) {
  std::size_t n = 0;
  while (n < table.size() && table.lambda(table.slot_at(n)) < threshold) ++n;
  return n;
}

MixingReport run_mixing(const ExperimentSetup& setup, const MixingParams& params) {
  const Model& model = *setup.model;
  const NoiseOperator& noise = *setup.noise;
  const ModeTable& table = model.modes();
  const double dt = setup.integrator.dt;
  if (params.members < 2 || params.wasserstein_members < 2)
    throw InvalidArgument("mixing needs at least two members per ensemble");
  if (!(params.epsilon > 0.0 && params.epsilon <= 1.0))
    throw InvalidArgument("mixing: epsilon must lie in (0, 1]");
  const int steps = steps_for(params.horizon, dt, "horizon");
  const int every = std::max(1, steps_for(params.sample_every, dt, "sample_every"));

  MixingReport rep;
  rep.modes = params.modes > 0 ? params.modes : modes_below(table, params.mu_threshold);
  if (rep.modes == 0) throw InvalidArgument("mixing: no modes below the threshold");
  rep.mu_next = rep.modes < table.size() ? table.lambda_after(rep.modes)
                                         : std::numeric_limits<double>::infinity();
  rep.gain = params.gain;
  rep.epsilon = params.epsilon;
  const std::vector<double> ginv = h0_inverse(noise, rep.modes);
  rep.c1 = noise.b0() / table.lambda1();
  double gmin = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < rep.modes; ++r)
    gmin = std::min(gmin, noise.amplitude(table.slot_at(r)));
  rep.budget = params.budget > 0.0 ? params.budget : 2.0 * params.gain * rep.c1 / (gmin * gmin);

  IntegratorConfig ic = setup.integrator;
  ic.coupling_gain = params.gain;
  ic.coupling_modes = rep.modes;

  const std::vector<int> rec = record_steps(steps, every, {});
  const std::size_t nrec = rec.size();
  const auto m = static_cast<std::size_t>(params.members);
  const double radius = std::sqrt(rep.c1);
  std::vector<double> r_h(m * nrec), r_v(m * nrec), cost(m * nrec);

  parallel_for(m, setup.jobs, [&](std::size_t i) {
    const std::uint64_t s = derive_seed(setup.seed, i);
    NormalStream rng(s, Stream::Initial);
    TemperatureField a = sphere_sample(table, rng, params.init_modes, radius);
    TemperatureField b = sphere_sample(table, rng, params.init_modes, radius);
    CoupledTrajectory pair(model, noise, ic, WienerPath(s, noise.config().dt_w), a, b);
    std::size_t next = 0;
    for (int k = 0; k <= steps; ++k) {
      if (k > 0) pair.step();
      if (next < nrec && rec[next] == k) {
        r_h[i * nrec + next] = norm_h(pair.difference());
        r_v[i * nrec + next] = norm_v(table, pair.difference());
        cost[i * nrec + next] = pair.control_cost();
        ++next;
      }
    }
  });

  // Two uncoupled ensembles from different initial data, member i of both
  // driven by the same path.
  const Dictionary dict{params.dictionary_modes, true};
  const auto mw = static_cast<std::size_t>(params.wasserstein_members);
  NormalStream wrng(setup.seed, Stream::Sampling);
  const TemperatureField ta = sphere_sample(table, wrng, params.init_modes, radius);
  const TemperatureField tb = sphere_sample(table, wrng, params.init_modes, radius);
  IntegratorConfig plain = setup.integrator;
  plain.coupling_gain = 0.0;
  plain.coupling_modes = 0;
  std::vector<Observation> obs_a(mw * nrec), obs_b(mw * nrec);
  const std::uint64_t wseed = derive_seed(setup.seed, 0x5745ull << 32);
  parallel_for(2 * mw, setup.jobs, [&](std::size_t task) {
    const std::size_t i = task / 2;
    const bool first = task % 2 == 0;
    Trajectory traj(model, noise, plain,
                    WienerPath(derive_seed(wseed, i), noise.config().dt_w), first ? ta : tb);
    std::vector<Observation>& out = first ? obs_a : obs_b;
    std::size_t next = 0;
    for (int k = 0; k <= steps; ++k) {
      if (k > 0) traj.step();
      if (next < nrec && rec[next] == k) {
        out[i * nrec + next] = observe(table, dict, traj.temperature());
        ++next;
      }
    }
  });

  std::vector<double> ts, moments, ws;
  for (std::size_t j = 0; j < nrec; ++j) {
    MixingRow row;
    row.t = grid_time(rec[j], dt);
    std::vector<double> rh(m), rv(m), c(m), mom(m);
    for (std::size_t i = 0; i < m; ++i) {
      rh[i] = r_h[i * nrec + j];
      rv[i] = r_v[i * nrec + j];
      c[i] = cost[i * nrec + j];
      mom[i] = std::pow(rh[i], 2.0 * params.epsilon);
    }
    row.mean_r = mean_estimate(rh).mean;
    row.mean_r_v = mean_estimate(rv).mean;
    row.mean_cost = mean_estimate(c).mean;
    const MeanEstimate me = mean_estimate(mom);
    row.moment = me.mean;
    row.moment_se = me.se;
    std::vector<Observation> ea(mw), eb(mw);
    for (std::size_t i = 0; i < mw; ++i) {
      ea[i] = obs_a[i * nrec + j];
      eb[i] = obs_b[i * nrec + j];
    }
    row.wasserstein = wasserstein_estimate(ea, eb, dict);
    row.marginal_w1 = marginal_wasserstein(ea, eb);
    ts.push_back(row.t);
    moments.push_back(row.moment);
    ws.push_back(row.wasserstein);
    rep.rows.push_back(row);
  }

  rep.fit_from = 0.5 * params.horizon;
  rep.fit_to = params.horizon;
  const LinearFit mf = fit_exponential(ts, moments, rep.fit_from, rep.fit_to);
  rep.moment_rate = mf.slope;
  rep.moment_prefactor = std::exp(mf.intercept);
  rep.decay_pass = rep.moment_rate <= -params.epsilon;

  std::vector<double> final_cost(m);
  std::size_t ok = 0;
  for (std::size_t i = 0; i < m; ++i) {
    final_cost[i] = cost[i * nrec + nrec - 1];
    if (final_cost[i] <= rep.budget) ++ok;
  }
  rep.success_fraction = static_cast<double>(ok) / static_cast<double>(m);
  rep.success_pass = rep.success_fraction >= params.success_threshold;
  rep.cost_median = quantile(final_cost, 0.5);
  rep.cost_p90 = quantile(final_cost, 0.9);
  rep.cost_max = quantile(final_cost, 1.0);

  const LinearFit wf = fit_exponential(ts, ws, rep.fit_from, rep.fit_to);
  rep.wasserstein_rate = wf.slope;
  rep.wasserstein_pass = rep.wasserstein_rate < 0.0;
  rep.pass = rep.decay_pass && rep.success_pass && rep.wasserstein_pass;
  return rep;
}

}  // namespace pgv
