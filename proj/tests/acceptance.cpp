// Acceptance suite: one PASS/FAIL line per criterion, followed by indented
// detail lines. Every tolerance and run size is pinned below; ensemble
// criteria use reduced resolution or step size where a single core cannot
// afford the default configuration (see README).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include "oracles.hpp"
#include "pgv/config.hpp"
#include "pgv/diagnostic_solver.hpp"
#include "pgv/experiments.hpp"
#include "pgv/integrator.hpp"
#include "pgv/model.hpp"
#include "pgv/runner.hpp"
#include "pgv/stochastic_forcing.hpp"
#include "pgv/validation.hpp"

using namespace pgv;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 1;

// 1. basis
constexpr double kRootTol = 1e-12;
constexpr double kGramTol = 1e-10;
constexpr double kBisectionTol = 1e-12;
// 2. diagnostic solver
constexpr int kDiagSamples = 50;
constexpr double kResidualTol = 1e-11;
constexpr double kOracleTol = 1e-10;
constexpr double kLinearityTol = 1e-12;
constexpr double kBarotropicTol = 1e-14;
constexpr int kRegularitySamples = 2000;
constexpr double kRegularityBand = 0.10;
// 3. nonlinear core
constexpr int kSkewSamples = 100;
constexpr double kSkewTol = 1e-10;
constexpr double kDriftPerDt = 5.0;
constexpr double kHalvingLo = 1.6, kHalvingHi = 2.4;
// 4. OU
constexpr int kOuSamples = 100000;
constexpr double kOuZ = 4.0;
// 5-6. Lyapunov structure and exponential estimate
constexpr int kLyapMembers = 500;
constexpr int kExpMembers = 1000;
constexpr int kExpMembersFromRest = 500;
// 8. dimension
constexpr double kLinearSpectrumTol = 0.02;
constexpr double kLinearSpinup = 16.0;
// 10. tangent
constexpr int kTangentPairs = 10;
constexpr int kTangentSteps = 100;
constexpr double kTangentRatio = 50.0;

struct Outcome {
  bool pass = false;
  std::vector<std::string> lines;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

ModelConfig reduced_model() {
  ModelConfig c;
  c.resolution = Resolution{8, 8, 4, 4, 0};
  return c;
}

NoiseConfig noise_with_dt(double dt_w) {
  NoiseConfig n;
  n.dt_w = dt_w;
  return n;
}

// ------------------------------------------------------------------ 1
Outcome basis() {
  Outcome o;
  const Model model{ModelConfig{}};
  double residual = robin_root_residual(model);
  for (double alpha : {0.1, 10.0})
    for (double mu : robin_eigenvalues(alpha, 16))
      residual = std::max(residual, std::abs(mu * std::tan(mu) - alpha));
  const double gram = gram_defect(model, static_cast<int>(model.quadrature().size()));
  double bisect = 0.0;
  const auto& roots = model.basis_t().roots();
  for (std::size_t m = 0; m < roots.size(); ++m)
    bisect = std::max(bisect, std::abs(roots[m] - test::bisect_robin_root(1.0, int(m) + 1)));
  const double mu1 = roots[0];
  o.pass = residual <= kRootTol && gram <= kGramTol && bisect <= kBisectionTol;
  o.lines.push_back(fmt("max |mu tan mu - alpha| = %.2e (alpha in {0.1, 1, 10}; tol %.0e)",
                        residual, kRootTol));
  o.lines.push_back(fmt("Gram defect T/V/W at nz_quad=%zu: %.2e (tol %.0e)",
                        model.quadrature().size(), gram, kGramTol));
  o.lines.push_back(fmt("mu_1 = %.15f; roots vs bisection: %.2e (tol %.0e)", mu1, bisect,
                        kBisectionTol));
  return o;
}

// ------------------------------------------------------------------ 2
Outcome diagnostic() {
  Outcome o;
  const Model model{ModelConfig{}};
  const double f = model.coriolis();
  const test::DenseMomentumOracle oracle(model);
  NormalStream rng(kSeed, Stream::Sampling);
  double residual = 0.0, deviation = 0.0;
  for (int k = 0; k < kDiagSamples; ++k) {
    const TemperatureField t = random_smooth_field(model.modes(), rng);
    const DiagnosticState d = velocity_from_temperature(model, t, f);
    residual = std::max(residual, d.residual);
    deviation = std::max(deviation, oracle.max_deviation(t, d, f));
  }
  const DiagnosticChecks c = diagnostic_checks(model, f, kSeed, kDiagSamples);

  ModelConfig coarse, fine;
  coarse.resolution = Resolution{8, 8, 8, 8, 0};
  fine.resolution = Resolution{16, 16, 16, 16, 0};
  const Model mc(coarse), mf(fine);
  const RegularityReport rc = regularity_ratios(mc, f, kSeed, kRegularitySamples);
  const RegularityReport rf = regularity_ratios(mf, f, kSeed, kRegularitySamples);
  const double h1_change = rf.h1_ratio / rc.h1_ratio - 1.0;
  const double h2_change = rf.h2_ratio / rc.h2_ratio - 1.0;
  const bool regular = std::abs(h1_change) <= kRegularityBand &&
                       std::abs(h2_change) <= kRegularityBand;

  o.pass = residual < kResidualTol && deviation <= kOracleTol && c.linearity <= kLinearityTol &&
           c.barotropic < kBarotropicTol && regular;
  o.lines.push_back(fmt("momentum residual %.2e (tol %.0e), dense-oracle deviation %.2e "
                        "(tol %.0e), %d temperatures",
                        residual, kResidualTol, deviation, kOracleTol, kDiagSamples));
  o.lines.push_back(fmt("linearity %.2e (tol %.0e), barotropic mean %.2e (tol %.0e)",
                        c.linearity, kLinearityTol, c.barotropic, kBarotropicTol));
  o.lines.push_back(fmt("empirical |v|_H1/|T|: 8^3 %.4f -> 16^3 %.4f (%+.1f%%); "
                        "|v|_H2/||T||: %.4f -> %.4f (%+.1f%%); band +-%.0f%%, M=%d",
                        rc.h1_ratio, rf.h1_ratio, 100 * h1_change, rc.h2_ratio, rf.h2_ratio,
                        100 * h2_change, 100 * kRegularityBand, kRegularitySamples));
  o.lines.push_back(fmt("exact operator norms (info): H1 %.4f -> %.4f (%+.1f%%), "
                        "H2 %.4f -> %.4f (%+.1f%%)",
                        rc.h1_operator, rf.h1_operator, 100 * (rf.h1_operator / rc.h1_operator - 1),
                        rc.h2_operator, rf.h2_operator,
                        100 * (rf.h2_operator / rc.h2_operator - 1)));
  return o;
}

// ------------------------------------------------------------------ 3
Outcome nonlinear() {
  Outcome o;
  const Model model{ModelConfig{}};
  const double skew = skew_symmetry_defect(model, model.coriolis(), kSeed, kSkewSamples);
  NormalStream rng(kSeed, Stream::Initial);
  TemperatureField t0 = random_smooth_field(model.modes(), rng);
  t0 *= 1.0 / norm_h(t0);
  std::vector<double> drift;
  for (double dt : {1e-3, 5e-4, 2.5e-4}) {
    IntegratorConfig ic;
    ic.dt = dt;
    drift.push_back(energy_identity_drift(model, ic, t0, 1.0));
  }
  const double r1 = drift[0] / drift[1], r2 = drift[1] / drift[2];
  const double richardson = 2.0 * drift[1] - drift[0];
  o.pass = skew < kSkewTol && drift[0] < kDriftPerDt * 1e-3 && r1 >= kHalvingLo &&
           r1 <= kHalvingHi && r2 >= kHalvingLo && r2 <= kHalvingHi;
  o.lines.push_back(fmt("normalized <B(v,S),S> max %.2e over %d fields (tol %.0e)", skew,
                        kSkewSamples, kSkewTol));
  o.lines.push_back(fmt("relative energy drift over [0,1]: %.3e (dt=1e-3, = %.2f dt; tol %.0f dt)",
                        drift[0], drift[0] / 1e-3, kDriftPerDt));
  o.lines.push_back(fmt("halving ratios %.3f, %.3f (band [%.1f, %.1f]); Richardson "
                        "extrapolated drift %.1e",
                        r1, r2, kHalvingLo, kHalvingHi, richardson));
  return o;
}

// ------------------------------------------------------------------ 4
Outcome ou() {
  Outcome o;
  const Model model{ModelConfig{}};
  const NoiseOperator noise(model.modes(), NoiseConfig{});
  bool pass = true;
  double previous = INFINITY;
  for (double alpha : {0.0, 10.0, 100.0}) {
    const OuCheck c = ou_stationary_check(noise, alpha, kSeed, kOuSamples);
    const bool ok = std::abs(c.z_score) <= kOuZ && c.empirical < previous;
    pass = pass && ok;
    previous = c.empirical;
    o.lines.push_back(fmt("ou_alpha=%5.1f: E|AZ|^2 = %.6e +- %.1e, exact %.6e, z = %.2f", alpha,
                          c.empirical, c.se, c.exact, c.z_score));
  }
  o.pass = pass;
  o.lines.push_back(fmt("M=%d per alpha; |z| <= %.0f and strictly decreasing in alpha", kOuSamples,
                        kOuZ));
  return o;
}

// ------------------------------------------------------------------ 5, 6
struct LyapunovRuns {
  LyapunovCheckReport main, from_rest;
};

LyapunovRuns lyapunov_runs() {
  static const Model model(reduced_model());
  static const NoiseOperator noise(model.modes(), noise_with_dt(1e-2));
  ExperimentSetup s{&model, &noise, {}, kSeed, jobs()};
  s.integrator.dt = 1e-2;
  LyapunovCheckParams p;
  p.members = kLyapMembers;
  p.exponential_members = kExpMembers;
  LyapunovRuns r;
  r.main = verify_lyapunov(s, p);
  p.members = 2;
  p.exponential_members = kExpMembersFromRest;
  p.t0_norm = 0.0;
  r.from_rest = verify_lyapunov(s, p);
  return r;
}

const LyapunovRuns& lyapunov_cached() {
  static const LyapunovRuns r = lyapunov_runs();
  return r;
}

Outcome lyapunov_structure() {
  Outcome o;
  const LyapunovCheckReport& r = lyapunov_cached().main;
  o.pass = r.structure_pass;
  for (const CheckpointResult& c : r.checkpoints)
    o.lines.push_back(fmt("t=%4.1f: mean |T|^2 = %.4e (SE %.1e) vs bound %.4e  %s", c.t,
                          c.mean_h2, c.se, c.bound, c.pass ? "ok" : "EXCEEDED"));
  o.lines.push_back(fmt("8x8x4 modes, dt=1e-2, M=%d, |T0|=1, lambda1=%.4f, B0/lambda1=%.4e",
                        kLyapMembers, r.lambda1, r.c1));
  return o;
}

Outcome exponential_estimate() {
  Outcome o;
  const LyapunovRuns& r = lyapunov_cached();
  o.pass = r.main.exponential_pass && r.from_rest.exponential_pass;
  for (const auto* rep : {&r.main, &r.from_rest})
    o.lines.push_back(fmt("|T0|^2=%.1f: E exp(gamma0 sup(E_T - B0 t)) = %.4e (SE %.1e) vs "
                          "2 exp(gamma0 |T0|^2) = %.4e, gamma0 = %.3f%s",
                          rep->t0_h2, rep->exp_mean, rep->exp_se, rep->exp_bound, rep->gamma,
                          rep->heavy_tail ? " (heavy tail)" : ""));
  o.lines.push_back(fmt("8x8x4 modes, dt=1e-2, horizon 10; M=%d from |T0|=1, M=%d from rest",
                        kExpMembers, kExpMembersFromRest));
  return o;
}

// ------------------------------------------------------------------ 7
Outcome pullback() {
  Outcome o;
  const Model model{ModelConfig{}};
  const NoiseOperator noise(model.modes(), NoiseConfig{});
  ExperimentSetup s{&model, &noise, {}, kSeed, jobs()};
  const PullbackReport r = run_pullback(s, PullbackParams{});
  o.pass = r.pass;
  for (const PullbackRow& row : r.rows)
    o.lines.push_back(fmt("s=%5.1f: V-diameter %.4e, r2 = %.4f", row.s, row.diameter_v, row.r2));
  o.lines.push_back(fmt("fitted rate %.4f (need <= %.4f), monotone %s, r2 change %.1f%% "
                        "(need <= 20%%); default modes, dt=1e-3",
                        r.fitted_rate, r.rate_threshold, r.monotone ? "yes" : "no",
                        100 * r.r2_relative_change));
  return o;
}

// ------------------------------------------------------------------ 8
Outcome dimension() {
  Outcome o;
  const Model model{ModelConfig{}};
  const NoiseOperator noise(model.modes(), noise_with_dt(1e-2));
  ExperimentSetup s{&model, &noise, {}, kSeed, jobs()};
  s.integrator.dt = 1e-2;
  const SpectrumReport r = lyapunov_spectrum(s, SpectrumParams{});

  ExperimentSetup lin = s;
  lin.integrator.scheme = Scheme::ExpEulerDirect;
  SpectrumParams lp;
  lp.linear = true;
  lp.spinup = kLinearSpinup;
  lp.horizon = 2.0;
  lp.linear_tolerance = kLinearSpectrumTol;
  const SpectrumReport l = lyapunov_spectrum(lin, lp);
  // Shorter spinup for comparison: the random initial frame needs time to
  // align with the leading eigendirections.
  lp.spinup = kLinearSpinup / 2;
  const SpectrumReport short_spin = lyapunov_spectrum(lin, lp);

  o.pass = r.d_star.has_value() && *r.d_star <= static_cast<int>(model.modes().size()) &&
           l.linear_error && *l.linear_error <= kLinearSpectrumTol;
  std::string ex;
  for (std::size_t j = 0; j < std::min<std::size_t>(5, r.exponents.size()); ++j)
    ex += fmt("%s%.4f", j ? ", " : "", r.exponents[j]);
  o.lines.push_back(fmt("d=16, horizon 20, dt=1e-2: exponents %s, ...; d* = %s, Kaplan-Yorke %.2f, "
                        "converged %s",
                        ex.c_str(), r.d_star ? std::to_string(*r.d_star).c_str() : "none",
                        r.kaplan_yorke, r.converged ? "yes" : "no"));
  o.lines.push_back(fmt("linear base (T = 0, exponential Euler): max |Lambda_j + lambda_j| / "
                        "lambda_j = %.2e (tol %.0e), spinup %.0f",
                        l.linear_error.value_or(NAN), kLinearSpectrumTol, kLinearSpinup));
  o.lines.push_back(fmt("same with spinup %.0f (info): %.2e", kLinearSpinup / 2,
                        short_spin.linear_error.value_or(NAN)));
  return o;
}

// ------------------------------------------------------------------ 9
Outcome mixing() {
  Outcome o;
  const Model model(reduced_model());
  NoiseConfig nc = noise_with_dt(1e-2);
  nc.n_active = 0;
  const NoiseOperator noise(model.modes(), nc);
  ExperimentSetup s{&model, &noise, {}, kSeed, jobs()};
  s.integrator.dt = 1e-2;
  const MixingReport r = run_mixing(s, MixingParams{});
  o.pass = r.decay_pass && r.success_pass && r.wasserstein_pass;
  o.lines.push_back(fmt("K=%.0f, N=%zu (mu_{N+1}=%.2f), M=100 pairs, 8x8x4 modes, dt=1e-2",
                        r.gain, r.modes, r.mu_next));
  o.lines.push_back(fmt("slope of log E|r|^{2eps} on [%.1f, %.1f]: %.3f (need <= %.2f)",
                        r.fit_from, r.fit_to, r.moment_rate, -r.epsilon));
  o.lines.push_back(fmt("cost <= budget %.3e in %.0f%% of pairs (need >= 90%%); median cost %.3e",
                        r.budget, 100 * r.success_fraction, r.cost_median));
  o.lines.push_back(fmt("dictionary Wasserstein rate %.3f (need < 0)", r.wasserstein_rate));
  return o;
}

// ------------------------------------------------------------------ 10
Outcome tangent() {
  Outcome o;
  const Model model{ModelConfig{}};
  const NoiseOperator noise(model.modes(), NoiseConfig{});
  NormalStream rng(kSeed, Stream::Tangent);
  double worst = INFINITY, best = 0.0, floor_err = 0.0;
  for (int k = 0; k < kTangentPairs; ++k) {
    TemperatureField t0 = random_smooth_field(model.modes(), rng);
    TemperatureField chi = random_smooth_field(model.modes(), rng);
    t0 *= 1.0 / norm_h(t0);
    chi *= 1.0 / norm_h(chi);
    const Trajectory start(model, noise, IntegratorConfig{},
                           WienerPath(derive_seed(kSeed, k), 1e-3), t0);
    const double e1 = tangent_fd_error(start, chi, 1e-1, kTangentSteps);
    const double e2 = tangent_fd_error(start, chi, 1e-2, kTangentSteps);
    worst = std::min(worst, e1 / e2);
    best = std::max(best, e1 / e2);
    floor_err = std::max(floor_err, e2);
  }
  o.pass = worst >= kTangentRatio;
  o.lines.push_back(fmt("%d pairs, %d steps: error ratio eps 1e-1 -> 1e-2 in [%.1f, %.1f] "
                        "(need >= %.0f); largest error at 1e-2: %.1e",
                        kTangentPairs, kTangentSteps, worst, best, kTangentRatio, floor_err));
  return o;
}

// ------------------------------------------------------------------ 11
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / ("pgv-acceptance-" + std::to_string(::getpid()));
  const char* common = R"("seed": 5, "resolution": {"nx": 8, "ny": 8, "nz_t": 4, "nz_v": 4},
      "noise": {"n_active": 0, "dt_w": 0.01}, "integrator": {"dt": 0.01})";
  const std::vector<std::pair<std::string, std::string>> runs{
      {"lyapunov-check", R"({"type": "lyapunov-check", "members": 24, "exponential_members": 24,
          "horizon": 1.0, "checkpoints": [0.5, 1.0], "sample_every": 0.1})"},
      {"mixing", R"({"type": "mixing", "members": 12, "wasserstein_members": 12,
          "horizon": 0.5, "sample_every": 0.05, "dictionary_modes": 8})"},
      {"pullback", R"({"type": "pullback", "starts": [-0.5, -1.0, -2.0], "members": 4,
          "burn_in": 0.5})"},
      {"simulate", R"({"type": "simulate", "horizon": 0.5, "sample_every": 0.05, "t0_norm": 1.0})"},
  };
  bool pass = true;
  for (const auto& [name, experiment] : runs) {
    RunConfig cfg =
        parse_config(std::string("{") + common + R"(, "experiment": )" + experiment + "}");
    std::vector<std::string> summaries, series;
    for (int j : {1, 8, 1}) {
      cfg.output.dir = (root / (name + "-" + std::to_string(summaries.size()))).string();
      const RunResult res = run(cfg, RunOptions{j});
      if (res.exit_code != kExitPass && res.exit_code != kExitFail)
        throw std::runtime_error(name + ": " + res.message);
      summaries.push_back(slurp(fs::path(cfg.output.dir) / "summary.json"));
      series.push_back(slurp(fs::path(cfg.output.dir) / "series.csv"));
    }
    const bool same = !summaries[0].empty() && !series[0].empty() &&
                      summaries[0] == summaries[1] && summaries[0] == summaries[2] &&
                      series[0] == series[1] && series[0] == series[2];
    pass = pass && same;
    o.lines.push_back(fmt("%-15s jobs 1 / 8 / 1: summary.json %zu B, series.csv %zu B, %s", name.c_str(),
                          summaries[0].size(), series[0].size(),
                          same ? "byte-identical" : "DIFFERENT"));
  }
  std::error_code ec;
  fs::remove_all(root, ec);
  o.pass = pass;
  return o;
}

}  // namespace

// Exit status: 0 when every criterion was evaluated, whatever its verdict;
// 2 if a criterion could not be evaluated. With --strict any FAIL gives 1.
int main(int argc, char** argv) {
  const bool strict = argc > 1 && std::string(argv[1]) == "--strict";
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"basis correctness", basis},
      {"diagnostic solver", diagnostic},
      {"nonlinear core", nonlinear},
      {"OU / noise", ou},
      {"Lyapunov structure", lyapunov_structure},
      {"exponential estimate", exponential_estimate},
      {"pullback attraction", pullback},
      {"dimension finiteness", dimension},
      {"mixing", mixing},
      {"tangent validity", tangent},
      {"determinism", determinism},
  };
  std::printf("pgv acceptance (seed %llu, %d worker threads)\n",
              static_cast<unsigned long long>(kSeed), jobs());
  int passed = 0;
  bool evaluated = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.lines.push_back(std::string("error: ") + e.what());
      evaluated = false;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %2zu %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, secs);
    for (const std::string& line : o.lines) std::printf("       %s\n", line.c_str());
    std::fflush(stdout);
    passed += o.pass ? 1 : 0;
  }
  std::printf("%d/%zu criteria passed\n", passed, criteria.size());
  if (!evaluated) return 2;
  return strict && passed != static_cast<int>(criteria.size()) ? 1 : 0;
}
