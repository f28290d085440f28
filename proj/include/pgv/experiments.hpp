#ifndef PGV_EXPERIMENTS_HPP
#define PGV_EXPERIMENTS_HPP
// Runnable checks of the long-time behaviour: Lyapunov structure and
// exponential moments, pullback attraction, Lyapunov spectrum and
// dimension, coupling and mixing.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pgv/integrator.hpp"
#include "pgv/model.hpp"
#include "pgv/stochastic_forcing.hpp"

namespace pgv {

/// Shared inputs of every experiment. Model and noise must outlive the call.
struct ExperimentSetup {
  const Model* model = nullptr;
  const NoiseOperator* noise = nullptr;
  IntegratorConfig integrator;
  std::uint64_t seed = 0;
  int jobs = 1;
};

/// Number of integrator steps in a duration; throws InvalidArgument when
/// `t` is not a whole number of steps.
int steps_for(double t, double dt, const char* what);

/// Gaussian direction on the `modes` lowest eigenmodes, scaled to `radius`
/// in H (or in V when `v_norm`).
TemperatureField sphere_sample(const ModeTable& table, NormalStream& rng, std::size_t modes,
                               double radius, bool v_norm = false);

struct EnergyRow {
  double t = 0.0;
  double h2 = 0.0;           // |T|^2
  double v2 = 0.0;           // ||T||^2
  double dissipation = 0.0;  // int_0^t ||T||^2 (trapezoid per step)
  double e_t = 0.0;          // |T|^2 + int_0^t ||T||^2
  double sup_excess = 0.0;   // sup_{s<=t} (E_T(s) - B0 s)
};

/// Running energy bookkeeping along one trajectory, updated every step.
class EnergyLedger {
 public:
  EnergyLedger(double b0, double h2_0, double v2_0);
  void advance(double dt, double h2, double v2);
  EnergyRow row() const;
  const std::vector<EnergyRow>& rows() const { return rows_; }
  void record() { rows_.push_back(row()); }

 private:
  double b0_;
  double t_ = 0.0;
  double t0_ = 0.0;
  double dt_ = 0.0;
  long long steps_ = 0;
  double h2_, v2_;
  double dissipation_ = 0.0;
  double sup_;
  std::vector<EnergyRow> rows_;
};

// ---------------------------------------------------------------- simulate

struct SimulateParams {
  double horizon = 1.0;
  double sample_every = 0.01;
  /// |T0| of the initial field on the lowest t0_modes modes; 0 starts at rest.
  double t0_norm = 0.0;
  int t0_modes = 32;
};

struct SimulateReport {
  std::vector<EnergyRow> rows;
  double lambda1 = 0.0;
  double b0 = 0.0;
  double max_residual = 0.0;  // largest diagnostic residual at the samples
};

using StepObserver = std::function<void(const Trajectory&, std::int64_t step)>;

SimulateReport run_simulate(const ExperimentSetup& setup, const SimulateParams& params,
                            const StepObserver& observer = {});

// ---------------------------------------------------------- lyapunov-check

struct LyapunovCheckParams {
  int members = 500;
  int exponential_members = 1000;
  double horizon = 10.0;
  std::vector<double> checkpoints{1.0, 2.0, 5.0, 10.0};
  double t0_norm = 1.0;
  int t0_modes = 32;
  double sample_every = 0.5;
  /// gamma = gamma_scale * lambda1 / (4 B0)
  double gamma_scale = 1.0;
};

struct CheckpointResult {
  double t = 0.0;
  double mean_h2 = 0.0;
  double se = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct LyapunovSeriesRow {
  double t = 0.0;
  double mean_h2 = 0.0;
  double se_h2 = 0.0;
  double bound = 0.0;
  double mean_v2 = 0.0;
  double mean_e_t = 0.0;
};

struct LyapunovCheckReport {
  double lambda1 = 0.0;
  double b0 = 0.0;
  double c1 = 0.0;  // B0 / lambda1
  double t0_h2 = 0.0;
  double gamma = 0.0;
  std::vector<CheckpointResult> checkpoints;
  bool structure_pass = false;
  double exp_mean = 0.0;
  double exp_se = 0.0;
  double exp_bound = 0.0;
  bool heavy_tail = false;
  bool exponential_pass = false;
  std::vector<LyapunovSeriesRow> series;
  bool pass = false;
};

LyapunovCheckReport verify_lyapunov(const ExperimentSetup& setup,
                                    const LyapunovCheckParams& params);

// ----------------------------------------------------------------- pullback

struct PullbackParams {
  std::vector<double> starts{-1.0, -2.0, -4.0, -8.0};
  int members = 8;
  /// V-norm radius of the initial set.
  double radius = 1.0;
  int modes = 32;
  /// Spin-up of the shared OU process before the earliest start.
  double burn_in = 10.0;
};

struct PullbackRow {
  double s = 0.0;
  double diameter_h = 0.0;
  double diameter_v = 0.0;
  double max_v_t = 0.0;  // max ||T(0)||
  double max_v_h = 0.0;  // max ||h(0)||
  double r2 = 0.0;       // max ||h(0)|| + ||Z(0)||
};

struct PullbackReport {
  std::vector<PullbackRow> rows;
  double lambda1 = 0.0;
  double z0_v = 0.0;
  double fitted_rate = 0.0;
  double rate_threshold = 0.0;
  bool monotone = false;
  double r2_relative_change = 0.0;
  bool r2_stable = false;
  bool pass = false;
};

PullbackReport run_pullback(const ExperimentSetup& setup, const PullbackParams& params);

// ---------------------------------------------------------------- dimension

struct SpectrumParams {
  int d = 16;
  double horizon = 20.0;
  double spinup = 5.0;
  int reorth_every = 10;
  /// Base trajectory T = 0 without noise; exponents must then equal
  /// -lambda_j.
  bool linear = false;
  double linear_tolerance = 0.02;
};

struct SpectrumReport {
  std::vector<double> exponents;  // sorted, largest first
  std::vector<double> partial_sums;
  std::optional<int> d_star;
  double kaplan_yorke = 0.0;
  bool converged = true;
  bool eventually_decreasing = false;
  /// Largest relative deviation from -lambda_j (linear runs only).
  std::optional<double> linear_error;
  std::vector<double> reference;  // -lambda_j for j <= d
  struct Row {
    double t = 0.0;
    std::vector<double> running;
  };
  std::vector<Row> series;
  bool pass = false;
};

SpectrumReport lyapunov_spectrum(const ExperimentSetup& setup, const SpectrumParams& params);

// ------------------------------------------------------------------- mixing

/// Bounded Lipschitz observables: x -> tanh(<x, e_n>) / 2 on the lowest
/// `modes` eigenmodes and x -> tanh(|x|) / 2. Each has sup + Lipschitz
/// constant at most 1.
struct Dictionary {
  std::size_t modes = 16;
  bool include_norm = true;
  std::size_t size() const { return modes + (include_norm ? 1 : 0); }
};

/// Observables recorded per ensemble member: the coordinates on the lowest
/// modes and |x|.
struct Observation {
  std::vector<double> coords;
  double norm = 0.0;
};

Observation observe(const ModeTable& table, const Dictionary& dict, const TemperatureField& t);

/// max over the dictionary of |mean_A phi - mean_B phi|; a lower bound on
/// the dual-Lipschitz distance between the empirical laws.
double wasserstein_estimate(std::span<const Observation> a, std::span<const Observation> b,
                            const Dictionary& dict);
double wasserstein_estimate(const ModeTable& table, std::span<const TemperatureField> a,
                            std::span<const TemperatureField> b, const Dictionary& dict);
/// max over the dictionary modes of the exact 1-D W1 between marginals.
double marginal_wasserstein(std::span<const Observation> a, std::span<const Observation> b);

struct MixingParams {
  double gain = 200.0;
  /// 0: all modes with lambda < mu_threshold.
  std::size_t modes = 0;
  double mu_threshold = 50.0;
  int members = 100;
  double horizon = 2.0;
  double epsilon = 0.25;
  /// 0: 2 K C1 / min_{n<=N} g_n^2.
  double budget = 0.0;
  double sample_every = 0.05;
  int wasserstein_members = 100;
  std::size_t dictionary_modes = 16;
  int init_modes = 32;
  double success_threshold = 0.9;
};

struct MixingRow {
  double t = 0.0;
  double mean_r = 0.0;    // E|r|
  double mean_r_v = 0.0;  // E||r||
  double mean_cost = 0.0;
  double moment = 0.0;  // E|r|^{2 eps}
  double moment_se = 0.0;
  double wasserstein = 0.0;
  double marginal_w1 = 0.0;
};

struct MixingReport {
  std::size_t modes = 0;
  double mu_next = 0.0;
  double gain = 0.0;
  double c1 = 0.0;
  double budget = 0.0;
  double epsilon = 0.0;
  double fit_from = 0.0, fit_to = 0.0;
  double moment_rate = 0.0;
  double moment_prefactor = 0.0;
  bool decay_pass = false;
  double success_fraction = 0.0;
  bool success_pass = false;
  double cost_median = 0.0, cost_p90 = 0.0, cost_max = 0.0;
  double wasserstein_rate = 0.0;
  bool wasserstein_pass = false;
  std::vector<MixingRow> rows;
  bool pass = false;
};

/// Number of lowest modes with lambda < threshold.
std::size_t modes_below(const ModeTable& table, double threshold);

MixingReport run_mixing(const ExperimentSetup& setup, const MixingParams& params);

}  // namespace pgv

#endif  // PGV_EXPERIMENTS_HPP
