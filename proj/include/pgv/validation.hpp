#ifndef PGV_VALIDATION_HPP
#define PGV_VALIDATION_HPP
// Invariant checks run by the `validate` command and the acceptance suite.

#include <cstdint>
#include <string>
#include <vector>

#include "pgv/integrator.hpp"
#include "pgv/model.hpp"
#include "pgv/stochastic_forcing.hpp"

namespace pgv {

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Real eigen-coordinates x_n ~ N(0, 1) lambda_n^(-power) on every mode.
TemperatureField random_smooth_field(const ModeTable& table, NormalStream& rng,
                                     double power = 1.0);

/// max |mu tan mu - alpha| over the roots of the model.
double robin_root_residual(const Model& model);
/// Largest deviation of the T, V and W Gram matrices from the identity,
/// using a quadrature of `nz_quad` nodes.
double gram_defect(const Model& model, int nz_quad);

struct DiagnosticChecks {
  double residual = 0.0;    // momentum residual, worst sample
  double barotropic = 0.0;  // |vertical mean of v|, worst sample
  double divergence = 0.0;  // |dw/dz + div v| mode-wise, relative
  double linearity = 0.0;   // relative defect of a T1 + b T2
};
DiagnosticChecks diagnostic_checks(const Model& model, double f, std::uint64_t seed,
                                   int samples);

struct RegularityReport {
  int samples = 0;
  /// Largest |v|_{H1} / |T| and |v|_{H2} / ||T|| over random smooth T.
  double h1_ratio = 0.0;
  double h2_ratio = 0.0;
  /// Exact operator norms of T -> v in the same norms, from per-wavevector SVDs.
  double h1_operator = 0.0;
  double h2_operator = 0.0;
};
RegularityReport regularity_ratios(const Model& model, double f, std::uint64_t seed,
                                   int samples);

/// max over samples of |<B(v, T), T>| / (|B(v, T)| |T|), with v from T and
/// from an independent field.
double skew_symmetry_defect(const Model& model, double f, std::uint64_t seed, int samples);

/// Relative drift | |T(t)|^2 + 2 int ||T||^2 - |T0|^2 | / |T0|^2 at t = horizon
/// without noise.
double energy_identity_drift(const Model& model, const IntegratorConfig& integrator,
                             const TemperatureField& t0, double horizon);

/// Relative error of the central difference
/// (flow(T + eps chi) - flow(T - eps chi)) / (2 eps) against the tangent flow.
double tangent_fd_error(const Trajectory& start, const TemperatureField& chi, double eps,
                        int steps);

struct OuCheck {
  double ou_alpha = 0.0;
  double empirical = 0.0;
  double se = 0.0;
  double exact = 0.0;
  double z_score = 0.0;
};
/// Monte-Carlo E|AZ|^2 of the stationary sampler against its closed form.
OuCheck ou_stationary_check(const NoiseOperator& noise, double ou_alpha, std::uint64_t seed,
                            int samples);

struct ValidationReport {
  std::vector<Check> checks;
  RegularityReport regularity;
  bool pass = false;
};
ValidationReport run_validation(const Model& model, const NoiseOperator& noise,
                                const IntegratorConfig& integrator, std::uint64_t seed);

}  // namespace pgv

#endif  // PGV_VALIDATION_HPP
