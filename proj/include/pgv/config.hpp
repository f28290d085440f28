#ifndef PGV_CONFIG_HPP
#define PGV_CONFIG_HPP
// Run configuration: JSON document -> validated RunConfig. Unknown keys are
// rejected; every field has a default. Errors are ConfigError with the
// dotted path of the offending field.

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "pgv/experiments.hpp"
#include "pgv/integrator.hpp"
#include "pgv/model.hpp"
#include "pgv/stochastic_forcing.hpp"

namespace pgv {

enum class ExperimentType { Simulate, Pullback, Dimension, Mixing, LyapunovCheck, Validate };

const char* experiment_name(ExperimentType t);
/// Throws ConfigError("experiment.type") on unknown names.
ExperimentType parse_experiment(const std::string& name);

struct OutputConfig {
  std::string dir = "pgv-out";
  int snapshot_every = 0;
};

struct RunConfig {
  std::uint64_t seed = 0;
  ModelConfig model;
  NoiseConfig noise;
  double dt = 1e-3;
  Scheme scheme = Scheme::ImexH;
  ExperimentType experiment = ExperimentType::Simulate;
  SimulateParams simulate;
  LyapunovCheckParams lyapunov;
  PullbackParams pullback;
  SpectrumParams dimension;
  MixingParams mixing;
  OutputConfig output;
};

RunConfig parse_config(std::string_view text);
/// Re-checks the cross-field constraints (after command-line overrides).
void validate_config(const RunConfig& config);

IntegratorConfig integrator_config(const RunConfig& config);

/// Every resolved field, in a fixed key order. The output section is left
/// out unless requested, so reports do not depend on where they are written.
nlohmann::ordered_json canonical_json(const RunConfig& config, bool include_output = true);

}  // namespace pgv

#endif  // PGV_CONFIG_HPP
