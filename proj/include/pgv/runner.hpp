#ifndef PGV_RUNNER_HPP
#define PGV_RUNNER_HPP

#include <string>

#include "pgv/config.hpp"

namespace pgv {

enum ExitCode : int {
  kExitPass = 0,
  kExitFail = 1,
  kExitConfig = 2,
  kExitBlowUp = 3,
  kExitIo = 4,
};

struct RunOptions {
  int jobs = 1;
};

struct RunResult {
  int exit_code = kExitPass;
  std::string message;
};

const char* version_string();

/// Runs the configured experiment and writes summary.json, series.csv and
/// metadata.json into config.output.dir. summary.json and series.csv depend
/// only on the configuration (not on jobs, output location or wall time).
RunResult run(const RunConfig& config, const RunOptions& options);

}  // namespace pgv

#endif  // PGV_RUNNER_HPP
