#include "pgv/runner.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>

#include "pgv/diagnostic_solver.hpp"
#include "pgv/errors.hpp"
#include "pgv/log.hpp"
#include "pgv/report_io.hpp"
#include "pgv/snapshot.hpp"
#include "pgv/validation.hpp"

#ifndef PGV_VERSION
#define PGV_VERSION "unknown"
#endif

namespace pgv {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

const char* version_string() { return PGV_VERSION; }

namespace {

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Outcome {
  ordered_json result;
  CsvTable series;
  bool pass = true;
};

template <class Report>
Outcome wrap(const Report& r) {
  return Outcome{to_json(r), pgv::series(r), r.pass};
}

Outcome wrap(const SimulateReport& r) { return Outcome{to_json(r), series(r), true}; }

Outcome execute(const RunConfig& config, const Model& model, const NoiseOperator& noise,
                const ExperimentSetup& setup) {
  switch (config.experiment) {
    case ExperimentType::Simulate: {
      StepObserver observer;
      const int every = config.output.snapshot_every;
      const fs::path dir = fs::path(config.output.dir) / "snapshots";
      if (every > 0) {
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
        observer = [&, every, dir](const Trajectory& traj, std::int64_t step) {
          if (step % every != 0) return;
          char name[48];
          std::snprintf(name, sizeof name, "step_%09lld.pgvs", static_cast<long long>(step));
          const DiagnosticState d = velocity_from_temperature(model, traj.temperature(),
                                                              setup.integrator.f);
          try {
            write_snapshot((dir / name).string(), model, &traj.temperature(), &d.v);
          } catch (const std::runtime_error& e) {
            throw IoError(e.what());
          }
        };
      }
      return wrap(run_simulate(setup, config.simulate, observer));
    }
    case ExperimentType::LyapunovCheck:
      return wrap(verify_lyapunov(setup, config.lyapunov));
    case ExperimentType::Pullback:
      return wrap(run_pullback(setup, config.pullback));
    case ExperimentType::Dimension:
      return wrap(lyapunov_spectrum(setup, config.dimension));
    case ExperimentType::Mixing:
      return wrap(run_mixing(setup, config.mixing));
    case ExperimentType::Validate:
      return wrap(run_validation(model, noise, setup.integrator, setup.seed));
  }
  throw InvalidArgument("unknown experiment");
}

}  // namespace

RunResult run(const RunConfig& config, const RunOptions& options) {
  const auto wall0 = std::chrono::steady_clock::now();
  const std::string started = utc_now();
  const fs::path out(config.output.dir);

  ordered_json summary;
  summary["version"] = version_string();
  summary["experiment"] = experiment_name(config.experiment);
  summary["seed"] = config.seed;
  summary["config"] = canonical_json(config, false);

  RunResult res;
  CsvTable table;
  try {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw IoError("cannot create " + out.string() + ": " + ec.message());

    validate_config(config);
    const Model model(config.model);
    const NoiseOperator noise(model.modes(), config.noise);
    ExperimentSetup setup{&model, &noise, integrator_config(config), config.seed,
                          std::max(1, options.jobs)};
    log::info(std::string("running ") + experiment_name(config.experiment) + " on " +
              std::to_string(model.modes().size()) + " temperature modes");
    Outcome o = execute(config, model, noise, setup);
    summary["status"] = o.pass ? "pass" : "fail";
    summary["result"] = std::move(o.result);
    table = std::move(o.series);
    res.exit_code = o.pass ? kExitPass : kExitFail;
    res.message = o.pass ? "pass" : "experiment assertion failed";
  } catch (const ConfigError& e) {
    return RunResult{kExitConfig, e.what()};
  } catch (const InvalidArgument& e) {
    return RunResult{kExitConfig, e.what()};
  } catch (const IoError& e) {
    return RunResult{kExitIo, e.what()};
  } catch (const H0Degenerate& e) {
    summary["status"] = "fail";
    summary["error"] = e.what();
    res = RunResult{kExitFail, e.what()};
  } catch (const BlowUp& e) {
    summary["status"] = "blow-up";
    summary["error"] = e.what();
    summary["blow_up"] = {{"time", e.time()}, {"norm_h", e.norm_h()}, {"norm_v", e.norm_v()}};
    res = RunResult{kExitBlowUp, e.what()};
  }

  try {
    write_file(out / "summary.json", dump_json(summary));
    if (!table.header.empty()) write_file(out / "series.csv", table.str());
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
    ordered_json meta;
    meta["version"] = version_string();
    meta["started_utc"] = started;
    meta["finished_utc"] = utc_now();
    meta["wall_seconds"] = wall;
    meta["jobs"] = options.jobs;
    meta["output_dir"] = config.output.dir;
    meta["snapshot_every"] = config.output.snapshot_every;
    write_file(out / "metadata.json", dump_json(meta));
  } catch (const IoError& e) {
    return RunResult{kExitIo, e.what()};
  }
  return res;
}

}  // namespace pgv
