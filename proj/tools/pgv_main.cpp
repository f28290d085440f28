// pgv: command-line front end. One experiment per invocation.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "pgv/errors.hpp"
#include "pgv/runner.hpp"

namespace {

std::string read_text(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw pgv::IoError("cannot read " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// Fills in experiment.type from the subcommand, or rejects a conflicting one.
std::string with_type(const std::string& text, const std::string& type) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw pgv::ConfigError("<document>", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw pgv::ConfigError("<document>", "must be a JSON object");
  auto& exp = doc["experiment"];
  if (exp.is_null()) exp = nlohmann::json::object();
  if (!exp.is_object()) throw pgv::ConfigError("experiment", "must be an object");
  if (!exp.contains("type")) {
    exp["type"] = type;
  } else if (!exp["type"].is_string() || exp["type"].get<std::string>() != type) {
    throw pgv::ConfigError("experiment.type", "does not match the subcommand '" + type + "'");
  }
  return doc.dump();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral simulator for the stochastic planetary geostrophic model"};
  app.set_version_flag("--version", std::string(pgv::version_string()));
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> snapshot_every;
  int jobs = 1;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"simulate", "integrate one trajectory and record its energy ledger"},
      {"pullback", "ensemble pullback from dyadic start times on one noise path"},
      {"dimension", "Lyapunov spectrum and dimension estimates"},
      {"mixing", "coupled pairs with low-mode control and Wasserstein decay"},
      {"lyapunov-check", "Monte-Carlo check of the energy bound and exponential moment"},
      {"validate", "invariant suite: bases, diagnostics, skew-symmetry, OU laws"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("--jobs", jobs, "worker threads for ensembles")->check(CLI::PositiveNumber);
    sub->add_option("--out", out, "output directory (overrides the config)");
    sub->add_option("--snapshot-every", snapshot_every, "write a PGVS snapshot every K steps")
        ->check(CLI::NonNegativeNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pgv::kExitConfig;
  }
  const std::string type = app.get_subcommands().front()->get_name();

  pgv::RunConfig config;
  try {
    const std::string text = config_path.empty() ? std::string("{}") : read_text(config_path);
    config = pgv::parse_config(with_type(text, type));
    if (seed) config.seed = *seed;
    if (out) config.output.dir = *out;
    if (snapshot_every) config.output.snapshot_every = *snapshot_every;
    pgv::validate_config(config);
  } catch (const pgv::ConfigError& e) {
    std::cerr << "pgv: config error: " << e.what() << '\n';
    return pgv::kExitConfig;
  } catch (const pgv::IoError& e) {
    std::cerr << "pgv: " << e.what() << '\n';
    return pgv::kExitIo;
  }

  const pgv::RunResult r = pgv::run(config, pgv::RunOptions{jobs});
  std::ostream& os = r.exit_code == pgv::kExitPass ? std::cout : std::cerr;
  os << "pgv " << type << ": " << r.message << " (exit " << r.exit_code << ", output "
     << config.output.dir << ")\n";
  return r.exit_code;
}
