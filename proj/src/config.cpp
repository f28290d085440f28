#include "pgv/config.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "pgv/errors.hpp"

namespace pgv {

using nlohmann::json;
using nlohmann::ordered_json;

const char* experiment_name(ExperimentType t) {
  switch (t) {
    case ExperimentType::Simulate: return "simulate";
    case ExperimentType::Pullback: return "pullback";
    case ExperimentType::Dimension: return "dimension";
    case ExperimentType::Mixing: return "mixing";
    case ExperimentType::LyapunovCheck: return "lyapunov-check";
    default: return "validate";
  }
}

ExperimentType parse_experiment(const std::string& name) {
  for (auto t : {ExperimentType::Simulate, ExperimentType::Pullback, ExperimentType::Dimension,
                 ExperimentType::Mixing, ExperimentType::LyapunovCheck, ExperimentType::Validate})
    if (name == experiment_name(t)) return t;
  throw ConfigError("experiment.type", "unknown experiment '" + name + "'");
}

namespace {

// Typed access to one JSON object; remembers which keys were consumed so
// that leftovers can be reported as unknown.
class Section {
 public:
  Section(const json* obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (obj_ && !obj_->is_object()) throw ConfigError(path_, "must be an object");
  }

  const json* child(const char* key) {
    used_.insert(key);
    if (!obj_) return nullptr;
    auto it = obj_->find(key);
    return it == obj_->end() ? nullptr : &*it;
  }

  std::string sub(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void read(const char* key, double& dst) {
    if (const json* v = child(key)) {
      if (!v->is_number()) throw ConfigError(sub(key), "must be a number");
      dst = v->get<double>();
    }
  }
  void read(const char* key, int& dst) {
    if (const json* v = child(key)) {
      if (!v->is_number_integer()) throw ConfigError(sub(key), "must be an integer");
      const auto x = v->get<std::int64_t>();
      if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
        throw ConfigError(sub(key), "out of range");
      dst = static_cast<int>(x);
    }
  }
  void read(const char* key, std::uint64_t& dst) {
    if (const json* v = child(key)) {
      if (v->is_number_unsigned()) {
        dst = v->get<std::uint64_t>();
      } else if (v->is_number_integer() && v->get<std::int64_t>() >= 0) {
        dst = static_cast<std::uint64_t>(v->get<std::int64_t>());
      } else {
        throw ConfigError(sub(key), "must be a non-negative integer");
      }
    }
  }
  void read(const char* key, bool& dst) {
    if (const json* v = child(key)) {
      if (!v->is_boolean()) throw ConfigError(sub(key), "must be true or false");
      dst = v->get<bool>();
    }
  }
  void read(const char* key, std::string& dst) {
    if (const json* v = child(key)) {
      if (!v->is_string()) throw ConfigError(sub(key), "must be a string");
      dst = v->get<std::string>();
    }
  }
  void read(const char* key, std::vector<double>& dst) {
    if (const json* v = child(key)) {
      if (!v->is_array()) throw ConfigError(sub(key), "must be an array of numbers");
      std::vector<double> out;
      for (const json& e : *v) {
        if (!e.is_number()) throw ConfigError(sub(key), "must be an array of numbers");
        out.push_back(e.get<double>());
      }
      dst = std::move(out);
    }
  }

  void finish() const {
    if (!obj_) return;
    for (auto it = obj_->begin(); it != obj_->end(); ++it)
      if (!used_.count(it.key())) throw ConfigError(sub(it.key().c_str()), "unknown key");
  }

 private:
  const json* obj_;
  std::string path_;
  std::set<std::string> used_;
};

bool is_multiple(double t, double dt) {
  const double r = t / dt;
  return std::isfinite(r) && std::abs(r - std::round(r)) <= 1e-9 * std::max(1.0, std::abs(r));
}

void require(bool ok, const std::string& path, const std::string& what) {
  if (!ok) throw ConfigError(path, what);
}

void require_steps(double t, double dt, const std::string& path, bool allow_zero = false) {
  require(std::isfinite(t) && (allow_zero ? t >= 0.0 : t > 0.0), path,
          allow_zero ? "must be >= 0" : "must be positive");
  require(is_multiple(t, dt), path, "must be a whole number of integrator steps");
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", std::string("malformed JSON: ") + e.what());
  }
  RunConfig c;
  Section root(&doc, "");
  root.read("seed", c.seed);
  {
    Section s(root.child("domain"), "domain");
    s.read("lx", c.model.domain.lx);
    s.read("ly", c.model.domain.ly);
    s.finish();
  }
  {
    Section s(root.child("resolution"), "resolution");
    s.read("nx", c.model.resolution.nx);
    s.read("ny", c.model.resolution.ny);
    s.read("nz_t", c.model.resolution.nz_t);
    s.read("nz_v", c.model.resolution.nz_v);
    s.read("nz_quad", c.model.resolution.nz_quad);
    s.finish();
  }
  {
    Section s(root.child("physics"), "physics");
    s.read("f", c.model.physics.f);
    s.read("robin_alpha", c.model.physics.robin_alpha);
    s.finish();
  }
  {
    Section s(root.child("noise"), "noise");
    s.read("sigma", c.noise.sigma);
    s.read("decay_q", c.noise.decay_q);
    s.read("n_active", c.noise.n_active);
    s.read("ou_alpha", c.noise.ou_alpha);
    s.read("dt_w", c.noise.dt_w);
    s.finish();
  }
  {
    Section s(root.child("integrator"), "integrator");
    s.read("dt", c.dt);
    std::string scheme = scheme_name(c.scheme);
    s.read("scheme", scheme);
    try {
      c.scheme = parse_scheme(scheme);
    } catch (const InvalidArgument&) {
      throw ConfigError("integrator.scheme", "must be \"imex-h\" or \"exp-euler-direct\"");
    }
    s.finish();
  }
  {
    Section s(root.child("experiment"), "experiment");
    std::string type = experiment_name(c.experiment);
    s.read("type", type);
    c.experiment = parse_experiment(type);
    switch (c.experiment) {
      case ExperimentType::Simulate: {
        SimulateParams& p = c.simulate;
        s.read("horizon", p.horizon);
        s.read("sample_every", p.sample_every);
        s.read("t0_norm", p.t0_norm);
        s.read("t0_modes", p.t0_modes);
        break;
      }
      case ExperimentType::LyapunovCheck: {
        LyapunovCheckParams& p = c.lyapunov;
        s.read("members", p.members);
        s.read("exponential_members", p.exponential_members);
        s.read("horizon", p.horizon);
        s.read("checkpoints", p.checkpoints);
        s.read("t0_norm", p.t0_norm);
        s.read("t0_modes", p.t0_modes);
        s.read("sample_every", p.sample_every);
        s.read("gamma_scale", p.gamma_scale);
        break;
      }
      case ExperimentType::Pullback: {
        PullbackParams& p = c.pullback;
        s.read("starts", p.starts);
        s.read("members", p.members);
        s.read("radius", p.radius);
        s.read("modes", p.modes);
        s.read("burn_in", p.burn_in);
        break;
      }
      case ExperimentType::Dimension: {
        SpectrumParams& p = c.dimension;
        s.read("d", p.d);
        s.read("horizon", p.horizon);
        s.read("spinup", p.spinup);
        s.read("reorth_every", p.reorth_every);
        s.read("linear", p.linear);
        s.read("linear_tolerance", p.linear_tolerance);
        break;
      }
      case ExperimentType::Mixing: {
        MixingParams& p = c.mixing;
        s.read("gain", p.gain);
        s.read("modes", p.modes);
        s.read("mu_threshold", p.mu_threshold);
        s.read("members", p.members);
        s.read("horizon", p.horizon);
        s.read("epsilon", p.epsilon);
        s.read("budget", p.budget);
        s.read("sample_every", p.sample_every);
        s.read("wasserstein_members", p.wasserstein_members);
        s.read("dictionary_modes", p.dictionary_modes);
        s.read("init_modes", p.init_modes);
        s.read("success_threshold", p.success_threshold);
        break;
      }
      case ExperimentType::Validate:
        break;
    }
    s.finish();
  }
  {
    Section s(root.child("output"), "output");
    s.read("dir", c.output.dir);
    s.read("snapshot_every", c.output.snapshot_every);
    s.finish();
  }
  root.finish();
  validate_config(c);
  return c;
}

void validate_config(const RunConfig& c) {
  const auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
  require(positive(c.model.domain.lx), "domain.lx", "must be positive");
  require(positive(c.model.domain.ly), "domain.ly", "must be positive");
  const Resolution& r = c.model.resolution;
  require(r.nx >= 4, "resolution.nx", "must be >= 4");
  require(r.ny >= 4, "resolution.ny", "must be >= 4");
  require(r.nz_t >= 4, "resolution.nz_t", "must be >= 4");
  require(r.nz_v >= 4, "resolution.nz_v", "must be >= 4");
  require(r.nz_quad == 0 || r.nz_quad >= quadrature_floor(std::max(r.nz_t, r.nz_v)),
          "resolution.nz_quad",
          "must be 0 (default) or at least " +
              std::to_string(quadrature_floor(std::max(r.nz_t, r.nz_v))));
  require(std::isfinite(c.model.physics.f), "physics.f", "must be finite");
  require(positive(c.model.physics.robin_alpha), "physics.robin_alpha", "must be positive");

  require(std::isfinite(c.noise.sigma) && c.noise.sigma >= 0.0, "noise.sigma", "must be >= 0");
  require(std::isfinite(c.noise.decay_q), "noise.decay_q", "must be finite");
  require(c.noise.n_active > 0 || c.noise.decay_q >= 1.0, "noise.decay_q",
          "must be >= 1 when every mode is forced (n_active <= 0)");
  require(std::isfinite(c.noise.ou_alpha) && c.noise.ou_alpha >= 0.0, "noise.ou_alpha",
          "must be >= 0");
  require(positive(c.noise.dt_w), "noise.dt_w", "must be positive");

  require(positive(c.dt), "integrator.dt", "must be positive");
  require(is_multiple(c.dt, c.noise.dt_w) && c.dt >= c.noise.dt_w * (1.0 - 1e-12),
          "integrator.dt", "must be a positive integer multiple of noise.dt_w");
  require(c.output.snapshot_every >= 0, "output.snapshot_every", "must be >= 0");

  const double dt = c.dt;
  switch (c.experiment) {
    case ExperimentType::Simulate:
      require_steps(c.simulate.horizon, dt, "experiment.horizon");
      require_steps(c.simulate.sample_every, dt, "experiment.sample_every");
      require(c.simulate.t0_norm >= 0.0, "experiment.t0_norm", "must be >= 0");
      require(c.simulate.t0_modes >= 1, "experiment.t0_modes", "must be >= 1");
      break;
    case ExperimentType::LyapunovCheck: {
      const LyapunovCheckParams& p = c.lyapunov;
      require(p.members >= 2, "experiment.members", "must be >= 2");
      require(p.exponential_members >= 2, "experiment.exponential_members", "must be >= 2");
      require_steps(p.horizon, dt, "experiment.horizon");
      require_steps(p.sample_every, dt, "experiment.sample_every");
      for (double t : p.checkpoints) {
        require_steps(t, dt, "experiment.checkpoints", true);
        require(t <= p.horizon, "experiment.checkpoints", "must not exceed the horizon");
      }
      require(p.t0_norm >= 0.0, "experiment.t0_norm", "must be >= 0");
      require(p.t0_modes >= 1, "experiment.t0_modes", "must be >= 1");
      require(positive(p.gamma_scale), "experiment.gamma_scale", "must be positive");
      break;
    }
    case ExperimentType::Pullback: {
      const PullbackParams& p = c.pullback;
      require(p.starts.size() >= 2, "experiment.starts", "needs at least two start times");
      for (double s : p.starts) {
        require(s < 0.0, "experiment.starts", "must be negative");
        require_steps(-s, dt, "experiment.starts");
      }
      require(p.members >= 2, "experiment.members", "must be >= 2");
      require(positive(p.radius), "experiment.radius", "must be positive");
      require(p.modes >= 1, "experiment.modes", "must be >= 1");
      require_steps(p.burn_in, dt, "experiment.burn_in", true);
      break;
    }
    case ExperimentType::Dimension: {
      const SpectrumParams& p = c.dimension;
      require(p.d >= 1, "experiment.d", "must be >= 1");
      require_steps(p.horizon, dt, "experiment.horizon");
      require_steps(p.spinup, dt, "experiment.spinup", true);
      require(p.reorth_every >= 1, "experiment.reorth_every", "must be >= 1");
      require(positive(p.linear_tolerance), "experiment.linear_tolerance", "must be positive");
      break;
    }
    case ExperimentType::Mixing: {
      const MixingParams& p = c.mixing;
      require(std::isfinite(p.gain) && p.gain >= 0.0, "experiment.gain", "must be >= 0");
      require(positive(p.mu_threshold), "experiment.mu_threshold", "must be positive");
      require(p.members >= 2, "experiment.members", "must be >= 2");
      require_steps(p.horizon, dt, "experiment.horizon");
      require(p.epsilon > 0.0 && p.epsilon <= 1.0, "experiment.epsilon", "must lie in (0, 1]");
      require(std::isfinite(p.budget) && p.budget >= 0.0, "experiment.budget", "must be >= 0");
      require_steps(p.sample_every, dt, "experiment.sample_every");
      require(p.wasserstein_members >= 2, "experiment.wasserstein_members", "must be >= 2");
      require(p.dictionary_modes >= 1, "experiment.dictionary_modes", "must be >= 1");
      require(p.init_modes >= 1, "experiment.init_modes", "must be >= 1");
      require(p.success_threshold >= 0.0 && p.success_threshold <= 1.0,
              "experiment.success_threshold", "must lie in [0, 1]");
      break;
    }
    case ExperimentType::Validate:
      break;
  }
}

IntegratorConfig integrator_config(const RunConfig& c) {
  IntegratorConfig ic;
  ic.dt = c.dt;
  ic.scheme = c.scheme;
  ic.f = c.model.physics.f;
  return ic;
}

ordered_json canonical_json(const RunConfig& c, bool include_output) {
  ordered_json j;
  j["seed"] = c.seed;
  j["domain"] = {{"lx", c.model.domain.lx}, {"ly", c.model.domain.ly}};
  const Resolution& r = c.model.resolution;
  const int nz_quad = r.nz_quad > 0 ? r.nz_quad : default_quadrature_size(r.nz_t, r.nz_v);
  j["resolution"] = {{"nx", r.nx},     {"ny", r.ny},          {"nz_t", r.nz_t},
                     {"nz_v", r.nz_v}, {"nz_quad", nz_quad}};
  j["physics"] = {{"f", c.model.physics.f}, {"robin_alpha", c.model.physics.robin_alpha}};
  j["noise"] = {{"sigma", c.noise.sigma},       {"decay_q", c.noise.decay_q},
                {"n_active", c.noise.n_active}, {"ou_alpha", c.noise.ou_alpha},
                {"dt_w", c.noise.dt_w}};
  j["integrator"] = {{"dt", c.dt}, {"scheme", scheme_name(c.scheme)}};
  ordered_json e;
  e["type"] = experiment_name(c.experiment);
  switch (c.experiment) {
    case ExperimentType::Simulate:
      e["horizon"] = c.simulate.horizon;
      e["sample_every"] = c.simulate.sample_every;
      e["t0_norm"] = c.simulate.t0_norm;
      e["t0_modes"] = c.simulate.t0_modes;
      break;
    case ExperimentType::LyapunovCheck:
      e["members"] = c.lyapunov.members;
      e["exponential_members"] = c.lyapunov.exponential_members;
      e["horizon"] = c.lyapunov.horizon;
      e["checkpoints"] = c.lyapunov.checkpoints;
      e["t0_norm"] = c.lyapunov.t0_norm;
      e["t0_modes"] = c.lyapunov.t0_modes;
      e["sample_every"] = c.lyapunov.sample_every;
      e["gamma_scale"] = c.lyapunov.gamma_scale;
      break;
    case ExperimentType::Pullback:
      e["starts"] = c.pullback.starts;
      e["members"] = c.pullback.members;
      e["radius"] = c.pullback.radius;
      e["modes"] = c.pullback.modes;
      e["burn_in"] = c.pullback.burn_in;
      break;
    case ExperimentType::Dimension:
      e["d"] = c.dimension.d;
      e["horizon"] = c.dimension.horizon;
      e["spinup"] = c.dimension.spinup;
      e["reorth_every"] = c.dimension.reorth_every;
      e["linear"] = c.dimension.linear;
      e["linear_tolerance"] = c.dimension.linear_tolerance;
      break;
    case ExperimentType::Mixing:
      e["gain"] = c.mixing.gain;
      e["modes"] = c.mixing.modes;
      e["mu_threshold"] = c.mixing.mu_threshold;
      e["members"] = c.mixing.members;
      e["horizon"] = c.mixing.horizon;
      e["epsilon"] = c.mixing.epsilon;
      e["budget"] = c.mixing.budget;
      e["sample_every"] = c.mixing.sample_every;
      e["wasserstein_members"] = c.mixing.wasserstein_members;
      e["dictionary_modes"] = c.mixing.dictionary_modes;
      e["init_modes"] = c.mixing.init_modes;
      e["success_threshold"] = c.mixing.success_threshold;
      break;
    case ExperimentType::Validate:
      break;
  }
  j["experiment"] = e;
  if (include_output)
    j["output"] = {{"dir", c.output.dir}, {"snapshot_every", c.output.snapshot_every}};
  return j;
}

}  // namespace pgv
