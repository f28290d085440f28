#include "pgv/report_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "pgv/errors.hpp"

namespace pgv {

using nlohmann::ordered_json;

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void CsvTable::add(const std::vector<double>& values) {
  std::vector<std::string> row;
  row.reserve(values.size());
  for (double v : values) row.push_back(format_number(v));
  rows.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::string out;
  const auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

namespace {
// nlohmann writes non-finite doubles as null; keep them readable instead.
ordered_json num(double x) {
  if (std::isfinite(x)) return x;
  return format_number(x);
}
}  // namespace

ordered_json to_json(const SimulateReport& r) {
  ordered_json j;
  j["lambda1"] = num(r.lambda1);
  j["b0"] = num(r.b0);
  j["max_diagnostic_residual"] = num(r.max_residual);
  if (!r.rows.empty()) {
    const EnergyRow& e = r.rows.back();
    j["final"] = {{"t", num(e.t)},   {"h2", num(e.h2)},
                  {"v2", num(e.v2)}, {"dissipation", num(e.dissipation)},
                  {"e_t", num(e.e_t)}, {"sup_excess", num(e.sup_excess)}};
  }
  j["pass"] = true;
  return j;
}

ordered_json to_json(const LyapunovCheckReport& r) {
  ordered_json j;
  j["lambda1"] = num(r.lambda1);
  j["b0"] = num(r.b0);
  j["c1"] = num(r.c1);
  j["t0_h2"] = num(r.t0_h2);
  ordered_json cps = ordered_json::array();
  for (const auto& c : r.checkpoints)
    cps.push_back({{"t", num(c.t)},
                   {"mean_h2", num(c.mean_h2)},
                   {"se", num(c.se)},
                   {"bound", num(c.bound)},
                   {"pass", c.pass}});
  j["checkpoints"] = cps;
  j["structure_pass"] = r.structure_pass;
  j["exponential"] = {{"applicable", r.b0 > 0.0},
                      {"gamma", num(r.gamma)},
                      {"mean", num(r.exp_mean)},
                      {"se", num(r.exp_se)},
                      {"bound", num(r.exp_bound)},
                      {"heavy_tail_warning", r.heavy_tail},
                      {"pass", r.exponential_pass}};
  j["pass"] = r.pass;
  return j;
}

ordered_json to_json(const PullbackReport& r) {
  ordered_json j;
  j["lambda1"] = num(r.lambda1);
  j["z0_v"] = num(r.z0_v);
  ordered_json rows = ordered_json::array();
  for (const auto& x : r.rows)
    rows.push_back({{"s", num(x.s)},
                    {"diameter_h", num(x.diameter_h)},
                    {"diameter_v", num(x.diameter_v)},
                    {"max_v_t", num(x.max_v_t)},
                    {"max_v_h", num(x.max_v_h)},
                    {"r2", num(x.r2)}});
  j["starts"] = rows;
  j["fitted_rate"] = num(r.fitted_rate);
  j["rate_threshold"] = num(r.rate_threshold);
  j["monotone"] = r.monotone;
  j["r2_relative_change"] = num(r.r2_relative_change);
  j["r2_stable"] = r.r2_stable;
  j["pass"] = r.pass;
  return j;
}

ordered_json to_json(const SpectrumReport& r) {
  ordered_json j;
  ordered_json ex = ordered_json::array(), ps = ordered_json::array(),
               ref = ordered_json::array();
  for (double e : r.exponents) ex.push_back(num(e));
  for (double e : r.partial_sums) ps.push_back(num(e));
  for (double e : r.reference) ref.push_back(num(e));
  j["exponents"] = ex;
  j["partial_sums"] = ps;
  j["d_star"] = r.d_star ? ordered_json(*r.d_star) : ordered_json(nullptr);
  j["kaplan_yorke"] = num(r.kaplan_yorke);
  j["converged"] = r.converged;
  j["eventually_decreasing"] = r.eventually_decreasing;
  j["reference_minus_lambda"] = ref;
  j["linear_error"] = r.linear_error ? num(*r.linear_error) : ordered_json(nullptr);
  j["pass"] = r.pass;
  return j;
}

ordered_json to_json(const MixingReport& r) {
  ordered_json j;
  j["modes"] = r.modes;
  j["mu_next"] = num(r.mu_next);
  j["gain"] = num(r.gain);
  j["c1"] = num(r.c1);
  j["budget"] = num(r.budget);
  j["epsilon"] = num(r.epsilon);
  j["fit_window"] = {num(r.fit_from), num(r.fit_to)};
  j["moment_rate"] = num(r.moment_rate);
  j["moment_rate_threshold"] = num(-r.epsilon);
  j["moment_prefactor"] = num(r.moment_prefactor);
  j["decay_pass"] = r.decay_pass;
  j["success_fraction"] = num(r.success_fraction);
  j["success_pass"] = r.success_pass;
  j["cost"] = {{"median", num(r.cost_median)}, {"p90", num(r.cost_p90)},
               {"max", num(r.cost_max)}};
  j["wasserstein_rate"] = num(r.wasserstein_rate);
  j["wasserstein_pass"] = r.wasserstein_pass;
  j["pass"] = r.pass;
  return j;
}

ordered_json to_json(const ValidationReport& r) {
  ordered_json j;
  ordered_json checks = ordered_json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name},
                      {"value", num(c.value)},
                      {"tolerance", num(c.tolerance)},
                      {"pass", c.pass}});
  j["checks"] = checks;
  j["regularity"] = {{"samples", r.regularity.samples},
                     {"h1_ratio", num(r.regularity.h1_ratio)},
                     {"h2_ratio", num(r.regularity.h2_ratio)},
                     {"h1_operator", num(r.regularity.h1_operator)},
                     {"h2_operator", num(r.regularity.h2_operator)}};
  j["pass"] = r.pass;
  return j;
}

CsvTable series(const SimulateReport& r) {
  CsvTable t{{"t", "h2", "v2", "dissipation", "e_t", "sup_excess"}, {}};
  for (const auto& e : r.rows) t.add({e.t, e.h2, e.v2, e.dissipation, e.e_t, e.sup_excess});
  return t;
}

CsvTable series(const LyapunovCheckReport& r) {
  CsvTable t{{"t", "mean_h2", "se_h2", "bound", "mean_v2", "mean_e_t"}, {}};
  for (const auto& e : r.series) t.add({e.t, e.mean_h2, e.se_h2, e.bound, e.mean_v2, e.mean_e_t});
  return t;
}

CsvTable series(const PullbackReport& r) {
  CsvTable t{{"s", "diameter_h", "diameter_v", "max_v_t", "max_v_h", "r2"}, {}};
  for (const auto& e : r.rows)
    t.add({e.s, e.diameter_h, e.diameter_v, e.max_v_t, e.max_v_h, e.r2});
  return t;
}

CsvTable series(const SpectrumReport& r) {
  CsvTable t;
  t.header.push_back("t");
  for (std::size_t j = 0; j < r.exponents.size(); ++j)
    t.header.push_back("running_" + std::to_string(j + 1));
  for (const auto& row : r.series) {
    std::vector<double> v{row.t};
    v.insert(v.end(), row.running.begin(), row.running.end());
    t.add(v);
  }
  return t;
}

CsvTable series(const MixingReport& r) {
  CsvTable t{{"t", "mean_r", "mean_r_v", "mean_cost", "moment", "moment_se", "wasserstein",
              "marginal_w1"},
             {}};
  for (const auto& e : r.rows)
    t.add({e.t, e.mean_r, e.mean_r_v, e.mean_cost, e.moment, e.moment_se, e.wasserstein,
           e.marginal_w1});
  return t;
}

CsvTable series(const ValidationReport& r) {
  CsvTable t{{"check", "value", "tolerance", "pass"}, {}};
  for (const auto& c : r.checks)
    t.rows.push_back({c.name, format_number(c.value), format_number(c.tolerance),
                      c.pass ? "1" : "0"});
  return t;
}

std::string dump_json(const ordered_json& j) { return j.dump(2) + "\n"; }

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!os) throw IoError("failed writing " + path.string());
}

}  // namespace pgv
