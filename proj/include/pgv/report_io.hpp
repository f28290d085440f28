#ifndef PGV_REPORT_IO_HPP
#define PGV_REPORT_IO_HPP
// Deterministic serialization of experiment reports: JSON summaries and
// CSV series. Numbers use the shortest round-trip decimal form.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pgv/experiments.hpp"
#include "pgv/validation.hpp"

namespace pgv {

std::string format_number(double x);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  void add(const std::vector<double>& values);
  std::string str() const;
};

nlohmann::ordered_json to_json(const SimulateReport& r);
nlohmann::ordered_json to_json(const LyapunovCheckReport& r);
nlohmann::ordered_json to_json(const PullbackReport& r);
nlohmann::ordered_json to_json(const SpectrumReport& r);
nlohmann::ordered_json to_json(const MixingReport& r);
nlohmann::ordered_json to_json(const ValidationReport& r);

CsvTable series(const SimulateReport& r);
CsvTable series(const LyapunovCheckReport& r);
CsvTable series(const PullbackReport& r);
CsvTable series(const SpectrumReport& r);
CsvTable series(const MixingReport& r);
CsvTable series(const ValidationReport& r);

/// Pretty-printed JSON with a trailing newline.
std::string dump_json(const nlohmann::ordered_json& j);

/// Throws IoError on failure.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace pgv

#endif  // PGV_REPORT_IO_HPP
