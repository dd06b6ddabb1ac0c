#pragma once

// Report persistence: JSON reports, CSV series and plot-ready data files.
// All numbers are written with 17 significant digits and no timestamps, so
// identical inputs give identical bytes.

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nlsplit/harness.hpp"

namespace nlsplit {

nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// Parses a configuration object. Unknown keys and ill-typed values throw
/// ValidationError naming the key. `output_dir` is accepted and returned
/// through the optional out-parameter.
ExperimentConfig config_from_json(const nlohmann::json& j, std::string* output_dir = nullptr);

/// Reads and parses a configuration file; parse errors carry line and column.
ExperimentConfig load_config(const std::filesystem::path& path, std::string* output_dir = nullptr);

nlohmann::json report_to_json(const ExperimentReport& report);
std::string format_number(double x);

inline constexpr const char* kSeriesHeader = "t,mass,h1_sq,energy,e_dev_scaled,h1_dev_scaled";

std::string series_to_csv(const Series& s);

/// Writes <stem>.json and one <stem>_<label>.csv per series. Returns the
/// paths written.
std::vector<std::filesystem::path> write_report(const ExperimentReport& report,
                                                const std::filesystem::path& dir,
                                                const std::string& stem);

/// Writes <stem>_<label>.dat (columns t, e_dev_scaled) for every series and
/// <stem>_fits.dat holding one block per fit (x, y, fitted y), blocks
/// separated by a blank line.
std::vector<std::filesystem::path> emit_plot_data(const ExperimentReport& report,
                                                  const std::filesystem::path& dir,
                                                  const std::string& stem);

}  // namespace nlsplit
