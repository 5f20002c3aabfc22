#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "spdcsim/config.hpp"
#include "spdcsim/report.hpp"
#include "spdcsim/tomography.hpp"

namespace spdcsim {

// Thrown when an iterative command fails to converge; maps to exit code 3.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Executes one named pipeline, writing its CSV outputs and one structured
// report <command>_report.json into out_dir. Commands reading tabular input
// (tomo-reconstruct, g2-fit, rates-fit) take it from input_path.
// Returns the report document.
nlohmann::json run_command(const std::string& command,
                           const ExperimentConfig& config,
                           const std::filesystem::path& out_dir,
                           const std::optional<std::filesystem::path>& input_path = {});

// CSV codecs for the external file formats.
std::string histogram_to_csv(const Histogram& hist);
Histogram histogram_from_csv(const std::string& text);
std::string count_records_to_csv(const std::vector<CountRecord>& records);
std::vector<CountRecord> count_records_from_csv(const std::string& text);
std::string power_points_to_csv(const std::vector<PowerRatePoint>& points);
std::vector<PowerRatePoint> power_points_from_csv(const std::string& text);

}  // namespace spdcsim
