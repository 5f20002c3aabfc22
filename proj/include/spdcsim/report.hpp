#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "spdcsim/config.hpp"

namespace spdcsim {

// Thrown for missing or unwritable files; maps to the I/O exit code.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Structured result document: command, resolved config echo, results
// payload, tool version and timestamp. Re-running with the echoed config and
// seed reproduces the results payload byte for byte.
nlohmann::json make_report(const std::string& command,
                           const ExperimentConfig& config,
                           const nlohmann::json& results);

// ISO-8601 UTC timestamp; honors SOURCE_DATE_EPOCH so reports can be made
// byte-identical for reproducibility checks.
std::string report_timestamp();

void write_text_file(const std::filesystem::path& path,
                     const std::string& contents);

std::string read_text_file(const std::filesystem::path& path);

// Minimal CSV writer: header row with unit-suffixed column names, then rows.
std::string csv_document(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows);

std::string format_double(double value);

}  // namespace spdcsim
