#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "spdcsim/pdh.hpp"
#include "spdcsim/rates.hpp"
#include "spdcsim/spectral.hpp"
#include "spdcsim/temporal.hpp"

namespace spdcsim {

inline constexpr const char* kToolVersion = "0.1.0";

// Validation failure carrying one "field.path: constraint" message per
// violation.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> messages);
  const std::vector<std::string>& messages() const { return messages_; }

 private:
  std::vector<std::string> messages_;
};

struct ExperimentConfig {
  CavityParams cavity;
  EtalonParams etalon;
  TemporalParams temporal;
  RateParams rates;
  PdhParams pdh;
  double noise_visibility = 0.97;
  double alpha_rad = 0.0;             // PBS relative phase before compensation
  double tomo_mean_counts = 1.0e5;    // mean coincidences per tomography setting
  double chsh_mean_counts = 1.0e4;    // mean coincidences per CHSH angle pair
  long long g2_events = 100000;
  int threads = 1;
  double wavelength_m = 780e-9;
  std::uint64_t seed = 0;

  void validate() const;  // collects all violations into a ConfigError
};

// Paper parameters with the quoted FSR difference of 21 MHz.
ExperimentConfig preset_quoted();

// Paper parameters with the FSR difference back-solved from the quoted
// chi_1/chi_0 = 1.7 (about 6.66 MHz).
ExperimentConfig preset_ratios();

ExperimentConfig preset_by_name(const std::string& name);

// Parses a config document on top of the given defaults. Unknown keys are
// errors; every violation is reported with its field path.
ExperimentConfig validate_config(const nlohmann::json& document,
                                 const ExperimentConfig& defaults);

nlohmann::json config_to_json(const ExperimentConfig& config);

}  // namespace spdcsim
