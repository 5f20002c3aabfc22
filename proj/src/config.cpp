#include "spdcsim/config.hpp"

#include <cmath>
#include <sstream>

namespace spdcsim {

namespace {

std::string join_messages(const std::vector<std::string>& messages) {
  std::ostringstream out;
  out << "invalid configuration:";
  for (const auto& message : messages) out << "\n  " << message;
  return out.str();
}

class Parser {
 public:
  void object(const nlohmann::json& node, const std::string& path,
              const std::vector<std::string>& known_keys) {
    if (!node.is_object()) {
      errors_.push_back(path + ": expected an object");
      return;
    }
    for (const auto& [key, value] : node.items()) {
      (void)value;
      bool known = false;
      for (const auto& candidate : known_keys)
        if (key == candidate) known = true;
      if (!known)
        errors_.push_back((path.empty() ? key : path + "." + key) +
                          ": unknown key");
    }
  }

  template <typename T>
  void number(const nlohmann::json& node, const std::string& key,
              const std::string& path, T& target) {
    if (!node.contains(key)) return;
    const auto& value = node.at(key);
    if (!value.is_number()) {
      errors_.push_back(path + ": expected a number");
      return;
    }
    target = value.get<T>();
  }

  std::vector<std::string>& errors() { return errors_; }

 private:
  std::vector<std::string> errors_;
};

void check(bool ok, const std::string& message,
           std::vector<std::string>& errors) {
  if (!ok) errors.push_back(message);
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> messages)
    : std::runtime_error(join_messages(messages)),
      messages_(std::move(messages)) {}

void ExperimentConfig::validate() const {
  std::vector<std::string> errors;
  auto collect = [&errors](const auto& params) {
    try {
      params.validate();
    } catch (const std::invalid_argument& error) {
      errors.emplace_back(error.what());
    }
  };
  collect(cavity);
  collect(etalon);
  collect(temporal);
  collect(rates);
  collect(pdh);
  check(noise_visibility >= 0.0 && noise_visibility <= 1.0,
        "noise_visibility: must be in [0, 1]", errors);
  check(tomo_mean_counts > 0.0, "tomo.mean_counts_per_setting: must be > 0",
        errors);
  check(chsh_mean_counts > 0.0, "chsh.mean_counts_per_pair: must be > 0",
        errors);
  check(g2_events > 0, "g2.n_events: must be > 0", errors);
  check(threads >= 1, "g2.threads: must be >= 1", errors);
  check(wavelength_m > 0.0, "coherence.wavelength_m: must be > 0", errors);
  if (!errors.empty()) throw ConfigError(std::move(errors));
}

ExperimentConfig preset_quoted() {
  ExperimentConfig config;  // defaults are the reference source parameters
  config.cavity.fsr_diff_hz = 21.0e6;
  config.pdh.cavity = config.cavity;
  return config;
}

ExperimentConfig preset_ratios() {
  ExperimentConfig config;
  config.cavity.fsr_diff_hz =
      back_solve_fsr_diff(1.7, 1, config.cavity.finesse,
                          config.cavity.fsr_mean_hz);
  config.pdh.cavity = config.cavity;
  return config;
}

ExperimentConfig preset_by_name(const std::string& name) {
  if (name == "quoted") return preset_quoted();
  if (name == "ratios") return preset_ratios();
  throw ConfigError({"preset: unknown preset '" + name +
                     "' (expected quoted or ratios)"});
}

ExperimentConfig validate_config(const nlohmann::json& document,
                                 const ExperimentConfig& defaults) {
  ExperimentConfig config = defaults;
  Parser parser;

  parser.object(document, "",
                {"cavity", "etalon", "temporal", "rates", "pdh", "entangle",
                 "tomo", "chsh", "g2", "coherence", "noise_visibility",
                 "seed"});

  if (document.contains("cavity")) {
    const auto& node = document.at("cavity");
    parser.object(node, "cavity",
                  {"fsr_mean_hz", "fsr_diff_hz", "finesse",
                   "center_frequency_hz", "n_side_modes",
                   "phase_matching_bandwidth_hz"});
    if (node.is_object()) {
      parser.number(node, "fsr_mean_hz", "cavity.fsr_mean_hz",
                    config.cavity.fsr_mean_hz);
      parser.number(node, "fsr_diff_hz", "cavity.fsr_diff_hz",
                    config.cavity.fsr_diff_hz);
      parser.number(node, "finesse", "cavity.finesse", config.cavity.finesse);
      parser.number(node, "center_frequency_hz", "cavity.center_frequency_hz",
                    config.cavity.center_frequency_hz);
      parser.number(node, "n_side_modes", "cavity.n_side_modes",
                    config.cavity.n_side_modes);
      parser.number(node, "phase_matching_bandwidth_hz",
                    "cavity.phase_matching_bandwidth_hz",
                    config.cavity.phase_matching_bandwidth_hz);
    }
  }
  if (document.contains("etalon")) {
    const auto& node = document.at("etalon");
    parser.object(node, "etalon", {"fsr_hz", "finesse"});
    if (node.is_object()) {
      parser.number(node, "fsr_hz", "etalon.fsr_hz", config.etalon.fsr_hz);
      parser.number(node, "finesse", "etalon.finesse", config.etalon.finesse);
    }
  }
  if (document.contains("temporal")) {
    const auto& node = document.at("temporal");
    parser.object(node, "temporal",
                  {"linewidth_hz", "round_trip_time_s",
                   "detector_jitter_fwhm_s", "tac_resolution_s", "bin_width_s",
                   "window_half_width_s"});
    if (node.is_object()) {
      parser.number(node, "linewidth_hz", "temporal.linewidth_hz",
                    config.temporal.linewidth_hz);
      parser.number(node, "round_trip_time_s", "temporal.round_trip_time_s",
                    config.temporal.round_trip_time_s);
      parser.number(node, "detector_jitter_fwhm_s",
                    "temporal.detector_jitter_fwhm_s",
                    config.temporal.detector_jitter_fwhm_s);
      parser.number(node, "tac_resolution_s", "temporal.tac_resolution_s",
                    config.temporal.tac_resolution_s);
      parser.number(node, "bin_width_s", "temporal.bin_width_s",
                    config.temporal.bin_width_s);
      parser.number(node, "window_half_width_s",
                    "temporal.window_half_width_s",
                    config.temporal.window_half_width_s);
    }
  }
  if (document.contains("rates")) {
    const auto& node = document.at("rates");
    parser.object(node, "rates",
                  {"rate_per_mw_cps", "threshold_power_w", "linewidth_mhz",
                   "duty_factor"});
    if (node.is_object()) {
      parser.number(node, "rate_per_mw_cps", "rates.rate_per_mw_cps",
                    config.rates.rate_per_mw_cps);
      parser.number(node, "threshold_power_w", "rates.threshold_power_w",
                    config.rates.threshold_power_w);
      parser.number(node, "linewidth_mhz", "rates.linewidth_mhz",
                    config.rates.linewidth_mhz);
      parser.number(node, "duty_factor", "rates.duty_factor",
                    config.rates.duty_factor);
    }
  }
  if (document.contains("pdh")) {
    const auto& node = document.at("pdh");
    parser.object(node, "pdh",
                  {"modulation_frequency_hz", "mirror_reflectivity_1",
                   "mirror_reflectivity_2", "round_trip_loss",
                   "v_resonance_offset_hz"});
    if (node.is_object()) {
      parser.number(node, "modulation_frequency_hz",
                    "pdh.modulation_frequency_hz",
                    config.pdh.modulation_frequency_hz);
      parser.number(node, "mirror_reflectivity_1", "pdh.mirror_reflectivity_1",
                    config.pdh.mirror_reflectivity_1);
      parser.number(node, "mirror_reflectivity_2", "pdh.mirror_reflectivity_2",
                    config.pdh.mirror_reflectivity_2);
      parser.number(node, "round_trip_loss", "pdh.round_trip_loss",
                    config.pdh.round_trip_loss);
      parser.number(node, "v_resonance_offset_hz", "pdh.v_resonance_offset_hz",
                    config.pdh.v_resonance_offset_hz);
    }
  }
  if (document.contains("entangle")) {
    const auto& node = document.at("entangle");
    parser.object(node, "entangle", {"alpha_rad"});
    if (node.is_object())
      parser.number(node, "alpha_rad", "entangle.alpha_rad", config.alpha_rad);
  }
  if (document.contains("tomo")) {
    const auto& node = document.at("tomo");
    parser.object(node, "tomo", {"mean_counts_per_setting"});
    if (node.is_object())
      parser.number(node, "mean_counts_per_setting",
                    "tomo.mean_counts_per_setting", config.tomo_mean_counts);
  }
  if (document.contains("chsh")) {
    const auto& node = document.at("chsh");
    parser.object(node, "chsh", {"mean_counts_per_pair"});
    if (node.is_object())
      parser.number(node, "mean_counts_per_pair", "chsh.mean_counts_per_pair",
                    config.chsh_mean_counts);
  }
  if (document.contains("g2")) {
    const auto& node = document.at("g2");
    parser.object(node, "g2", {"n_events", "threads"});
    if (node.is_object()) {
      parser.number(node, "n_events", "g2.n_events", config.g2_events);
      parser.number(node, "threads", "g2.threads", config.threads);
    }
  }
  if (document.contains("coherence")) {
    const auto& node = document.at("coherence");
    parser.object(node, "coherence", {"wavelength_m"});
    if (node.is_object())
      parser.number(node, "wavelength_m", "coherence.wavelength_m",
                    config.wavelength_m);
  }
  if (document.contains("noise_visibility"))
    parser.number(document, "noise_visibility", "noise_visibility",
                  config.noise_visibility);
  if (document.contains("seed")) {
    const auto& value = document.at("seed");
    if (!value.is_number_integer() ||
        (value.is_number_integer() && !value.is_number_unsigned() &&
         value.get<std::int64_t>() < 0))
      parser.errors().push_back("seed: expected an unsigned integer");
    else
      config.seed = value.get<std::uint64_t>();
  }

  // Keep the PDH cavity parameters in lockstep with the cavity section.
  config.pdh.cavity = config.cavity;

  if (!parser.errors().empty()) throw ConfigError(std::move(parser.errors()));
  config.validate();
  return config;
}

nlohmann::json config_to_json(const ExperimentConfig& config) {
  return nlohmann::json{
      {"cavity",
       {{"fsr_mean_hz", config.cavity.fsr_mean_hz},
        {"fsr_diff_hz", config.cavity.fsr_diff_hz},
        {"finesse", config.cavity.finesse},
        {"center_frequency_hz", config.cavity.center_frequency_hz},
        {"n_side_modes", config.cavity.n_side_modes},
        {"phase_matching_bandwidth_hz",
         config.cavity.phase_matching_bandwidth_hz}}},
      {"etalon",
       {{"fsr_hz", config.etalon.fsr_hz},
        {"finesse", config.etalon.finesse}}},
      {"temporal",
       {{"linewidth_hz", config.temporal.linewidth_hz},
        {"round_trip_time_s", config.temporal.round_trip_time_s},
        {"detector_jitter_fwhm_s", config.temporal.detector_jitter_fwhm_s},
        {"tac_resolution_s", config.temporal.tac_resolution_s},
        {"bin_width_s", config.temporal.bin_width_s},
        {"window_half_width_s", config.temporal.window_half_width_s}}},
      {"rates",
       {{"rate_per_mw_cps", config.rates.rate_per_mw_cps},
        {"threshold_power_w", config.rates.threshold_power_w},
        {"linewidth_mhz", config.rates.linewidth_mhz},
        {"duty_factor", config.rates.duty_factor}}},
      {"pdh",
       {{"modulation_frequency_hz", config.pdh.modulation_frequency_hz},
        {"mirror_reflectivity_1", config.pdh.mirror_reflectivity_1},
        {"mirror_reflectivity_2", config.pdh.mirror_reflectivity_2},
        {"round_trip_loss", config.pdh.round_trip_loss},
        {"v_resonance_offset_hz", config.pdh.v_resonance_offset_hz}}},
      {"entangle", {{"alpha_rad", config.alpha_rad}}},
      {"tomo", {{"mean_counts_per_setting", config.tomo_mean_counts}}},
      {"chsh", {{"mean_counts_per_pair", config.chsh_mean_counts}}},
      {"g2", {{"n_events", config.g2_events}, {"threads", config.threads}}},
      {"coherence", {{"wavelength_m", config.wavelength_m}}},
      {"noise_visibility", config.noise_visibility},
      {"seed", config.seed}};
}

}  // namespace spdcsim
