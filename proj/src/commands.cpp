#include "spdcsim/commands.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "spdcsim/entanglement.hpp"
#include "spdcsim/polarization.hpp"
#include "spdcsim/rng.hpp"
#include "spdcsim/tomography.hpp"

namespace spdcsim {

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text,
                                                const std::string& header) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty CSV document");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header)
    throw IoError("unexpected CSV header '" + line + "', expected '" + header +
                  "'");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream fields_in(line);
    std::string field;
    while (std::getline(fields_in, field, ',')) fields.push_back(field);
    rows.push_back(std::move(fields));
  }
  return rows;
}

double parse_number(const std::string& field) {
  std::size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(field, &consumed);
  } catch (const std::exception&) {
    consumed = 0;
  }
  if (consumed != field.size())
    throw IoError("malformed numeric field '" + field + "'");
  return value;
}

long long parse_integer(const std::string& field) {
  std::size_t consumed = 0;
  long long value = 0;
  try {
    value = std::stoll(field, &consumed);
  } catch (const std::exception&) {
    consumed = 0;
  }
  if (consumed != field.size())
    throw IoError("malformed integer field '" + field + "'");
  return value;
}

std::string joint_spectrum_to_csv(const JointSpectrum& joint) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& term : joint.terms)
    rows.push_back({std::to_string(term.mode_index),
                    format_double(term.detuning_h_hz),
                    format_double(term.weight)});
  return csv_document({"m", "detuning_hz", "weight"}, rows);
}

nlohmann::json state_to_json(const TwoPhotonState& state) {
  // 16 complex entries, row-major over {HH, HV, VH, VV}.
  nlohmann::json entries = nlohmann::json::array();
  const auto& rho = state.density_matrix();
  for (int row = 0; row < 4; ++row)
    for (int col = 0; col < 4; ++col)
      entries.push_back({rho(row, col).real(), rho(row, col).imag()});
  return entries;
}

nlohmann::json tables_to_json(const MatrixTables& tables) {
  auto table = [](const Eigen::Matrix4d& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < 4; ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (int c = 0; c < 4; ++c) row.push_back(m(r, c));
      rows.push_back(row);
    }
    return rows;
  };
  return {{"real_part", table(tables.real_part)},
          {"imag_part", table(tables.imag_part)}};
}

// The entanglement-generation pipeline shared by several commands:
// PBS interference of |+> and |->, phase compensation, Werner noise.
TwoPhotonState source_state(const ExperimentConfig& config,
                            double* success_probability = nullptr) {
  const PbsOutcome outcome = pbs_interfere(pol::diagonal(), pol::antidiagonal(),
                                           config.alpha_rad);
  if (!outcome.state)
    throw std::domain_error("PBS post-selection produced no coincidences");
  if (success_probability) *success_probability = outcome.success_probability;
  const TwoPhotonState compensated =
      phase_compensate(*outcome.state, config.alpha_rad);
  return apply_werner_noise(compensated, config.noise_visibility);
}

std::filesystem::path require_input(
    const std::optional<std::filesystem::path>& input_path,
    const std::string& command) {
  if (!input_path)
    throw IoError(command + " requires --input <csv path>");
  return *input_path;
}

}  // namespace

std::string histogram_to_csv(const Histogram& hist) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"total_events", std::to_string(hist.total_events)});
  for (std::size_t i = 0; i < hist.bins(); ++i)
    rows.push_back({format_double(hist.bin_center(i)),
                    std::to_string(hist.counts[i])});
  return csv_document({"tau_s", "count"}, rows);
}

Histogram histogram_from_csv(const std::string& text) {
  const auto rows = parse_csv(text, "tau_s,count");
  Histogram hist;
  std::vector<double> centers;
  for (const auto& row : rows) {
    if (row.size() != 2) throw IoError("histogram rows need two fields");
    if (row[0] == "total_events") {
      hist.total_events = parse_integer(row[1]);
      continue;
    }
    centers.push_back(parse_number(row[0]));
    hist.counts.push_back(parse_integer(row[1]));
  }
  if (centers.size() < 2) throw IoError("histogram needs at least two bins");
  const double width = centers[1] - centers[0];
  if (!(width > 0.0)) throw IoError("histogram bin centers must increase");
  hist.bin_edges_s.resize(centers.size() + 1);
  for (std::size_t i = 0; i < centers.size(); ++i)
    hist.bin_edges_s[i] = centers[i] - 0.5 * width;
  hist.bin_edges_s.back() = centers.back() + 0.5 * width;
  if (hist.total_events == 0)
    for (long long c : hist.counts) hist.total_events += c;
  return hist;
}

std::string count_records_to_csv(const std::vector<CountRecord>& records) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& record : records)
    rows.push_back({record.setting.label, std::to_string(record.counts),
                    format_double(record.exposure_s)});
  return csv_document({"setting", "counts", "exposure_s"}, rows);
}

std::vector<CountRecord> count_records_from_csv(const std::string& text) {
  const auto rows = parse_csv(text, "setting,counts,exposure_s");
  std::vector<CountRecord> records;
  for (const auto& row : rows) {
    if (row.size() != 3) throw IoError("count rows need three fields");
    CountRecord record;
    try {
      record.setting = setting_from_label(row[0]);
    } catch (const std::invalid_argument& err) {
      throw IoError(err.what());
    }
    record.counts = parse_integer(row[1]);
    record.exposure_s = parse_number(row[2]);
    records.push_back(std::move(record));
  }
  return records;
}

std::string power_points_to_csv(const std::vector<PowerRatePoint>& points) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& point : points)
    rows.push_back({format_double(point.power_mw),
                    format_double(point.rate_cps)});
  return csv_document({"power_mw", "rate_cps"}, rows);
}

std::vector<PowerRatePoint> power_points_from_csv(const std::string& text) {
  const auto rows = parse_csv(text, "power_mw,rate_cps");
  std::vector<PowerRatePoint> points;
  for (const auto& row : rows) {
    if (row.size() != 2) throw IoError("power-rate rows need two fields");
    points.push_back({parse_number(row[0]), parse_number(row[1])});
  }
  return points;
}

nlohmann::json run_command(
    const std::string& command, const ExperimentConfig& config,
    const std::filesystem::path& out_dir,
    const std::optional<std::filesystem::path>& input_path) {
  config.validate();
  std::filesystem::create_directories(out_dir);
  nlohmann::json results;

  if (command == "spectrum") {
    const JointSpectrum joint = build_joint_spectrum(config.cavity);
    const JointSpectrum filtered = filtered_spectrum(joint, config.etalon);
    write_text_file(out_dir / "spectrum.csv", joint_spectrum_to_csv(joint));
    write_text_file(out_dir / "spectrum_filtered.csv",
                    joint_spectrum_to_csv(filtered));
    nlohmann::json ratios = nlohmann::json::array();
    for (int m = 1; m <= std::min(3, config.cavity.n_side_modes); ++m)
      ratios.push_back(mode_weight_ratio(config.cavity, m));
    results = {{"mode_weight_ratios", ratios},
               {"background_fraction", background_fraction(config.cavity)},
               {"single_mode_purity", single_mode_purity(joint)},
               {"filtered_single_mode_purity", single_mode_purity(filtered)}};
  } else if (command == "entangle") {
    double success = 0.0;
    const TwoPhotonState state = source_state(config, &success);
    results = {{"success_probability", success},
               {"fidelity_phi_minus", fidelity(state, bell_phi_minus())},
               {"density_matrix", state_to_json(state)}};
  } else if (command == "chsh") {
    const TwoPhotonState state = source_state(config);
    const ChshAngles angles = optimize_chsh_angles(state);
    const ChshResult exact = chsh_s(state, angles);
    const ChshResult sampled =
        chsh_with_counts(state, angles, config.chsh_mean_counts, config.seed);
    results = {{"s_value", exact.s_value},
               {"angles_deg",
                {angles.phi_a * 180.0 / M_PI, angles.phi_a_prime * 180.0 / M_PI,
                 angles.phi_b * 180.0 / M_PI,
                 angles.phi_b_prime * 180.0 / M_PI}},
               {"s_from_counts", sampled.s_value},
               {"std_dev", *sampled.std_dev},
               {"violation_sigmas",
                violation_sigmas(sampled.s_value, *sampled.std_dev)}};
  } else if (command == "tomo-simulate") {
    const TwoPhotonState state = source_state(config);
    const auto records = simulate_counts(state, standard_settings(),
                                         config.tomo_mean_counts, config.seed);
    write_text_file(out_dir / "tomo_counts.csv", count_records_to_csv(records));
    long long total = 0;
    for (const auto& record : records) total += record.counts;
    results = {{"settings", records.size()}, {"total_counts", total}};
  } else if (command == "tomo-reconstruct") {
    const auto records = count_records_from_csv(
        read_text_file(require_input(input_path, command)));
    const Eigen::Matrix4cd linear = linear_reconstruct(records);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(
        linear, Eigen::EigenvaluesOnly);
    const ReconstructionResult reconstruction = mle_reconstruct(records);
    results = {{"fidelity_phi_minus",
                fidelity(reconstruction.density_matrix, bell_phi_minus())},
               {"log_likelihood", reconstruction.log_likelihood},
               {"iterations", reconstruction.iterations},
               {"converged", reconstruction.converged},
               {"linear_min_eigenvalue", solver.eigenvalues().minCoeff()},
               {"density_matrix",
                state_to_json(reconstruction.density_matrix)}};
    results.update(tables_to_json(report_matrix(reconstruction.density_matrix)));
    if (!reconstruction.converged)
      throw ConvergenceError("tomography MLE did not converge");
  } else if (command == "g2-sample") {
    const Histogram hist = sample_coincidences(config.temporal,
                                               config.g2_events, config.seed,
                                               config.threads);
    write_text_file(out_dir / "g2_histogram.csv", histogram_to_csv(hist));
    long long inside = 0;
    double sum_abs = 0.0;
    for (std::size_t i = 0; i < hist.bins(); ++i) {
      inside += hist.counts[i];
      sum_abs += std::abs(hist.bin_center(i)) *
                 static_cast<double>(hist.counts[i]);
    }
    results = {{"events", hist.total_events},
               {"events_in_window", inside},
               {"mean_abs_tau_s", inside > 0 ? sum_abs / inside : 0.0}};
  } else if (command == "g2-fit") {
    const Histogram hist = histogram_from_csv(
        read_text_file(require_input(input_path, command)));
    const FitResult fit = fit_linewidth(hist);
    results = {{"linewidth_hz", fit.parameters[0]},
               {"c0", fit.parameters[1]},
               {"linewidth_stderr_hz", fit.std_errors[0]},
               {"c0_stderr", fit.std_errors[1]},
               {"fwhm_ns", std::log(2.0) / (M_PI * fit.parameters[0]) * 1e9},
               {"residual_norm", fit.residual_norm},
               {"converged", fit.converged}};
    if (!fit.converged)
      throw ConvergenceError("linewidth fit did not converge");
  } else if (command == "coherence") {
    const double length =
        coherence_length(config.temporal.linewidth_hz, config.wavelength_m);
    // Synthetic visibility-decay measurement refit as a self check.
    Rng rng(substream_seed(config.seed, 0));
    std::vector<VisibilityPoint> points;
    for (int i = 0; i < 12; ++i) {
      const double x = length * (0.2 * i);
      const double v = visibility_vs_delay(x, 0.97, length) *
                       (1.0 + 0.02 * rng.gaussian());
      points.push_back({x, std::max(v, 1e-6)});
    }
    const FitResult fit = fit_coherence_length(points);
    results = {{"coherence_length_m", length},
               {"refit_coherence_length_m", fit.parameters[0]},
               {"refit_v0", fit.parameters[1]},
               {"refit_stderr_m", fit.std_errors[0]}};
  } else if (command == "rates-fit") {
    const auto points = power_points_from_csv(
        read_text_file(require_input(input_path, command)));
    const FitResult fit = fit_proportional(points);
    const double slope = fit.parameters[0];
    RateParams fitted = config.rates;
    fitted.rate_per_mw_cps = slope;
    bool extrapolated = false;
    for (const auto& point : points)
      extrapolated = extrapolated || beyond_linear_regime(fitted, point.power_mw);
    results = {{"rate_per_mw_cps", slope},
               {"rate_per_mw_stderr", fit.std_errors[0]},
               {"rate_at_27mw_cps", pair_rate(fitted, 27.0)},
               {"brightness_at_27mw_cps_per_mhz",
                spectral_brightness(pair_rate(fitted, 27.0),
                                    config.rates.linewidth_mhz)},
               {"brightness_per_mw",
                spectral_brightness(slope, config.rates.linewidth_mhz)},
               {"beyond_linear_regime", extrapolated}};
  } else if (command == "pdh-sweep") {
    const double span = 2.2 * config.pdh.modulation_frequency_hz;
    const int n_points = 2001;
    std::vector<std::vector<std::string>> rows;
    for (int i = 0; i < n_points; ++i) {
      const double detuning = -span + 2.0 * span * i / (n_points - 1);
      rows.push_back({format_double(detuning),
                      format_double(pdh_error_signal(config.pdh, detuning))});
    }
    write_text_file(out_dir / "pdh_sweep.csv",
                    csv_document({"detuning_hz", "error_signal"}, rows));
    const double h = 1.0;  // Hz, finite-difference step for the center slope
    const double slope = (pdh_error_signal(config.pdh, h) -
                          pdh_error_signal(config.pdh, -h)) /
                         (2.0 * h);
    results = {{"capture_range_hz", lock_capture_range(config.pdh)},
               {"dip_finesse", reflection_dip_finesse(config.pdh)},
               {"center_slope_per_hz", slope}};
  } else {
    throw ConfigError({"command: unknown command '" + command + "'"});
  }

  const nlohmann::json report = make_report(command, config, results);
  std::string name = command;
  for (char& c : name)
    if (c == '-') c = '_';
  write_text_file(out_dir / (name + "_report.json"), report.dump(2) + "\n");
  return report;
}

}  // namespace spdcsim
