#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "spdcsim/commands.hpp"
#include "spdcsim/entanglement.hpp"
#include "spdcsim/polarization.hpp"

namespace py = pybind11;
using namespace spdcsim;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cavity-enhanced entangled photon pair source simulator";
  m.attr("__version__") = kToolVersion;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_IOError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError",
                                           PyExc_RuntimeError);

  py::class_<CavityParams>(m, "CavityParams")
      .def(py::init<>())
      .def_readwrite("fsr_mean_hz", &CavityParams::fsr_mean_hz)
      .def_readwrite("fsr_diff_hz", &CavityParams::fsr_diff_hz)
      .def_readwrite("finesse", &CavityParams::finesse)
      .def_readwrite("center_frequency_hz", &CavityParams::center_frequency_hz)
      .def_readwrite("n_side_modes", &CavityParams::n_side_modes)
      .def_readwrite("phase_matching_bandwidth_hz",
                     &CavityParams::phase_matching_bandwidth_hz)
      .def("validate", &CavityParams::validate)
      .def_static("side_modes_from_bandwidth",
                  &CavityParams::side_modes_from_bandwidth);

  py::class_<EtalonParams>(m, "EtalonParams")
      .def(py::init<>())
      .def_readwrite("fsr_hz", &EtalonParams::fsr_hz)
      .def_readwrite("finesse", &EtalonParams::finesse)
      .def("validate", &EtalonParams::validate);

  py::class_<SpectralTerm>(m, "SpectralTerm")
      .def_readonly("mode_index", &SpectralTerm::mode_index)
      .def_readonly("detuning_h_hz", &SpectralTerm::detuning_h_hz)
      .def_readonly("detuning_v_hz", &SpectralTerm::detuning_v_hz)
      .def_readonly("weight", &SpectralTerm::weight);

  py::class_<JointSpectrum>(m, "JointSpectrum")
      .def_readonly("terms", &JointSpectrum::terms)
      .def("total_weight", &JointSpectrum::total_weight)
      .def("center_weight", &JointSpectrum::center_weight)
      .def("normalized", &JointSpectrum::normalized);

  m.def("mode_weight_ratio", &mode_weight_ratio);
  m.def("back_solve_fsr_diff", &back_solve_fsr_diff);
  m.def("background_fraction", &background_fraction);
  m.def("build_joint_spectrum", &build_joint_spectrum);
  m.def("etalon_transmission", &etalon_transmission);
  m.def("filtered_spectrum", &filtered_spectrum);
  m.def("single_mode_purity", &single_mode_purity);

  py::class_<PolarizationVector>(m, "PolarizationVector")
      .def(py::init([](complexd h, complexd v) {
             return PolarizationVector{h, v};
           }),
           py::arg("h"), py::arg("v"))
      .def_readwrite("h", &PolarizationVector::h)
      .def_readwrite("v", &PolarizationVector::v)
      .def("normalized", &PolarizationVector::normalized);
  m.def("horizontal", &pol::horizontal);
  m.def("vertical", &pol::vertical);
  m.def("diagonal", &pol::diagonal);
  m.def("antidiagonal", &pol::antidiagonal);
  m.def("right_circular", &pol::right_circular);
  m.def("left_circular", &pol::left_circular);
  m.def("linear", &pol::linear);

  py::class_<TwoPhotonState>(m, "TwoPhotonState")
      .def(py::init<const Eigen::Matrix4cd&>())
      .def_static("from_pure", &TwoPhotonState::from_pure)
      .def_static("maximally_mixed", &TwoPhotonState::maximally_mixed)
      .def_property_readonly(
          "density_matrix",
          [](const TwoPhotonState& s) { return s.density_matrix(); })
      .def("purity", &TwoPhotonState::purity);

  m.def("bell_phi_minus", &bell_phi_minus);

  py::class_<PbsOutcome>(m, "PbsOutcome")
      .def_readonly("success_probability", &PbsOutcome::success_probability)
      .def_readonly("state", &PbsOutcome::state);
  m.def("pbs_interfere", &pbs_interfere);
  m.def("phase_compensate", &phase_compensate);
  m.def("apply_werner_noise", &apply_werner_noise);
  m.def("coincidence_probability", &coincidence_probability);

  py::class_<ChshAngles>(m, "ChshAngles")
      .def(py::init<>())
      .def_readwrite("phi_a", &ChshAngles::phi_a)
      .def_readwrite("phi_a_prime", &ChshAngles::phi_a_prime)
      .def_readwrite("phi_b", &ChshAngles::phi_b)
      .def_readwrite("phi_b_prime", &ChshAngles::phi_b_prime);
  py::class_<ChshResult>(m, "ChshResult")
      .def_readonly("s_value", &ChshResult::s_value)
      .def_readonly("std_dev", &ChshResult::std_dev)
      .def_readonly("angles", &ChshResult::angles);
  m.def("correlation_coefficient", &correlation_coefficient);
  m.def("chsh_s", &chsh_s);
  m.def("chsh_maximum_linear", &chsh_maximum_linear);
  m.def("optimize_chsh_angles", &optimize_chsh_angles);
  m.def("visibility_sweep", &visibility_sweep, py::arg("state"),
        py::arg("fixed_angle_rad"), py::arg("basis_offset_rad") = 0.0);
  m.def("fidelity", &fidelity);
  m.def("violation_sigmas", &violation_sigmas);
  m.def("chsh_with_counts", &chsh_with_counts);

  py::class_<ProjectorSetting>(m, "ProjectorSetting")
      .def_readonly("label", &ProjectorSetting::label);
  py::class_<CountRecord>(m, "CountRecord")
      .def_readonly("setting", &CountRecord::setting)
      .def_readonly("counts", &CountRecord::counts)
      .def_readonly("exposure_s", &CountRecord::exposure_s);
  py::class_<ReconstructionResult>(m, "ReconstructionResult")
      .def_readonly("density_matrix", &ReconstructionResult::density_matrix)
      .def_readonly("log_likelihood", &ReconstructionResult::log_likelihood)
      .def_readonly("iterations", &ReconstructionResult::iterations)
      .def_readonly("converged", &ReconstructionResult::converged);
  m.def("standard_settings", &standard_settings);
  m.def("setting_from_label", &setting_from_label);
  m.def("simulate_counts", &simulate_counts);
  m.def("linear_reconstruct", &linear_reconstruct);
  m.def("mle_reconstruct",
        [](const std::vector<CountRecord>& records) {
          return mle_reconstruct(records);
        });

  py::class_<TemporalParams>(m, "TemporalParams")
      .def(py::init<>())
      .def_readwrite("linewidth_hz", &TemporalParams::linewidth_hz)
      .def_readwrite("round_trip_time_s", &TemporalParams::round_trip_time_s)
      .def_readwrite("detector_jitter_fwhm_s",
                     &TemporalParams::detector_jitter_fwhm_s)
      .def_readwrite("tac_resolution_s", &TemporalParams::tac_resolution_s)
      .def_readwrite("bin_width_s", &TemporalParams::bin_width_s)
      .def_readwrite("window_half_width_s",
                     &TemporalParams::window_half_width_s)
      .def("validate", &TemporalParams::validate);
  py::class_<Histogram>(m, "Histogram")
      .def_readonly("bin_edges_s", &Histogram::bin_edges_s)
      .def_readonly("counts", &Histogram::counts)
      .def_readonly("total_events", &Histogram::total_events);
  py::class_<FitResult>(m, "FitResult")
      .def_readonly("names", &FitResult::names)
      .def_readonly("parameters", &FitResult::parameters)
      .def_readonly("std_errors", &FitResult::std_errors)
      .def_readonly("residual_norm", &FitResult::residual_norm)
      .def_readonly("converged", &FitResult::converged);
  m.def("g2_envelope", &g2_envelope);
  m.def("multimode_g2", &multimode_g2);
  m.def("sample_coincidences", &sample_coincidences, py::arg("params"),
        py::arg("n_events"), py::arg("seed"), py::arg("n_threads") = 1);
  m.def("fit_linewidth", &fit_linewidth);
  m.def("coherence_length", &coherence_length);
  m.def("visibility_vs_delay", &visibility_vs_delay);

  py::class_<RateParams>(m, "RateParams")
      .def(py::init<>())
      .def_readwrite("rate_per_mw_cps", &RateParams::rate_per_mw_cps)
      .def_readwrite("threshold_power_w", &RateParams::threshold_power_w)
      .def_readwrite("linewidth_mhz", &RateParams::linewidth_mhz)
      .def_readwrite("duty_factor", &RateParams::duty_factor)
      .def("validate", &RateParams::validate);
  m.def("pair_rate", &pair_rate);
  m.def("beyond_linear_regime", &beyond_linear_regime);
  m.def("spectral_brightness", &spectral_brightness);
  m.def("fit_proportional", [](const std::vector<std::pair<double, double>>& p) {
    std::vector<PowerRatePoint> points;
    for (const auto& [power, rate] : p) points.push_back({power, rate});
    return fit_proportional(points);
  });

  py::class_<PdhParams>(m, "PdhParams")
      .def(py::init<>())
      .def_readwrite("cavity", &PdhParams::cavity)
      .def_readwrite("modulation_frequency_hz",
                     &PdhParams::modulation_frequency_hz)
      .def_readwrite("mirror_reflectivity_1", &PdhParams::mirror_reflectivity_1)
      .def_readwrite("mirror_reflectivity_2", &PdhParams::mirror_reflectivity_2)
      .def_readwrite("round_trip_loss", &PdhParams::round_trip_loss)
      .def_readwrite("v_resonance_offset_hz", &PdhParams::v_resonance_offset_hz)
      .def("validate", &PdhParams::validate);
  m.def("cavity_reflection", &cavity_reflection);
  m.def("pdh_error_signal", &pdh_error_signal);
  m.def("lock_capture_range", &lock_capture_range);
  m.def("reflection_dip_finesse", &reflection_dip_finesse);

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("cavity", &ExperimentConfig::cavity)
      .def_readwrite("etalon", &ExperimentConfig::etalon)
      .def_readwrite("temporal", &ExperimentConfig::temporal)
      .def_readwrite("rates", &ExperimentConfig::rates)
      .def_readwrite("pdh", &ExperimentConfig::pdh)
      .def_readwrite("noise_visibility", &ExperimentConfig::noise_visibility)
      .def_readwrite("alpha_rad", &ExperimentConfig::alpha_rad)
      .def_readwrite("tomo_mean_counts", &ExperimentConfig::tomo_mean_counts)
      .def_readwrite("chsh_mean_counts", &ExperimentConfig::chsh_mean_counts)
      .def_readwrite("g2_events", &ExperimentConfig::g2_events)
      .def_readwrite("threads", &ExperimentConfig::threads)
      .def_readwrite("wavelength_m", &ExperimentConfig::wavelength_m)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def("validate", &ExperimentConfig::validate);
  m.def("preset_by_name", &preset_by_name);

  m.def(
      "run_command",
      [](const std::string& command, const ExperimentConfig& config,
         const std::filesystem::path& out_dir,
         const std::optional<std::filesystem::path>& input_path) {
        return run_command(command, config, out_dir, input_path).dump();
      },
      py::arg("command"), py::arg("config"), py::arg("out_dir"),
      py::arg("input_path") = std::nullopt,
      "Runs one named pipeline; returns the JSON report as a string.");
}
