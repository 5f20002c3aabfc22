#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spdcsim/spectral.hpp"

namespace spdcsim {

struct TemporalParams {
  double linewidth_hz = 9.6e6;
  double round_trip_time_s = 520e-12;
  double detector_jitter_fwhm_s = 350e-12;  // combined two-detector jitter
  double tac_resolution_s = 50e-12;
  double bin_width_s = 0.5e-9;
  double window_half_width_s = 120e-9;

  void validate() const;
};

struct Histogram {
  std::vector<double> bin_edges_s;  // size = counts.size() + 1
  std::vector<long long> counts;
  long long total_events = 0;       // includes events clipped by the window

  std::size_t bins() const { return counts.size(); }
  double bin_center(std::size_t i) const {
    return 0.5 * (bin_edges_s[i] + bin_edges_s[i + 1]);
  }
};

struct FitResult {
  std::vector<std::string> names;
  std::vector<double> parameters;
  std::vector<double> std_errors;
  double residual_norm = 0.0;
  bool converged = false;
};

// Normalized two-photon correlation envelope e^{-2 pi dnu |tau|}.
double g2_envelope(double tau_s, double linewidth_hz);

// |sum_m amplitude_m e^{-i 2 pi detuning_m tau}|^2 envelope, normalized to 1
// at tau = 0. Amplitudes are the square roots of the term weights; the H
// photon detuning sets each term's beat frequency.
double multimode_g2(const JointSpectrum& joint, double tau_s,
                    double linewidth_hz);

// Discrete Gaussian convolution of a uniformly sampled curve.
std::vector<double> convolve_detector_response(const std::vector<double>& curve,
                                               double sample_spacing_s,
                                               double jitter_fwhm_s);

// Monte Carlo TAC histogram: double-exponential arrival-time differences via
// inverse CDF, Gaussian detector jitter, TAC floor quantization, binning.
// Events are drawn in fixed-size batches with substreams derived from
// (seed, batch index), so the result is independent of thread count.
Histogram sample_coincidences(const TemporalParams& params, long long n_events,
                              std::uint64_t seed, int n_threads = 1);

// Weighted least squares of c0 e^{-2 pi dnu |tau|} over histogram bins
// (log-linear solve refined by Gauss-Newton). Parameters: linewidth_hz, c0.
FitResult fit_linewidth(const Histogram& hist);

// c / dnu; independent of wavelength (kept as an argument for the interface).
double coherence_length(double linewidth_hz, double wavelength_m);

// v0 e^{-x / x0}.
double visibility_vs_delay(double delay_m, double v0, double coherence_length_m);

struct VisibilityPoint {
  double delay_m = 0.0;
  double visibility = 0.0;
};

// Fit of v0 e^{-x / x0} to visibility-vs-delay data.
// Parameters: coherence_length_m (x0), v0.
FitResult fit_coherence_length(const std::vector<VisibilityPoint>& points);

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

}  // namespace spdcsim
