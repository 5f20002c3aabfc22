#pragma once

#include <vector>

namespace spdcsim {

// Doubly resonant cavity parameters. The two polarizations see free spectral
// ranges fsr_mean +/- fsr_diff/2.
struct CavityParams {
  double fsr_mean_hz = 1.9e9;            // Omega
  double fsr_diff_hz = 21.0e6;           // Delta Omega
  double finesse = 166.0;                // F
  double center_frequency_hz = 3.8434e14;  // omega_0 (780 nm)
  int n_side_modes = 46;                 // N
  double phase_matching_bandwidth_hz = 175.0e9;

  void validate() const;  // throws std::invalid_argument naming the field

  static int side_modes_from_bandwidth(double bandwidth_hz, double fsr_mean_hz);
};

struct EtalonParams {
  double fsr_hz = 13.9e9;
  double finesse = 31.0;

  void validate() const;
};

// One term of the two-photon mode expansion: the H photon at detuning_h_hz
// from the carrier, the V photon at detuning_v_hz. mode_index 0 is the
// doubly resonant center mode.
struct SpectralTerm {
  int mode_index = 0;
  double detuning_h_hz = 0.0;
  double detuning_v_hz = 0.0;
  double weight = 0.0;
};

// Discrete two-photon spectrum: the center term followed by four sub-terms
// per side-mode order (both signs of both polarization branches).
struct JointSpectrum {
  std::vector<SpectralTerm> terms;

  double total_weight() const;
  double center_weight() const;
  JointSpectrum normalized() const;
};

// chi_m / chi_0 = 4 / (1 + (4 F^2 / pi^2) sin^2(m * dOmega * pi / Omega)).
double mode_weight_ratio(const CavityParams& params, int m);

// Smallest fsr_diff >= 0 at which mode m attains the given weight ratio.
double back_solve_fsr_diff(double target_ratio, int m, double finesse,
                           double fsr_mean_hz);

// Sum over m = 1..N of chi_m / chi_0.
double background_fraction(const CavityParams& params);

// Normalized mode expansion for the given cavity.
JointSpectrum build_joint_spectrum(const CavityParams& params);

// Airy transmission, T(0) = 1, periodic in the etalon FSR.
double etalon_transmission(const EtalonParams& etalon, double detuning_hz);

// Applies the etalon to each photon of each term independently.
JointSpectrum filtered_spectrum(const JointSpectrum& joint,
                                const EtalonParams& etalon);

// Center weight divided by total weight.
double single_mode_purity(const JointSpectrum& joint);

}  // namespace spdcsim
