#pragma once

#include <complex>

#include "spdcsim/spectral.hpp"

namespace spdcsim {

struct PdhParams {
  CavityParams cavity;
  double modulation_frequency_hz = 70.0e6;
  double mirror_reflectivity_1 = 0.99;  // intensity R of the input mirror
  double mirror_reflectivity_2 = 0.97;
  double round_trip_loss = 0.0;  // extra intracavity intensity loss per trip
  // Resonance offset of the V polarization relative to the locked H
  // resonance (set by crystal temperature in the experiment).
  double v_resonance_offset_hz = 0.0;

  void validate() const;
};

// Amplitude reflection of the cavity at the given detuning from the H
// resonance: F = r1 - (t1^2 + r1^2) r2 a e^{i phi} / (1 - r1 r2 a e^{i phi}),
// phi = 2 pi detuning / FSR, a = sqrt(1 - loss). |F| <= 1.
std::complex<double> cavity_reflection(const PdhParams& params,
                                       double detuning_hz);

// Demodulated error signal (arbitrary units):
// Im[F(d) F*(d + W) - F*(d) F(d - W)], W the modulation frequency.
// Odd in detuning with a zero crossing at resonance; the slope at zero is
// negative in this sign convention.
double pdh_error_signal(const PdhParams& params, double detuning_hz);

// Width of the detuning interval around zero on which the error signal is
// monotonic (the linear capture range), found by scanning for the first
// extremum on each side.
double lock_capture_range(const PdhParams& params);

// Finesse extracted from the FWHM of the |F|^2 reflection dip.
double reflection_dip_finesse(const PdhParams& params);

}  // namespace spdcsim
