#include "spdcsim/pdh.hpp"

#include <cmath>
#include <stdexcept>

namespace spdcsim {

namespace {

double half_width_by_bisection(const PdhParams& params, double level) {
  // |F|^2 rises monotonically from the dip minimum toward FSR/2.
  double lo = 0.0;
  double hi = 0.5 * params.cavity.fsr_mean_hz;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (std::norm(cavity_reflection(params, mid)) < level)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

void PdhParams::validate() const {
  cavity.validate();
  if (!(modulation_frequency_hz > 0.0))
    throw std::invalid_argument("pdh.modulation_frequency_hz must be > 0");
  if (!(mirror_reflectivity_1 > 0.0) || mirror_reflectivity_1 >= 1.0)
    throw std::invalid_argument("pdh.mirror_reflectivity_1 must be in (0, 1)");
  if (!(mirror_reflectivity_2 > 0.0) || mirror_reflectivity_2 >= 1.0)
    throw std::invalid_argument("pdh.mirror_reflectivity_2 must be in (0, 1)");
  if (round_trip_loss < 0.0 || round_trip_loss >= 1.0)
    throw std::invalid_argument("pdh.round_trip_loss must be in [0, 1)");
}

std::complex<double> cavity_reflection(const PdhParams& params,
                                       double detuning_hz) {
  params.validate();
  const double r1 = std::sqrt(params.mirror_reflectivity_1);
  const double r2 = std::sqrt(params.mirror_reflectivity_2);
  const double t1_squared = 1.0 - r1 * r1;  // lossless mirror
  const double attenuation = std::sqrt(1.0 - params.round_trip_loss);
  const double phi = 2.0 * M_PI * detuning_hz / params.cavity.fsr_mean_hz;
  const std::complex<double> round_trip =
      r2 * attenuation * std::polar(1.0, phi);
  return (r1 - (t1_squared + r1 * r1) * round_trip) /
         (1.0 - r1 * round_trip);
}

double pdh_error_signal(const PdhParams& params, double detuning_hz) {
  const std::complex<double> carrier = cavity_reflection(params, detuning_hz);
  const std::complex<double> upper =
      cavity_reflection(params, detuning_hz + params.modulation_frequency_hz);
  const std::complex<double> lower =
      cavity_reflection(params, detuning_hz - params.modulation_frequency_hz);
  return std::imag(carrier * std::conj(upper) - std::conj(carrier) * lower);
}

double lock_capture_range(const PdhParams& params) {
  params.validate();
  const double r1 = std::sqrt(params.mirror_reflectivity_1);
  const double r2 = std::sqrt(params.mirror_reflectivity_2);
  const double attenuation = std::sqrt(1.0 - params.round_trip_loss);
  const double rt = r1 * r2 * attenuation;
  const double approx_linewidth =
      params.cavity.fsr_mean_hz * (1.0 - rt) / (M_PI * std::sqrt(rt));
  const double step = approx_linewidth / 200.0;

  auto scan = [&](double direction) {
    double previous = pdh_error_signal(params, 0.0);
    double delta = step;
    const double initial =
        pdh_error_signal(params, direction * step) - previous;
    for (int i = 2; i < 200000; ++i) {
      const double value = pdh_error_signal(params, direction * i * step);
      if ((value - previous) * initial <= 0.0) return (i - 1) * step;
      previous = value;
      delta = i * step;
    }
    return delta;
  };
  return scan(+1.0) + scan(-1.0);
}

double reflection_dip_finesse(const PdhParams& params) {
  params.validate();
  const double dip = std::norm(cavity_reflection(params, 0.0));
  const double off_resonance = std::norm(
      cavity_reflection(params, 0.5 * params.cavity.fsr_mean_hz));
  const double half_level = 0.5 * (dip + off_resonance);
  const double fwhm = 2.0 * half_width_by_bisection(params, half_level);
  return params.cavity.fsr_mean_hz / fwhm;
}

}  // namespace spdcsim
