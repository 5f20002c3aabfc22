#include "spdcsim/spectral.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spdcsim {

void CavityParams::validate() const {
  if (!(fsr_mean_hz > 0.0))
    throw std::invalid_argument("cavity.fsr_mean_hz must be > 0");
  if (!(finesse > 1.0))
    throw std::invalid_argument("cavity.finesse must be > 1");
  if (n_side_modes < 0)
    throw std::invalid_argument("cavity.n_side_modes must be >= 0");
  if (!(std::abs(fsr_diff_hz) < fsr_mean_hz))
    throw std::invalid_argument("cavity.fsr_diff_hz must satisfy |diff| < fsr_mean");
  if (!(phase_matching_bandwidth_hz > 0.0))
    throw std::invalid_argument("cavity.phase_matching_bandwidth_hz must be > 0");
  if (!(center_frequency_hz > 0.0))
    throw std::invalid_argument("cavity.center_frequency_hz must be > 0");
}

int CavityParams::side_modes_from_bandwidth(double bandwidth_hz,
                                            double fsr_mean_hz) {
  if (!(bandwidth_hz > 0.0) || !(fsr_mean_hz > 0.0))
    throw std::invalid_argument("bandwidth and fsr_mean must be > 0");
  return static_cast<int>(std::floor(bandwidth_hz / (2.0 * fsr_mean_hz)));
}

void EtalonParams::validate() const {
  if (!(fsr_hz > 0.0)) throw std::invalid_argument("etalon.fsr_hz must be > 0");
  if (!(finesse > 0.0))
    throw std::invalid_argument("etalon.finesse must be > 0");
}

double JointSpectrum::total_weight() const {
  double total = 0.0;
  for (const auto& term : terms) total += term.weight;
  return total;
}

double JointSpectrum::center_weight() const {
  double center = 0.0;
  for (const auto& term : terms)
    if (term.mode_index == 0) center += term.weight;
  return center;
}

JointSpectrum JointSpectrum::normalized() const {
  const double total = total_weight();
  if (!(total > 0.0))
    throw std::domain_error("cannot normalize an all-zero spectrum");
  JointSpectrum out = *this;
  for (auto& term : out.terms) term.weight /= total;
  return out;
}

double mode_weight_ratio(const CavityParams& params, int m) {
  params.validate();
  if (m < 1 || m > params.n_side_modes)
    throw std::domain_error("mode index m must satisfy 1 <= m <= n_side_modes");
  const double phase = static_cast<double>(m) * params.fsr_diff_hz * M_PI /
                       params.fsr_mean_hz;
  const double s = std::sin(phase);
  const double k = 4.0 * params.finesse * params.finesse / (M_PI * M_PI);
  return 4.0 / (1.0 + k * s * s);
}

double back_solve_fsr_diff(double target_ratio, int m, double finesse,
                           double fsr_mean_hz) {
  if (!(target_ratio > 0.0) || target_ratio > 4.0)
    throw std::domain_error("target ratio must be in (0, 4]");
  if (m < 1) throw std::domain_error("mode index m must be >= 1");
  if (!(finesse > 1.0) || !(fsr_mean_hz > 0.0))
    throw std::domain_error("finesse must be > 1 and fsr_mean > 0");
  const double k = 4.0 * finesse * finesse / (M_PI * M_PI);
  const double sin_squared = (4.0 / target_ratio - 1.0) / k;
  if (sin_squared > 1.0)
    throw std::domain_error("target ratio is below the minimum 4/(1+4F^2/pi^2)");
  return std::asin(std::sqrt(sin_squared)) * fsr_mean_hz /
         (static_cast<double>(m) * M_PI);
}

double background_fraction(const CavityParams& params) {
  params.validate();
  double sum = 0.0;
  for (int m = 1; m <= params.n_side_modes; ++m)
    sum += mode_weight_ratio(params, m);
  return sum;
}

JointSpectrum build_joint_spectrum(const CavityParams& params) {
  params.validate();
  const double fsr_h = params.fsr_mean_hz + 0.5 * params.fsr_diff_hz;
  const double fsr_v = params.fsr_mean_hz - 0.5 * params.fsr_diff_hz;

  JointSpectrum joint;
  joint.terms.push_back({0, 0.0, 0.0, 1.0});
  for (int m = 1; m <= params.n_side_modes; ++m) {
    const double quarter = 0.25 * mode_weight_ratio(params, m);
    const double dh = m * fsr_h;
    const double dv = m * fsr_v;
    joint.terms.push_back({m, +dh, -dh, quarter});
    joint.terms.push_back({m, -dh, +dh, quarter});
    joint.terms.push_back({m, +dv, -dv, quarter});
    joint.terms.push_back({m, -dv, +dv, quarter});
  }
  return joint.normalized();
}

double etalon_transmission(const EtalonParams& etalon, double detuning_hz) {
  etalon.validate();
  const double coeff = 2.0 * etalon.finesse / M_PI;
  const double s = std::sin(M_PI * detuning_hz / etalon.fsr_hz);
  return 1.0 / (1.0 + coeff * coeff * s * s);
}

JointSpectrum filtered_spectrum(const JointSpectrum& joint,
                                const EtalonParams& etalon) {
  JointSpectrum out = joint;
  for (auto& term : out.terms) {
    term.weight *= etalon_transmission(etalon, term.detuning_h_hz) *
                   etalon_transmission(etalon, term.detuning_v_hz);
  }
  return out;
}

double single_mode_purity(const JointSpectrum& joint) {
  const double total = joint.total_weight();
  if (!(total > 0.0))
    throw std::domain_error("spectrum has no nonzero weights");
  return joint.center_weight() / total;
}

}  // namespace spdcsim
