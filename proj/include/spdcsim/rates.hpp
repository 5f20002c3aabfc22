#pragma once

#include <vector>

#include "spdcsim/temporal.hpp"  // FitResult

namespace spdcsim {

struct RateParams {
  double rate_per_mw_cps = 1780.0 / 27.0;  // k
  double threshold_power_w = 1.88;
  double linewidth_mhz = 9.6;
  double duty_factor = 1.0;  // optional locking duty cycle, applied to rates

  void validate() const;
};

struct PowerRatePoint {
  double power_mw = 0.0;
  double rate_cps = 0.0;
};

// k * P * duty_factor for the below-threshold linear regime.
double pair_rate(const RateParams& params, double pump_power_mw);

// True when the pump power is beyond 10% of threshold and the linear model
// should be treated as extrapolation.
bool beyond_linear_regime(const RateParams& params, double pump_power_mw);

// rate / linewidth in counts/s/MHz.
double spectral_brightness(double rate_cps, double linewidth_mhz);

// Least squares through the origin: k = sum(P R) / sum(P^2).
// Parameters: rate_per_mw_cps.
FitResult fit_proportional(const std::vector<PowerRatePoint>& points);

}  // namespace spdcsim
