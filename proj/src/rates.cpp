#include "spdcsim/rates.hpp"

#include <cmath>
#include <stdexcept>

namespace spdcsim {

void RateParams::validate() const {
  if (!(rate_per_mw_cps > 0.0))
    throw std::invalid_argument("rates.rate_per_mw_cps must be > 0");
  if (!(threshold_power_w > 0.0))
    throw std::invalid_argument("rates.threshold_power_w must be > 0");
  if (!(linewidth_mhz > 0.0))
    throw std::invalid_argument("rates.linewidth_mhz must be > 0");
  if (!(duty_factor > 0.0) || duty_factor > 1.0)
    throw std::invalid_argument("rates.duty_factor must be in (0, 1]");
}

double pair_rate(const RateParams& params, double pump_power_mw) {
  params.validate();
  if (pump_power_mw < 0.0)
    throw std::domain_error("pump power must be >= 0");
  return params.rate_per_mw_cps * pump_power_mw * params.duty_factor;
}

bool beyond_linear_regime(const RateParams& params, double pump_power_mw) {
  return pump_power_mw * 1e-3 > 0.1 * params.threshold_power_w;
}

double spectral_brightness(double rate_cps, double linewidth_mhz) {
  if (!(linewidth_mhz > 0.0))
    throw std::domain_error("linewidth must be > 0");
  return rate_cps / linewidth_mhz;
}

FitResult fit_proportional(const std::vector<PowerRatePoint>& points) {
  double sum_pp = 0.0;
  double sum_pr = 0.0;
  for (const auto& point : points) {
    if (point.power_mw < 0.0 || point.rate_cps < 0.0)
      throw std::domain_error("power-rate points must be nonnegative");
    sum_pp += point.power_mw * point.power_mw;
    sum_pr += point.power_mw * point.rate_cps;
  }
  if (!(sum_pp > 0.0))
    throw std::domain_error("need at least one point with nonzero power");
  const double slope = sum_pr / sum_pp;

  double chi2 = 0.0;
  for (const auto& point : points) {
    const double r = point.rate_cps - slope * point.power_mw;
    chi2 += r * r;
  }
  const auto n = static_cast<double>(points.size());
  const double se =
      points.size() > 1 ? std::sqrt(chi2 / ((n - 1.0) * sum_pp)) : 0.0;

  FitResult result;
  result.names = {"rate_per_mw_cps"};
  result.parameters = {slope};
  result.std_errors = {se};
  result.residual_norm = std::sqrt(chi2);
  result.converged = true;
  return result;
}

}  // namespace spdcsim
