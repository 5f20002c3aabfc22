#include "spdcsim/temporal.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <thread>

#include "spdcsim/rng.hpp"

namespace spdcsim {

namespace {

constexpr double kFwhmToSigma = 0.42466090014400953;  // 1 / (2 sqrt(2 ln 2))
constexpr long long kBatchSize = 1 << 16;

// Double-exponential (Laplace) inverse CDF, scale b = 1 / (2 pi dnu).
double sample_tau(Rng& rng, double scale) {
  const double u = rng.uniform();
  return u < 0.5 ? scale * std::log(2.0 * u) : -scale * std::log(2.0 * (1.0 - u));
}

void fill_batch(const TemporalParams& params, long long count,
                std::uint64_t stream, std::vector<long long>& counts) {
  Rng rng(stream);
  const double scale = 1.0 / (2.0 * M_PI * params.linewidth_hz);
  const double sigma = params.detector_jitter_fwhm_s * kFwhmToSigma;
  const double window = params.window_half_width_s;
  const double bin = params.bin_width_s;
  const auto n_bins = static_cast<long long>(counts.size());
  for (long long i = 0; i < count; ++i) {
    double tau = sample_tau(rng, scale);
    if (sigma > 0.0) tau += sigma * rng.gaussian();
    tau = std::floor(tau / params.tac_resolution_s) * params.tac_resolution_s;
    // Quantized taus sit exactly on TAC ticks, which coincide with bin edges;
    // biasing by half a tick keeps rounding from flipping edge events into
    // the neighboring bin.
    const double shifted = (tau + window + 0.5 * params.tac_resolution_s) / bin;
    if (shifted < 0.0) continue;
    const auto idx = static_cast<long long>(shifted);
    if (idx >= n_bins) continue;
    ++counts[static_cast<std::size_t>(idx)];
  }
}

}  // namespace

void TemporalParams::validate() const {
  if (!(linewidth_hz > 0.0))
    throw std::invalid_argument("temporal.linewidth_hz must be > 0");
  if (!(round_trip_time_s > 0.0))
    throw std::invalid_argument("temporal.round_trip_time_s must be > 0");
  if (detector_jitter_fwhm_s < 0.0)
    throw std::invalid_argument("temporal.detector_jitter_fwhm_s must be >= 0");
  if (!(tac_resolution_s > 0.0))
    throw std::invalid_argument("temporal.tac_resolution_s must be > 0");
  if (!(bin_width_s >= tac_resolution_s))
    throw std::invalid_argument(
        "temporal.bin_width_s must be >= tac_resolution_s");
  if (!(window_half_width_s > 0.0))
    throw std::invalid_argument("temporal.window_half_width_s must be > 0");
}

double g2_envelope(double tau_s, double linewidth_hz) {
  if (!(linewidth_hz > 0.0)) throw std::domain_error("linewidth must be > 0");
  return std::exp(-2.0 * M_PI * linewidth_hz * std::abs(tau_s));
}

double multimode_g2(const JointSpectrum& joint, double tau_s,
                    double linewidth_hz) {
  std::complex<double> amplitude(0.0, 0.0);
  double peak = 0.0;
  for (const auto& term : joint.terms) {
    const double a = std::sqrt(term.weight);
    const double phase = -2.0 * M_PI * term.detuning_h_hz * tau_s;
    amplitude += a * std::polar(1.0, phase);
    peak += a;
  }
  if (!(peak > 0.0)) throw std::domain_error("spectrum has no nonzero weights");
  return std::norm(amplitude) / (peak * peak) * g2_envelope(tau_s, linewidth_hz);
}

std::vector<double> convolve_detector_response(const std::vector<double>& curve,
                                               double sample_spacing_s,
                                               double jitter_fwhm_s) {
  if (jitter_fwhm_s < 0.0) throw std::domain_error("jitter must be >= 0");
  if (!(sample_spacing_s > 0.0))
    throw std::domain_error("sample spacing must be > 0");
  if (jitter_fwhm_s == 0.0) return curve;

  const double sigma = jitter_fwhm_s * kFwhmToSigma;
  const int radius =
      std::max(1, static_cast<int>(std::ceil(6.0 * sigma / sample_spacing_s)));
  std::vector<double> kernel(2 * radius + 1);
  double kernel_sum = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    const double x = k * sample_spacing_s / sigma;
    kernel[k + radius] = std::exp(-0.5 * x * x);
    kernel_sum += kernel[k + radius];
  }
  for (double& k : kernel) k /= kernel_sum;

  const auto n = static_cast<int>(curve.size());
  std::vector<double> out(curve.size(), 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int k = -radius; k <= radius; ++k) {
      const int j = i + k;
      if (j < 0 || j >= n) continue;
      acc += kernel[k + radius] * curve[j];
    }
    out[i] = acc;
  }
  return out;
}

Histogram sample_coincidences(const TemporalParams& params, long long n_events,
                              std::uint64_t seed, int n_threads) {
  params.validate();
  if (n_events <= 0) throw std::domain_error("n_events must be > 0");
  if (n_threads < 1) n_threads = 1;

  const auto n_bins = static_cast<std::size_t>(std::llround(
      2.0 * params.window_half_width_s / params.bin_width_s));
  Histogram hist;
  hist.total_events = n_events;
  hist.counts.assign(n_bins, 0);
  hist.bin_edges_s.resize(n_bins + 1);
  for (std::size_t i = 0; i <= n_bins; ++i)
    hist.bin_edges_s[i] =
        -params.window_half_width_s + static_cast<double>(i) * params.bin_width_s;

  const long long n_batches = (n_events + kBatchSize - 1) / kBatchSize;
  std::vector<std::vector<long long>> partials(
      static_cast<std::size_t>(n_threads),
      std::vector<long long>(n_bins, 0));

  auto worker = [&](int thread_index) {
    for (long long batch = thread_index; batch < n_batches;
         batch += n_threads) {
      const long long count =
          std::min(kBatchSize, n_events - batch * kBatchSize);
      fill_batch(params, count,
                 substream_seed(seed, static_cast<std::uint64_t>(batch)),
                 partials[static_cast<std::size_t>(thread_index)]);
    }
  };
  if (n_threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker, t);
    for (auto& thread : threads) thread.join();
  }
  for (const auto& partial : partials)
    for (std::size_t i = 0; i < n_bins; ++i) hist.counts[i] += partial[i];
  return hist;
}

FitResult fit_linewidth(const Histogram& hist) {
  std::vector<double> taus, values;
  for (std::size_t i = 0; i < hist.bins(); ++i) {
    if (hist.counts[i] > 0) {
      taus.push_back(std::abs(hist.bin_center(i)));
      values.push_back(static_cast<double>(hist.counts[i]));
    }
  }
  if (taus.size() < 10)
    throw std::domain_error("need at least 10 nonempty bins to fit");

  // Weighted log-linear solve: ln c = ln c0 - 2 pi dnu |tau|, weights c.
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const double w = values[i];
    const double y = std::log(values[i]);
    sw += w;
    sx += w * taus[i];
    sy += w * y;
    sxx += w * taus[i] * taus[i];
    sxy += w * taus[i] * y;
  }
  const double det = sw * sxx - sx * sx;
  if (!(std::abs(det) > 0.0))
    throw std::domain_error("histogram is degenerate (single |tau| value)");
  double slope = (sw * sxy - sx * sy) / det;
  double intercept = (sxx * sy - sx * sxy) / det;
  double c0 = std::exp(intercept);
  double linewidth = -slope / (2.0 * M_PI);
  if (!(linewidth > 0.0))
    throw std::domain_error("histogram does not decay with |tau|");

  // Gauss-Newton refinement on the exponential model, weights 1/max(model,1).
  bool converged = false;
  for (int iter = 0; iter < 50; ++iter) {
    double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
    for (std::size_t i = 0; i < taus.size(); ++i) {
      const double model = c0 * std::exp(-2.0 * M_PI * linewidth * taus[i]);
      const double w = 1.0 / std::max(model, 1.0);
      const double d_c0 = model / c0;
      const double d_nu = -2.0 * M_PI * taus[i] * model;
      const double r = values[i] - model;
      a11 += w * d_c0 * d_c0;
      a12 += w * d_c0 * d_nu;
      a22 += w * d_nu * d_nu;
      b1 += w * d_c0 * r;
      b2 += w * d_nu * r;
    }
    const double gn_det = a11 * a22 - a12 * a12;
    if (!(std::abs(gn_det) > 0.0)) break;
    const double step_c0 = (a22 * b1 - a12 * b2) / gn_det;
    const double step_nu = (a11 * b2 - a12 * b1) / gn_det;
    c0 += step_c0;
    linewidth += step_nu;
    if (!(c0 > 0.0) || !(linewidth > 0.0))
      throw std::domain_error("linewidth fit diverged");
    if (std::abs(step_nu) < 1e-12 * linewidth &&
        std::abs(step_c0) < 1e-12 * c0) {
      converged = true;
      break;
    }
  }

  double chi2 = 0.0;
  double a11 = 0, a12 = 0, a22 = 0;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const double model = c0 * std::exp(-2.0 * M_PI * linewidth * taus[i]);
    const double w = 1.0 / std::max(model, 1.0);
    const double r = values[i] - model;
    chi2 += w * r * r;
    const double d_c0 = model / c0;
    const double d_nu = -2.0 * M_PI * taus[i] * model;
    a11 += w * d_c0 * d_c0;
    a12 += w * d_c0 * d_nu;
    a22 += w * d_nu * d_nu;
  }
  const double dof = std::max(1.0, static_cast<double>(taus.size()) - 2.0);
  const double variance_scale = chi2 / dof;
  const double gn_det = a11 * a22 - a12 * a12;
  const double se_nu = std::sqrt(std::max(0.0, variance_scale * a11 / gn_det));
  const double se_c0 = std::sqrt(std::max(0.0, variance_scale * a22 / gn_det));

  FitResult result;
  result.names = {"linewidth_hz", "c0"};
  result.parameters = {linewidth, c0};
  result.std_errors = {se_nu, se_c0};
  result.residual_norm = std::sqrt(chi2);
  result.converged = converged;
  return result;
}

double coherence_length(double linewidth_hz, double wavelength_m) {
  if (!(linewidth_hz > 0.0) || !(wavelength_m > 0.0))
    throw std::domain_error("linewidth and wavelength must be > 0");
  // (nu / dnu) * lambda with nu = c / lambda reduces to c / dnu exactly.
  return kSpeedOfLight / linewidth_hz;
}

double visibility_vs_delay(double delay_m, double v0,
                           double coherence_length_m) {
  if (!(coherence_length_m > 0.0))
    throw std::domain_error("coherence length must be > 0");
  return v0 * std::exp(-delay_m / coherence_length_m);
}

FitResult fit_coherence_length(const std::vector<VisibilityPoint>& points) {
  std::vector<double> xs, ys;
  for (const auto& point : points) {
    if (point.visibility > 0.0) {
      xs.push_back(point.delay_m);
      ys.push_back(std::log(point.visibility));
    }
  }
  if (xs.size() < 2)
    throw std::domain_error("need at least 2 positive visibility points");
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    n += 1.0;
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double det = n * sxx - sx * sx;
  if (!(std::abs(det) > 0.0))
    throw std::domain_error("all delays are identical");
  const double slope = (n * sxy - sx * sy) / det;
  const double intercept = (sxx * sy - sx * sxy) / det;
  if (!(slope < 0.0))
    throw std::domain_error("visibility does not decay with delay");
  const double x0 = -1.0 / slope;
  const double v0 = std::exp(intercept);

  double chi2 = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (intercept + slope * xs[i]);
    chi2 += r * r;
  }
  const double dof = std::max(1.0, n - 2.0);
  const double var = chi2 / dof;
  const double se_slope = std::sqrt(var * n / det);
  const double se_x0 = se_slope / (slope * slope);
  const double se_v0 = v0 * std::sqrt(var * sxx / det);

  FitResult result;
  result.names = {"coherence_length_m", "v0"};
  result.parameters = {x0, v0};
  result.std_errors = {se_x0, se_v0};
  result.residual_norm = std::sqrt(chi2);
  result.converged = true;
  return result;
}

}  // namespace spdcsim
