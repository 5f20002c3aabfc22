// Acceptance gate: one pass/fail line per criterion, exit 0 only if all pass.
#include <sys/wait.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "spdcsim/commands.hpp"
#include "spdcsim/entanglement.hpp"
#include "spdcsim/pdh.hpp"
#include "spdcsim/rng.hpp"
#include "spdcsim/temporal.hpp"

using namespace spdcsim;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, bool passed, const std::string& label,
            const std::string& detail) {
  std::cout << (passed ? "PASS" : "FAIL") << " criterion " << criterion
            << ": " << label << " (" << detail << ")\n";
  if (!passed) ++g_failures;
}

double elapsed_s(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

TwoPhotonState werner(double visibility) {
  return apply_werner_noise(TwoPhotonState::from_pure(bell_phi_minus()),
                            visibility);
}

long double ratio_oracle(long double finesse, long double fsr_diff,
                         long double fsr_mean, int m) {
  const long double pi = 3.14159265358979323846264338327950288L;
  const long double s = sinl(m * fsr_diff * pi / fsr_mean);
  return 4.0L / (1.0L + (4.0L * finesse * finesse / (pi * pi)) * s * s);
}

// Horodecki-style closed form restricted to the linear-analyzer plane,
// built from Pauli expectation values independently of the library path.
double linear_bound_oracle(const TwoPhotonState& state) {
  Eigen::Matrix2cd sz, sx;
  sz << 1.0, 0.0, 0.0, -1.0;
  sx << 0.0, 1.0, 1.0, 0.0;
  const Eigen::Matrix2cd paulis[2] = {sz, sx};
  Eigen::Matrix2d block;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Eigen::Matrix4cd op = Eigen::Matrix4cd::Zero();
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
          op.block<2, 2>(2 * r, 2 * c) = paulis[i](r, c) * paulis[j];
      block(i, j) = (state.density_matrix() * op).trace().real();
    }
  const Eigen::Vector2d eigs =
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(block.transpose() * block)
          .eigenvalues();
  return 2.0 * std::sqrt(eigs.sum());
}

int run_cli(const std::string& args) {
  const std::string command = std::string(SPDCSIM_CLI_PATH) + " " + args +
                              " > /dev/null 2> /dev/null";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void criterion_1() {
  const auto start = std::chrono::steady_clock::now();
  CavityParams cavity;
  cavity.fsr_diff_hz = back_solve_fsr_diff(1.7, 1, 166.0, 1.9e9);
  const double r2 = mode_weight_ratio(cavity, 2);
  const double r3 = mode_weight_ratio(cavity, 3);
  const double background = background_fraction(cavity);
  const bool ok = std::abs(r2 - 0.63) <= 0.03 * 0.63 &&
                  std::abs(r3 - 0.31) <= 0.03 * 0.31 &&
                  std::abs(background - 3.41) <= 0.10 &&
                  elapsed_s(start) < 1.0;
  std::ostringstream detail;
  detail << "chi2/chi0=" << r2 << ", chi3/chi0=" << r3
         << ", background=" << background << ", " << elapsed_s(start) << " s";
  report(1, ok, "mode-weight golden values", detail.str());
}

void criterion_2() {
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int fi = 0; fi < 10; ++fi)
    for (int di = 0; di < 10; ++di)
      for (int m = 1; m <= 10; ++m) {
        CavityParams cavity;
        cavity.finesse = 10.0 + 40.0 * fi;
        cavity.fsr_diff_hz = 1.0e6 + 2.0e6 * di;
        const double got = mode_weight_ratio(cavity, m);
        const long double want = ratio_oracle(
            cavity.finesse, cavity.fsr_diff_hz, cavity.fsr_mean_hz, m);
        worst = std::max(worst, std::abs(got - static_cast<double>(want)) /
                                    static_cast<double>(want));
      }
  const bool ok = worst <= 1e-12 && elapsed_s(start) < 10.0;
  std::ostringstream detail;
  detail << "worst relative error " << worst << " over 1000 points, "
         << elapsed_s(start) << " s";
  report(2, ok, "formula integrity vs extended-precision oracle",
         detail.str());
}

void criterion_3() {
  Rng rng(314159);
  double worst_fidelity = 1.0, worst_success = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double alpha = rng.uniform() * 4.0 * M_PI - 2.0 * M_PI;
    const PbsOutcome outcome =
        pbs_interfere(pol::diagonal(), pol::antidiagonal(), alpha);
    if (!outcome.state) {
      worst_fidelity = 0.0;
      break;
    }
    const TwoPhotonState fixed = phase_compensate(*outcome.state, alpha);
    worst_fidelity =
        std::min(worst_fidelity, fidelity(fixed, bell_phi_minus()));
    worst_success = std::max(
        worst_success, std::abs(outcome.success_probability - 0.5));
  }
  const bool ok = worst_fidelity >= 1.0 - 1e-12 && worst_success <= 1e-12;
  std::ostringstream detail;
  detail << "min fidelity " << worst_fidelity << ", max |success - 1/2| "
         << worst_success;
  report(3, ok, "entanglement pipeline over 100 random alpha", detail.str());
}

void criterion_4() {
  const TwoPhotonState phi = TwoPhotonState::from_pure(bell_phi_minus());
  const double s_ideal = chsh_s(phi, optimize_chsh_angles(phi)).s_value;

  Rng rng(2718);
  double worst_gap = 0.0;
  for (int i = 0; i < 100; ++i) {
    Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
    const int pure_terms = 1 + (i % 3);
    for (int k = 0; k < pure_terms; ++k) {
      Eigen::Vector4cd psi;
      for (int j = 0; j < 4; ++j)
        psi(j) = complexd(rng.gaussian(), rng.gaussian());
      psi.normalize();
      rho += psi * psi.adjoint() / static_cast<double>(pure_terms);
    }
    const TwoPhotonState state(rho);
    const double attained =
        chsh_s(state, optimize_chsh_angles(state)).s_value;
    worst_gap =
        std::max(worst_gap, std::abs(attained - linear_bound_oracle(state)));
  }

  const TwoPhotonState w97 = werner(0.97);
  const double s97 = chsh_s(w97, optimize_chsh_angles(w97)).s_value;
  const TwoPhotonState w94 = werner(0.94);
  const double s94 = chsh_s(w94, optimize_chsh_angles(w94)).s_value;
  const double sigmas = violation_sigmas(2.66, 0.03);

  const bool ok = std::abs(s_ideal - 2.0 * M_SQRT2) <= 1e-6 &&
                  worst_gap <= 1e-4 &&
                  std::abs(s97 - 0.97 * 2.0 * M_SQRT2) <= 1e-6 &&
                  std::abs(s97 - 2.7435) <= 1e-4 &&
                  s94 >= 2.63 && s94 <= 2.69 &&
                  std::abs(sigmas - 22.0) <= 1e-9;
  std::ostringstream detail;
  detail << "S(ideal)=" << s_ideal << ", max oracle gap " << worst_gap
         << ", S(0.97)=" << s97 << ", S(0.94)=" << s94
         << ", sigmas=" << sigmas;
  report(4, ok, "CHSH values and closed-form cross-check", detail.str());
}

void criterion_5() {
  const auto start = std::chrono::steady_clock::now();
  const auto settings = standard_settings();

  std::vector<CountRecord> exact;
  const TwoPhotonState truth = werner(0.97);
  const TwoPhotonState phi = TwoPhotonState::from_pure(bell_phi_minus());
  for (const auto& setting : settings) {
    const Eigen::Vector4cd proj = setting.product_vector();
    CountRecord record;
    record.setting = setting;
    record.counts = std::llround(
        1e6 *
        (proj.adjoint() * phi.density_matrix() * proj).value().real());
    exact.push_back(std::move(record));
  }
  const ReconstructionResult clean = mle_reconstruct(exact);
  const double clean_fidelity = fidelity(clean.density_matrix,
                                         bell_phi_minus());

  int in_band = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto records = simulate_counts(truth, settings, 1e5, seed);
    const ReconstructionResult result = mle_reconstruct(records);
    const double f = fidelity(result.density_matrix, bell_phi_minus());
    if (f >= 0.96 && f <= 0.99) ++in_band;
  }
  const bool ok = clean_fidelity >= 0.9999 && in_band >= 45 &&
                  elapsed_s(start) < 60.0;
  std::ostringstream detail;
  detail << "noiseless fidelity " << clean_fidelity << ", " << in_band
         << "/50 seeds in [0.96, 0.99], " << elapsed_s(start) << " s";
  report(5, ok, "tomography reconstruction", detail.str());
}

void criterion_6() {
  const auto start = std::chrono::steady_clock::now();
  const double fwhm_ns = std::log(2.0) / (M_PI * 9.6e6) * 1e9;

  TemporalParams params;
  int recovered = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Histogram hist = sample_coincidences(params, 100000, seed);
    const FitResult fit = fit_linewidth(hist);
    if (fit.converged && std::abs(fit.parameters[0] - 9.6e6) <= 0.03 * 9.6e6)
      ++recovered;
  }

  // Comb contrast of the etalon-filtered source spectrum after 350 ps
  // detector jitter, evaluated near tau = 0.
  CavityParams cavity;
  cavity.fsr_diff_hz = back_solve_fsr_diff(1.7, 1, 166.0, 1.9e9);
  const JointSpectrum filtered =
      filtered_spectrum(build_joint_spectrum(cavity), EtalonParams{})
          .normalized();
  const double dt = 5e-12;
  const int half = 500;
  std::vector<double> comb;
  for (int i = -half; i <= half; ++i)
    comb.push_back(multimode_g2(filtered, i * dt, 9.6e6));
  const auto blurred = convolve_detector_response(comb, dt, 350e-12);
  double lo = 1e300, hi = 0.0;
  for (int i = half - 240; i <= half + 240; ++i) {
    lo = std::min(lo, blurred[i]);
    hi = std::max(hi, blurred[i]);
  }
  const double contrast = (hi - lo) / (hi + lo);

  const bool ok = std::abs(fwhm_ns - 23.0) <= 0.1 && recovered == 20 &&
                  contrast < 0.05 && elapsed_s(start) < 30.0;
  std::ostringstream detail;
  detail << "FWHM " << fwhm_ns << " ns, " << recovered
         << "/20 refits within 3%, comb contrast " << contrast << ", "
         << elapsed_s(start) << " s";
  report(6, ok, "temporal correlation", detail.str());
}

void criterion_7() {
  const double length = coherence_length(9.6e6, 780e-9);

  Rng rng(99);
  std::vector<VisibilityPoint> points;
  for (int i = 0; i < 12; ++i) {
    const double x = length * 0.2 * i;
    points.push_back({x, visibility_vs_delay(x, 0.97, length) *
                             (1.0 + 0.02 * rng.gaussian())});
  }
  const FitResult fit = fit_coherence_length(points);

  const bool ok = std::abs(length - 31.2) <= 0.1 && length >= 29.0 &&
                  length <= 35.0 && fit.converged &&
                  std::abs(fit.parameters[0] - length) <= 0.05 * length;
  std::ostringstream detail;
  detail << "length " << length << " m, refit x0 " << fit.parameters[0]
         << " m";
  report(7, ok, "coherence length", detail.str());
}

void criterion_8() {
  RateParams params;  // k = 1780 / 27 by construction
  const double rate = pair_rate(params, 27.0);
  const double brightness = spectral_brightness(rate, params.linewidth_mhz);

  std::vector<PowerRatePoint> points;
  for (int i = 1; i <= 6; ++i)
    points.push_back({4.5 * i, params.rate_per_mw_cps * 4.5 * i});
  const FitResult fit = fit_proportional(points);

  const bool ok = rate == 1780.0 &&
                  std::abs(brightness - 1780.0 / 9.6) <= 1e-9 &&
                  std::abs(fit.parameters[0] - params.rate_per_mw_cps) <=
                      1e-9 * params.rate_per_mw_cps;
  std::ostringstream detail;
  detail << "rate(27 mW)=" << rate << ", brightness=" << brightness
         << ", fitted k=" << fit.parameters[0];
  report(8, ok, "rate and brightness arithmetic", detail.str());
}

void criterion_9() {
  PdhParams params;
  const double at_zero = pdh_error_signal(params, 0.0);
  double worst_odd = 0.0;
  for (int i = 1; i <= 300; ++i) {
    const double d = i * 0.5e6;
    worst_odd = std::max(worst_odd, std::abs(pdh_error_signal(params, d) +
                                             pdh_error_signal(params, -d)));
  }
  // Scale of the signal for the relative oddness check.
  double scale = 0.0;
  for (int i = 1; i <= 300; ++i)
    scale = std::max(scale, std::abs(pdh_error_signal(params, i * 0.5e6)));

  auto crossing_in = [&](double lo, double hi) {
    double prev = pdh_error_signal(params, lo);
    for (double d = lo + 0.1e6; d <= hi; d += 0.1e6) {
      const double current = pdh_error_signal(params, d);
      if (prev * current <= 0.0) return true;
      prev = current;
    }
    return false;
  };
  const bool zeros_ok = crossing_in(65.0e6, 75.0e6) &&
                        crossing_in(-75.0e6, -65.0e6);
  const double finesse = reflection_dip_finesse(params);

  const bool ok = std::abs(at_zero) <= 1e-12 * scale &&
                  worst_odd <= 1e-12 * scale && zeros_ok &&
                  finesse >= 140.0 && finesse <= 180.0;
  std::ostringstream detail;
  detail << "eps(0)=" << at_zero << ", max odd defect " << worst_odd
         << ", sideband zeros " << (zeros_ok ? "bracketed" : "missing")
         << ", finesse " << finesse;
  report(9, ok, "PDH error signal and finesse", detail.str());
}

void criterion_10() {
  setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
  const fs::path base =
      fs::temp_directory_path() / "spdcsim_acceptance_determinism";
  fs::remove_all(base);

  bool ok = true;
  std::string note;
  const std::vector<std::string> commands = {"g2-sample", "tomo-simulate",
                                             "chsh", "spectrum"};
  for (const auto& command : commands) {
    const fs::path a = base / (command + "_a");
    const fs::path b = base / (command + "_b");
    fs::create_directories(a);
    fs::create_directories(b);
    std::string extra_a, extra_b;
    if (command == "g2-sample") {
      // Parallel and serial sampling must agree byte for byte.
      write_text_file(base / "threads1.json", "{\"g2\": {\"threads\": 1}}\n");
      write_text_file(base / "threads4.json", "{\"g2\": {\"threads\": 4}}\n");
      extra_a = " --config " + (base / "threads1.json").string();
      extra_b = " --config " + (base / "threads4.json").string();
    }
    if (run_cli(command + " --preset ratios --seed 11 --out " +
                a.string() + extra_a) != 0 ||
        run_cli(command + " --preset ratios --seed 11 --out " +
                b.string() + extra_b) != 0) {
      ok = false;
      note = command + " exited nonzero";
      break;
    }
    for (const auto& entry : fs::directory_iterator(a)) {
      const fs::path other = b / entry.path().filename();
      std::string left = read_text_file(entry.path());
      std::string right;
      try {
        right = read_text_file(other);
      } catch (const IoError&) {
        ok = false;
      }
      if (command == "g2-sample" &&
          entry.path().filename() == "g2_sample_report.json") {
        // The echoed thread count legitimately differs; results must not.
        const auto strip = [](std::string text) {
          const auto pos = text.find("\"threads\"");
          if (pos != std::string::npos) text.erase(pos, 20);
          return text;
        };
        left = strip(left);
        right = strip(right);
      }
      if (left != right) {
        ok = false;
        note = command + "/" + entry.path().filename().string() + " differs";
      }
    }
    if (!ok) break;
  }
  unsetenv("SOURCE_DATE_EPOCH");
  report(10, ok, "byte-identical stochastic outputs (incl. threads 1 vs 4)",
         ok ? "all compared files identical" : note);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED"
                                : std::to_string(g_failures) +
                                      " CRITERIA FAILED")
            << "\n";
  return g_failures == 0 ? 0 : 1;
}
