#include "spdcsim/entanglement.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "spdcsim/rng.hpp"

namespace spdcsim {

namespace {

constexpr double kHalfPi = M_PI / 2.0;

Eigen::Vector2d angle_direction(double angle_rad) {
  return {std::cos(2.0 * angle_rad), std::sin(2.0 * angle_rad)};
}

// S for fixed (a, a') maximized over (b, b') in closed form.
double best_s_for(const Eigen::Matrix2d& block, double a, double a_prime,
                  double* b_out = nullptr, double* b_prime_out = nullptr) {
  const Eigen::Vector2d sum =
      block.transpose() * (angle_direction(a) + angle_direction(a_prime));
  const Eigen::Vector2d diff =
      block.transpose() * (angle_direction(a_prime) - angle_direction(a));
  if (b_out) {
    *b_out = sum.norm() > 0.0 ? 0.5 * std::atan2(sum(1), sum(0)) : 0.0;
    *b_prime_out =
        diff.norm() > 0.0 ? 0.5 * std::atan2(diff(1), diff(0)) : 0.0;
  }
  return sum.norm() + diff.norm();
}

}  // namespace

double correlation_coefficient(const TwoPhotonState& state, double angle_a_rad,
                               double angle_b_rad) {
  const double a = angle_a_rad;
  const double b = angle_b_rad;
  return coincidence_probability(state, a, b) +
         coincidence_probability(state, a + kHalfPi, b + kHalfPi) -
         coincidence_probability(state, a, b + kHalfPi) -
         coincidence_probability(state, a + kHalfPi, b);
}

ChshResult chsh_s(const TwoPhotonState& state, const ChshAngles& angles) {
  const double s =
      correlation_coefficient(state, angles.phi_a, angles.phi_b) -
      correlation_coefficient(state, angles.phi_a, angles.phi_b_prime) +
      correlation_coefficient(state, angles.phi_a_prime, angles.phi_b) +
      correlation_coefficient(state, angles.phi_a_prime, angles.phi_b_prime);
  return {std::abs(s), std::nullopt, angles};
}

Eigen::Matrix2d linear_correlation_block(const TwoPhotonState& state) {
  Eigen::Matrix2d block;
  const std::array<double, 2> basis = {0.0, M_PI / 4.0};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      block(i, j) = correlation_coefficient(state, basis[i], basis[j]);
  return block;
}

double chsh_maximum_linear(const TwoPhotonState& state) {
  const Eigen::Matrix2d block = linear_correlation_block(state);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(
      block.transpose() * block, Eigen::EigenvaluesOnly);
  return 2.0 * std::sqrt(solver.eigenvalues().sum());
}

ChshAngles optimize_chsh_angles(const TwoPhotonState& state) {
  const Eigen::Matrix2d block = linear_correlation_block(state);

  // Coarse 1 degree grid; ties broken toward the lexicographically smallest
  // angle pair so parallel evaluation stays deterministic.
  const int steps = 180;
  const double step = M_PI / steps;
  double best_a = 0.0, best_a_prime = 0.0, best_s = -1.0;
  for (int i = 0; i < steps; ++i) {
    for (int j = 0; j < steps; ++j) {
      const double s = best_s_for(block, i * step, j * step);
      if (s > best_s + 1e-15) {
        best_s = s;
        best_a = i * step;
        best_a_prime = j * step;
      }
    }
  }

  // Nelder-Mead refinement on (a, a').
  struct Vertex {
    double a, a_prime, value;
  };
  auto evaluate = [&](double a, double ap) {
    return best_s_for(block, a, ap);
  };
  std::array<Vertex, 3> simplex = {
      Vertex{best_a, best_a_prime, best_s},
      Vertex{best_a + step, best_a_prime, evaluate(best_a + step, best_a_prime)},
      Vertex{best_a, best_a_prime + step, evaluate(best_a, best_a_prime + step)}};
  for (int iter = 0; iter < 400; ++iter) {
    std::sort(simplex.begin(), simplex.end(),
              [](const Vertex& x, const Vertex& y) { return x.value > y.value; });
    if (simplex[0].value - simplex[2].value < 1e-14) break;
    const double ca = 0.5 * (simplex[0].a + simplex[1].a);
    const double cp = 0.5 * (simplex[0].a_prime + simplex[1].a_prime);
    const double ra = ca + (ca - simplex[2].a);
    const double rp = cp + (cp - simplex[2].a_prime);
    const double reflected = evaluate(ra, rp);
    if (reflected > simplex[0].value) {
      const double ea = ca + 2.0 * (ca - simplex[2].a);
      const double ep = cp + 2.0 * (cp - simplex[2].a_prime);
      const double expanded = evaluate(ea, ep);
      simplex[2] = expanded > reflected ? Vertex{ea, ep, expanded}
                                        : Vertex{ra, rp, reflected};
    } else if (reflected > simplex[1].value) {
      simplex[2] = {ra, rp, reflected};
    } else {
      const double sa = ca + 0.5 * (simplex[2].a - ca);
      const double sp = cp + 0.5 * (simplex[2].a_prime - cp);
      const double shrunk = evaluate(sa, sp);
      if (shrunk > simplex[2].value) {
        simplex[2] = {sa, sp, shrunk};
      } else {
        for (int k = 1; k < 3; ++k) {
          simplex[k].a = 0.5 * (simplex[k].a + simplex[0].a);
          simplex[k].a_prime = 0.5 * (simplex[k].a_prime + simplex[0].a_prime);
          simplex[k].value = evaluate(simplex[k].a, simplex[k].a_prime);
        }
      }
    }
  }
  std::sort(simplex.begin(), simplex.end(),
            [](const Vertex& x, const Vertex& y) { return x.value > y.value; });

  ChshAngles angles;
  angles.phi_a = simplex[0].a;
  angles.phi_a_prime = simplex[0].a_prime;
  best_s_for(block, angles.phi_a, angles.phi_a_prime, &angles.phi_b,
             &angles.phi_b_prime);
  return angles;
}

double visibility_sweep(const TwoPhotonState& state, double fixed_angle_rad,
                        double basis_offset_rad) {
  // P(b) = u0 + u1 cos 2b + u2 sin 2b; three samples determine the curve.
  const double p0 =
      coincidence_probability(state, fixed_angle_rad, basis_offset_rad);
  const double p45 = coincidence_probability(state, fixed_angle_rad,
                                             basis_offset_rad + M_PI / 4.0);
  const double p90 = coincidence_probability(state, fixed_angle_rad,
                                             basis_offset_rad + kHalfPi);
  const double mean = 0.5 * (p0 + p90);
  const double amplitude = std::hypot(0.5 * (p0 - p90), p45 - mean);
  if (!(mean + amplitude > 0.0))
    throw std::domain_error("coincidence sweep is identically zero");
  return std::clamp(amplitude / mean, 0.0, 1.0);
}

double fidelity(const TwoPhotonState& state, const Eigen::Vector4cd& target) {
  if (std::abs(target.norm() - 1.0) > 1e-9)
    throw std::domain_error("fidelity target must be normalized");
  return std::clamp(
      (target.adjoint() * state.density_matrix() * target)(0).real(), 0.0,
      1.0);
}

double violation_sigmas(double s_value, double std_dev) {
  if (!(std_dev > 0.0))
    throw std::domain_error("standard deviation must be > 0");
  return (s_value - 2.0) / std_dev;
}

ChshResult chsh_with_counts(const TwoPhotonState& state,
                            const ChshAngles& angles,
                            double mean_counts_per_pair, std::uint64_t seed) {
  if (!(mean_counts_per_pair > 0.0))
    throw std::domain_error("mean counts must be > 0");
  const std::array<std::pair<double, double>, 4> pairs = {
      std::pair{angles.phi_a, angles.phi_b},
      std::pair{angles.phi_a, angles.phi_b_prime},
      std::pair{angles.phi_a_prime, angles.phi_b},
      std::pair{angles.phi_a_prime, angles.phi_b_prime}};
  const std::array<double, 4> signs = {1.0, -1.0, 1.0, 1.0};

  double s_estimate = 0.0;
  double variance = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto [a, b] = pairs[i];
    Rng rng(substream_seed(seed, i));
    std::array<long long, 4> counts{};
    const std::array<std::pair<double, double>, 4> outcomes = {
        std::pair{a, b}, std::pair{a + kHalfPi, b + kHalfPi},
        std::pair{a, b + kHalfPi}, std::pair{a + kHalfPi, b}};
    long long total = 0;
    for (std::size_t k = 0; k < outcomes.size(); ++k) {
      const double p =
          coincidence_probability(state, outcomes[k].first, outcomes[k].second);
      counts[k] = rng.poisson(mean_counts_per_pair * p);
      total += counts[k];
    }
    if (total == 0)
      throw std::domain_error("no coincidences recorded for a CHSH pair");
    const double e =
        static_cast<double>(counts[0] + counts[1] - counts[2] - counts[3]) /
        static_cast<double>(total);
    s_estimate += signs[i] * e;
    variance += (1.0 - e * e) / static_cast<double>(total);
  }
  ChshResult result;
  result.s_value = std::abs(s_estimate);
  result.std_dev = std::sqrt(variance);
  result.angles = angles;
  return result;
}

}  // namespace spdcsim
