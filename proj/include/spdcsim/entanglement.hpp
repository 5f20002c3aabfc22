#pragma once

#include <optional>

#include "spdcsim/polarization.hpp"

namespace spdcsim {

struct ChshAngles {
  double phi_a = 0.0;
  double phi_a_prime = 0.0;
  double phi_b = 0.0;
  double phi_b_prime = 0.0;
};

struct ChshResult {
  double s_value = 0.0;
  std::optional<double> std_dev;
  ChshAngles angles;
};

// E(a,b) = P(a,b) + P(a_perp,b_perp) - P(a,b_perp) - P(a_perp,b).
double correlation_coefficient(const TwoPhotonState& state, double angle_a_rad,
                               double angle_b_rad);

// S = |E(a,b) - E(a,b') + E(a',b) + E(a',b')|.
ChshResult chsh_s(const TwoPhotonState& state, const ChshAngles& angles);

// 2x2 correlation block accessible with linear analyzers:
// M(i,j) = E at analyzer pairs drawn from {0, pi/4} (the sigma_z / sigma_x
// plane of each qubit).
Eigen::Matrix2d linear_correlation_block(const TwoPhotonState& state);

// Maximum S attainable with linear analyzers, 2 sqrt(m1 + m2) from the two
// eigenvalues of M^T M of the linear correlation block.
double chsh_maximum_linear(const TwoPhotonState& state);

// Angles maximizing S: 1 degree grid over (a, a') with the optimal (b, b')
// in closed form, then Nelder-Mead refinement.
ChshAngles optimize_chsh_angles(const TwoPhotonState& state);

// Sweeps the second analyzer over [offset, offset + pi) with the first fixed;
// returns (C_max - C_min) / (C_max + C_min) of the coincidence probability.
double visibility_sweep(const TwoPhotonState& state, double fixed_angle_rad,
                        double basis_offset_rad = 0.0);

// F = <psi| rho |psi> for a normalized pure target.
double fidelity(const TwoPhotonState& state, const Eigen::Vector4cd& target);

// (S - 2) / sigma.
double violation_sigmas(double s_value, double std_dev);

// Poisson error propagation for S from simulated counts: each of the four
// correlation coefficients is estimated from the 4 projective outcomes with
// mean_counts_per_pair total expected coincidences, Var(E) ~ (1 - E^2)/N and
// Var(S) = sum of the four variances.
ChshResult chsh_with_counts(const TwoPhotonState& state,
                            const ChshAngles& angles,
                            double mean_counts_per_pair, std::uint64_t seed);

}  // namespace spdcsim
