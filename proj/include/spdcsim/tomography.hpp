#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spdcsim/polarization.hpp"

namespace spdcsim {

// Product projector |a><a| (x) |b><b| with a two-letter label over
// {H, V, D, A, R, L}.
struct ProjectorSetting {
  std::string label;
  PolarizationVector projector_a;
  PolarizationVector projector_b;

  Eigen::Vector4cd product_vector() const;
};

struct CountRecord {
  ProjectorSetting setting;
  long long counts = 0;
  double exposure_s = 1.0;
};

struct ReconstructionResult {
  TwoPhotonState density_matrix = TwoPhotonState::maximally_mixed();
  double log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;
};

// The canonical 16-projector tomography set.
std::vector<ProjectorSetting> standard_settings();

ProjectorSetting setting_from_label(const std::string& label);

// counts ~ Poisson(mean * Tr[rho Pi]), one RNG substream per setting.
std::vector<CountRecord> simulate_counts(
    const TwoPhotonState& state, const std::vector<ProjectorSetting>& settings,
    double mean_counts_per_setting, std::uint64_t seed);

// Least-squares inversion of count rates onto the Pauli parameterization.
// Hermitian with unit trace; may have negative eigenvalues for noisy counts.
Eigen::Matrix4cd linear_reconstruct(const std::vector<CountRecord>& records);

struct MleOptions {
  int max_iterations = 10000;
  double tolerance = 1e-10;  // on the per-count gradient norm and on steps
};

// Poisson maximum likelihood over rho = T^dag T / Tr(T^dag T) with T lower
// triangular (16 real parameters), initialized from the PSD-projected linear
// estimate, optimized by conjugate-gradient ascent with backtracking line
// search. The overall rate scale is profiled out in closed form.
ReconstructionResult mle_reconstruct(const std::vector<CountRecord>& records,
                                     const MleOptions& options = {});

struct MatrixTables {
  Eigen::Matrix4d real_part;
  Eigen::Matrix4d imag_part;
};

MatrixTables report_matrix(const TwoPhotonState& state);

}  // namespace spdcsim
