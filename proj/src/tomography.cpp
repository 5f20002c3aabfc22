#include "spdcsim/tomography.hpp"

#include <Eigen/Eigenvalues>
#include <array>
#include <cmath>
#include <stdexcept>

#include "spdcsim/rng.hpp"

namespace spdcsim {

namespace {

PolarizationVector projector_from_char(char c) {
  switch (c) {
    case 'H': return pol::horizontal();
    case 'V': return pol::vertical();
    case 'D': return pol::diagonal();
    case 'A': return pol::antidiagonal();
    case 'R': return pol::right_circular();
    case 'L': return pol::left_circular();
    default:
      throw std::invalid_argument(std::string("unknown projector letter '") +
                                  c + "'");
  }
}

// Pauli basis {I, X, Y, Z} per qubit; 16 product operators.
std::array<Eigen::Matrix2cd, 4> pauli_basis() {
  std::array<Eigen::Matrix2cd, 4> sigma;
  sigma[0] = Eigen::Matrix2cd::Identity();
  sigma[1] << 0, 1, 1, 0;
  sigma[2] << 0, complexd(0, -1), complexd(0, 1), 0;
  sigma[3] << 1, 0, 0, -1;
  return sigma;
}

Eigen::Matrix4cd kron2(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

std::array<Eigen::Matrix4cd, 16> pauli_products() {
  const auto sigma = pauli_basis();
  std::array<Eigen::Matrix4cd, 16> products;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) products[i * 4 + j] = kron2(sigma[i], sigma[j]);
  return products;
}

// Map the 16 real parameters to a lower-triangular T: 4 real diagonal
// entries followed by the 6 sub-diagonal complex entries (re, im).
Eigen::Matrix4cd params_to_t(const Eigen::VectorXd& params) {
  Eigen::Matrix4cd t = Eigen::Matrix4cd::Zero();
  for (int i = 0; i < 4; ++i) t(i, i) = params(i);
  int idx = 4;
  for (int row = 1; row < 4; ++row)
    for (int col = 0; col < row; ++col) {
      t(row, col) = complexd(params(idx), params(idx + 1));
      idx += 2;
    }
  return t;
}

Eigen::VectorXd t_to_params(const Eigen::Matrix4cd& t) {
  Eigen::VectorXd params(16);
  for (int i = 0; i < 4; ++i) params(i) = t(i, i).real();
  int idx = 4;
  for (int row = 1; row < 4; ++row)
    for (int col = 0; col < row; ++col) {
      params(idx) = t(row, col).real();
      params(idx + 1) = t(row, col).imag();
      idx += 2;
    }
  return params;
}

// Reverse Cholesky: lower-triangular T with rho = T^dag T.
Eigen::Matrix4cd reverse_cholesky(const Eigen::Matrix4cd& rho) {
  Eigen::Matrix4cd flip = Eigen::Matrix4cd::Zero();
  for (int i = 0; i < 4; ++i) flip(i, 3 - i) = 1.0;
  const Eigen::Matrix4cd flipped = flip * rho * flip;
  const Eigen::Matrix4cd lower =
      Eigen::LLT<Eigen::Matrix4cd>(flipped).matrixL();
  return flip * lower.adjoint() * flip;
}

struct Likelihood {
  std::vector<Eigen::Vector4cd> projectors;
  std::vector<double> counts;
  std::vector<double> exposures;
  double total_counts = 0.0;

  // Per-count log-likelihood with the rate scale profiled out, plus its
  // gradient with respect to the 16 T parameters.
  double evaluate(const Eigen::VectorXd& params,
                  Eigen::VectorXd* gradient) const {
    const Eigen::Matrix4cd t = params_to_t(params);
    const Eigen::Matrix4cd gram = t.adjoint() * t;
    const double trace = gram.trace().real();
    if (!(trace > 0.0)) {
      if (gradient) gradient->setZero(16);
      return -1e300;
    }

    const std::size_t n = projectors.size();
    std::vector<double> probs(n);
    double exposure_weighted = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double raw =
          (projectors[k].adjoint() * gram * projectors[k])(0).real();
      probs[k] = std::max(raw / trace, 1e-15);
      exposure_weighted += exposures[k] * probs[k];
    }

    double value = 0.0;
    for (std::size_t k = 0; k < n; ++k) value += counts[k] * std::log(probs[k]);
    value -= total_counts * std::log(exposure_weighted);
    value /= total_counts;

    if (gradient) {
      Eigen::Matrix4cd weighted = Eigen::Matrix4cd::Zero();
      for (std::size_t k = 0; k < n; ++k) {
        const double w = counts[k] / probs[k] -
                         total_counts * exposures[k] / exposure_weighted;
        weighted += w * (projectors[k] * projectors[k].adjoint());
      }
      const Eigen::Matrix4cd z =
          (2.0 / (trace * total_counts)) * (t * weighted);
      // Project onto the lower-triangular parameterization; the score along
      // dG = dT^dag T + T^dag dT is 2 Re <dT, T W> / trace.
      Eigen::VectorXd g(16);
      for (int i = 0; i < 4; ++i) g(i) = z(i, i).real();
      int idx = 4;
      for (int row = 1; row < 4; ++row)
        for (int col = 0; col < row; ++col) {
          g(idx) = z(row, col).real();
          g(idx + 1) = z(row, col).imag();
          idx += 2;
        }
      // Remove the gradient component along the trace scale direction, which
      // the normalization makes flat but numerically noisy.
      *gradient = g;
    }
    return value;
  }

  // Absolute Poisson log-likelihood at the profiled rate scale.
  double absolute(const Eigen::VectorXd& params) const {
    const Eigen::Matrix4cd t = params_to_t(params);
    const Eigen::Matrix4cd gram = t.adjoint() * t;
    const double trace = gram.trace().real();
    double exposure_weighted = 0.0;
    const std::size_t n = projectors.size();
    std::vector<double> probs(n);
    for (std::size_t k = 0; k < n; ++k) {
      probs[k] = std::max(
          (projectors[k].adjoint() * gram * projectors[k])(0).real() / trace,
          1e-15);
      exposure_weighted += exposures[k] * probs[k];
    }
    const double scale = total_counts / exposure_weighted;
    double value = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double lambda = scale * exposures[k] * probs[k];
      value += counts[k] * std::log(lambda) - lambda -
               std::lgamma(counts[k] + 1.0);
    }
    return value;
  }
};

Likelihood build_likelihood(const std::vector<CountRecord>& records) {
  if (records.empty()) throw std::domain_error("no count records");
  Likelihood like;
  for (const auto& record : records) {
    if (record.counts < 0)
      throw std::domain_error("counts must be nonnegative");
    if (!(record.exposure_s > 0.0))
      throw std::domain_error("exposure must be > 0");
    like.projectors.push_back(record.setting.product_vector());
    like.counts.push_back(static_cast<double>(record.counts));
    like.exposures.push_back(record.exposure_s);
    like.total_counts += static_cast<double>(record.counts);
  }
  if (!(like.total_counts > 0.0))
    throw std::domain_error("all counts are zero");
  return like;
}

}  // namespace

Eigen::Vector4cd ProjectorSetting::product_vector() const {
  const Eigen::Vector2cd a = projector_a.as_vector();
  const Eigen::Vector2cd b = projector_b.as_vector();
  Eigen::Vector4cd ab;
  ab << a(0) * b(0), a(0) * b(1), a(1) * b(0), a(1) * b(1);
  return ab;
}

ProjectorSetting setting_from_label(const std::string& label) {
  if (label.size() != 2)
    throw std::invalid_argument("setting label must have two letters: " +
                                label);
  return {label, projector_from_char(label[0]), projector_from_char(label[1])};
}

std::vector<ProjectorSetting> standard_settings() {
  static const std::array<const char*, 16> labels = {
      "HH", "HV", "VV", "VH", "RH", "RV", "DV", "DH",
      "DR", "DD", "RD", "HD", "VD", "VL", "HL", "RL"};
  std::vector<ProjectorSetting> settings;
  settings.reserve(labels.size());
  for (const char* label : labels) settings.push_back(setting_from_label(label));
  return settings;
}

std::vector<CountRecord> simulate_counts(
    const TwoPhotonState& state, const std::vector<ProjectorSetting>& settings,
    double mean_counts_per_setting, std::uint64_t seed) {
  if (!(mean_counts_per_setting > 0.0))
    throw std::domain_error("mean counts per setting must be > 0");
  std::vector<CountRecord> records;
  records.reserve(settings.size());
  for (std::size_t i = 0; i < settings.size(); ++i) {
    const Eigen::Vector4cd ab = settings[i].product_vector();
    const double p = std::clamp(
        (ab.adjoint() * state.density_matrix() * ab)(0).real(), 0.0, 1.0);
    Rng rng(substream_seed(seed, i));
    records.push_back(
        {settings[i], rng.poisson(mean_counts_per_setting * p), 1.0});
  }
  return records;
}

Eigen::Matrix4cd linear_reconstruct(const std::vector<CountRecord>& records) {
  const auto products = pauli_products();
  const std::size_t n = records.size();
  if (n < 16)
    throw std::domain_error("need at least 16 settings for linear inversion");

  // rate_k = s/4 * sum_ij x_ij Tr[Pi_k sigma_i sigma_j]; solve the 16
  // coefficients (scale included) by least squares.
  Eigen::MatrixXd design(n, 16);
  Eigen::VectorXd rates(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Eigen::Vector4cd ab = records[k].setting.product_vector();
    for (int c = 0; c < 16; ++c)
      design(k, c) = (ab.adjoint() * products[c] * ab)(0).real();
    rates(k) =
        static_cast<double>(records[k].counts) / records[k].exposure_s;
  }

  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double threshold = 1e-10 * svd.singularValues()(0);
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > threshold) ++rank;
  if (rank < 16)
    throw std::domain_error(
        "settings do not span the operator space (design rank " +
        std::to_string(rank) + " of 16)");

  const Eigen::VectorXd solution = svd.solve(rates);
  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
  for (int c = 0; c < 16; ++c) rho += solution(c) * products[c];
  const double trace = rho.trace().real();
  if (!(trace > 0.0))
    throw std::domain_error("linear inversion produced a non-positive trace");
  rho /= trace;
  return 0.5 * (rho + rho.adjoint());
}

ReconstructionResult mle_reconstruct(const std::vector<CountRecord>& records,
                                     const MleOptions& options) {
  const Likelihood like = build_likelihood(records);

  // PSD projection of the linear estimate: clip eigenvalues, renormalize.
  const Eigen::Matrix4cd linear = linear_reconstruct(records);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(linear);
  Eigen::Vector4d clipped = solver.eigenvalues().cwiseMax(0.0);
  if (!(clipped.sum() > 0.0)) clipped.setConstant(0.25);
  clipped /= clipped.sum();
  Eigen::Matrix4cd start = solver.eigenvectors() *
                           clipped.asDiagonal().toDenseMatrix().cast<complexd>() *
                           solver.eigenvectors().adjoint();
  start = 0.5 * (start + start.adjoint());
  start += 1e-8 * Eigen::Matrix4cd::Identity();
  start /= start.trace().real();

  Eigen::VectorXd params = t_to_params(reverse_cholesky(start));

  Eigen::VectorXd gradient(16), previous_gradient(16), direction(16);
  double value = like.evaluate(params, &gradient);
  direction = gradient;
  previous_gradient = gradient;

  ReconstructionResult result;
  int iteration = 0;
  for (; iteration < options.max_iterations; ++iteration) {
    if (gradient.norm() < options.tolerance) {
      result.converged = true;
      break;
    }
    if (direction.dot(gradient) <= 0.0) direction = gradient;  // CG restart

    // Backtracking (Armijo) line search.
    double step = 1.0;
    const double slope = direction.dot(gradient);
    double next_value = -1e300;
    Eigen::VectorXd next_params;
    bool accepted = false;
    for (int trial = 0; trial < 60; ++trial) {
      next_params = params + step * direction;
      next_value = like.evaluate(next_params, nullptr);
      if (next_value >= value + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      result.converged = gradient.norm() < 1e3 * options.tolerance;
      break;
    }
    const double step_size = (next_params - params).norm();
    params = next_params;
    value = next_value;

    Eigen::VectorXd new_gradient(16);
    like.evaluate(params, &new_gradient);
    // Polak-Ribiere+ update.
    const double denom = previous_gradient.squaredNorm();
    double beta = denom > 0.0
                      ? new_gradient.dot(new_gradient - previous_gradient) /
                            denom
                      : 0.0;
    beta = std::max(beta, 0.0);
    direction = new_gradient + beta * direction;
    previous_gradient = new_gradient;
    gradient = new_gradient;

    if (step_size < options.tolerance) {
      result.converged = true;
      ++iteration;
      break;
    }
  }

  const Eigen::Matrix4cd t = params_to_t(params);
  Eigen::Matrix4cd rho = t.adjoint() * t;
  rho /= rho.trace().real();
  rho = 0.5 * (rho + rho.adjoint());
  result.density_matrix = TwoPhotonState(rho);
  result.log_likelihood = like.absolute(params);
  result.iterations = iteration;
  return result;
}

MatrixTables report_matrix(const TwoPhotonState& state) {
  MatrixTables tables;
  tables.real_part = state.density_matrix().real();
  tables.imag_part = state.density_matrix().imag();
  return tables;
}

}  // namespace spdcsim
