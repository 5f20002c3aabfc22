#include "spdcsim/polarization.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace spdcsim {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
}

PolarizationVector PolarizationVector::normalized() const {
  const double n = std::sqrt(norm_squared());
  if (!(n > 0.0))
    throw std::domain_error("cannot normalize a zero polarization vector");
  return {h / n, v / n};
}

namespace pol {
PolarizationVector horizontal() { return {1.0, 0.0}; }
PolarizationVector vertical() { return {0.0, 1.0}; }
PolarizationVector diagonal() { return {kInvSqrt2, kInvSqrt2}; }
PolarizationVector antidiagonal() { return {kInvSqrt2, -kInvSqrt2}; }
PolarizationVector right_circular() {
  return {kInvSqrt2, complexd(0.0, -kInvSqrt2)};
}
PolarizationVector left_circular() {
  return {kInvSqrt2, complexd(0.0, kInvSqrt2)};
}
PolarizationVector linear(double angle_rad) {
  return {std::cos(angle_rad), std::sin(angle_rad)};
}
}  // namespace pol

TwoPhotonState::TwoPhotonState(const Eigen::Matrix4cd& rho) : rho_(rho) {
  if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol)
    throw std::invalid_argument("density matrix is not Hermitian");
  if (std::abs(rho_.trace() - complexd(1.0, 0.0)) > kTraceTol)
    throw std::invalid_argument("density matrix trace is not 1");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(rho_,
                                                         Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -kEigenvalueTol)
    throw std::invalid_argument("density matrix is not positive semidefinite");
}

TwoPhotonState TwoPhotonState::from_pure(const Eigen::Vector4cd& psi) {
  const double n = psi.norm();
  if (std::abs(n - 1.0) > 1e-9)
    throw std::invalid_argument("pure state vector must be normalized");
  return TwoPhotonState((psi * psi.adjoint()) / (n * n));
}

TwoPhotonState TwoPhotonState::maximally_mixed() {
  return TwoPhotonState(Eigen::Matrix4cd::Identity() * 0.25);
}

Eigen::Vector4cd bell_phi_minus() {
  Eigen::Vector4cd psi;
  psi << kInvSqrt2, 0.0, 0.0, -kInvSqrt2;
  return psi;
}

Eigen::Matrix2cd waveplate_jones(const WavePlateSetting& setting) {
  const double c = std::cos(setting.fast_axis_angle_rad);
  const double s = std::sin(setting.fast_axis_angle_rad);
  Eigen::Matrix2cd rotation;
  rotation << c, -s, s, c;
  Eigen::Matrix2cd retarder = Eigen::Matrix2cd::Zero();
  retarder(0, 0) = 1.0;
  retarder(1, 1) = std::exp(complexd(0.0, setting.retardance_rad));
  return rotation * retarder * rotation.transpose();
}

PbsOutcome pbs_interfere(const PolarizationVector& photon_a,
                         const PolarizationVector& photon_b, double alpha_rad) {
  if (std::abs(photon_a.norm_squared() - 1.0) > 1e-9 ||
      std::abs(photon_b.norm_squared() - 1.0) > 1e-9)
    throw std::invalid_argument("input photons must be normalized");

  // One photon per port survives only when both transmit (HH) or both
  // reflect (VV); HV/VH amplitude mass exits through a single port.
  const complexd amp_hh = photon_a.h * photon_b.h;
  const complexd amp_vv =
      std::exp(complexd(0.0, alpha_rad)) * photon_a.v * photon_b.v;

  PbsOutcome outcome;
  outcome.success_probability = std::norm(amp_hh) + std::norm(amp_vv);
  if (outcome.success_probability < 1e-30) {
    outcome.success_probability = 0.0;
    return outcome;
  }
  Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
  psi(0) = amp_hh;
  psi(3) = amp_vv;
  psi /= std::sqrt(outcome.success_probability);
  outcome.state = TwoPhotonState::from_pure(psi);
  return outcome;
}

TwoPhotonState phase_compensate(const TwoPhotonState& state, double alpha_rad) {
  Eigen::Vector4cd diag;
  const complexd shift = std::exp(complexd(0.0, -alpha_rad));
  diag << 1.0, shift, 1.0, shift;  // V component of photon B
  const Eigen::Matrix4cd unitary = diag.asDiagonal();
  return TwoPhotonState(unitary * state.density_matrix() * unitary.adjoint());
}

TwoPhotonState apply_werner_noise(const TwoPhotonState& state,
                                  double visibility) {
  if (visibility < 0.0 || visibility > 1.0)
    throw std::domain_error("visibility must be in [0, 1]");
  if (state.purity() < 1.0 - 1e-6)
    throw std::invalid_argument("werner noise input must be pure");
  const Eigen::Matrix4cd mixed =
      visibility * state.density_matrix() +
      (1.0 - visibility) * 0.25 * Eigen::Matrix4cd::Identity();
  return TwoPhotonState(0.5 * (mixed + mixed.adjoint()));
}

double coincidence_probability(const TwoPhotonState& state, double angle_a_rad,
                               double angle_b_rad) {
  const Eigen::Vector2cd a = pol::linear(angle_a_rad).as_vector();
  const Eigen::Vector2cd b = pol::linear(angle_b_rad).as_vector();
  Eigen::Vector4cd ab;
  ab << a(0) * b(0), a(0) * b(1), a(1) * b(0), a(1) * b(1);
  const double p = (ab.adjoint() * state.density_matrix() * ab)(0).real();
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace spdcsim
