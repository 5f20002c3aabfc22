#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>

namespace spdcsim {

using complexd = std::complex<double>;

// Single-photon polarization state (Jones vector), |h|^2 + |v|^2 = 1.
struct PolarizationVector {
  complexd h{1.0, 0.0};
  complexd v{0.0, 0.0};

  double norm_squared() const { return std::norm(h) + std::norm(v); }
  PolarizationVector normalized() const;
  Eigen::Vector2cd as_vector() const { return {h, v}; }
};

namespace pol {
PolarizationVector horizontal();
PolarizationVector vertical();
PolarizationVector diagonal();       // |+> = (|H> + |V>)/sqrt(2)
PolarizationVector antidiagonal();   // |-> = (|H> - |V>)/sqrt(2)
PolarizationVector right_circular();  // (|H> - i|V>)/sqrt(2)
PolarizationVector left_circular();   // (|H> + i|V>)/sqrt(2)

// Linear polarization at the given analyzer angle from H.
PolarizationVector linear(double angle_rad);
}  // namespace pol

// Two-photon polarization density matrix over the ordered basis
// {HH, HV, VH, VV}. Construction validates Hermiticity, unit trace and
// positive semidefiniteness.
class TwoPhotonState {
 public:
  explicit TwoPhotonState(const Eigen::Matrix4cd& rho);

  static TwoPhotonState from_pure(const Eigen::Vector4cd& psi);
  static TwoPhotonState maximally_mixed();

  const Eigen::Matrix4cd& density_matrix() const { return rho_; }
  double purity() const { return (rho_ * rho_).trace().real(); }

  static constexpr double kHermitianTol = 1e-10;
  static constexpr double kTraceTol = 1e-10;
  static constexpr double kEigenvalueTol = 1e-10;

 private:
  Eigen::Matrix4cd rho_;
};

// |phi-> = (|HH> - |VV>)/sqrt(2).
Eigen::Vector4cd bell_phi_minus();

struct WavePlateSetting {
  double retardance_rad = M_PI;   // pi: half-wave, pi/2: quarter-wave
  double fast_axis_angle_rad = 0.0;
};

// Jones matrix R(theta) diag(1, e^{i Gamma}) R(-theta).
Eigen::Matrix2cd waveplate_jones(const WavePlateSetting& setting);

// Outcome of post-selecting one photon per PBS output port. When the
// coincidence probability vanishes no state is produced.
struct PbsOutcome {
  double success_probability = 0.0;
  std::optional<TwoPhotonState> state;
};

// Ideal PBS (H transmitted, V reflected) acting on one photon per input
// spatial mode, conditioned on one photon per output port. alpha is the
// relative phase between the surviving HH and VV coincidence amplitudes,
// referenced so that alpha = 0 with inputs |+>, |-> yields |phi->; the
// fixed phase from the double V reflection (i*i = -1 in the unitary
// convention) is folded into that reference.
PbsOutcome pbs_interfere(const PolarizationVector& photon_a,
                         const PolarizationVector& photon_b, double alpha_rad);

// diag(1, e^{-i alpha}) on the second photon's V component.
TwoPhotonState phase_compensate(const TwoPhotonState& state, double alpha_rad);

// rho -> V rho + (1 - V) I/4. Input must be pure within tolerance.
TwoPhotonState apply_werner_noise(const TwoPhotonState& state,
                                  double visibility);

// Tr[rho P(a) (x) P(b)] for linear analyzers at the given angles.
double coincidence_probability(const TwoPhotonState& state, double angle_a_rad,
                               double angle_b_rad);

}  // namespace spdcsim
