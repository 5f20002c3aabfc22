#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "spdcsim/entanglement.hpp"
#include "spdcsim/polarization.hpp"
#include "spdcsim/rng.hpp"

using namespace spdcsim;

namespace {

// Independent PBS oracle built directly from the postulated port amplitudes:
// H transmits, V reflects, coincidence = one photon per output port.
void pbs_oracle(const PolarizationVector& a, const PolarizationVector& b,
                double alpha, complexd* hh, complexd* vv, double* success) {
  *hh = a.h * b.h;
  *vv = std::exp(complexd(0.0, alpha)) * a.v * b.v;
  *success = std::norm(*hh) + std::norm(*vv);
}

bool matrices_close(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b,
                    double tol) {
  // Up to global phase: align on the largest entry of a.
  Eigen::Index r = 0, c = 0;
  a.cwiseAbs().maxCoeff(&r, &c);
  const complexd phase = b(r, c) / a(r, c);
  return (a * phase - b).cwiseAbs().maxCoeff() < tol &&
         std::abs(std::abs(phase) - 1.0) < tol;
}

}  // namespace

TEST_CASE("waveplate jones matrices") {
  SUBCASE("half-wave plate at zero") {
    const Eigen::Matrix2cd hwp = waveplate_jones({M_PI, 0.0});
    Eigen::Matrix2cd want;
    want << 1.0, 0.0, 0.0, -1.0;
    CHECK(matrices_close(hwp, want, 1e-12));
  }
  SUBCASE("quarter-wave plate at zero") {
    const Eigen::Matrix2cd qwp = waveplate_jones({M_PI / 2.0, 0.0});
    Eigen::Matrix2cd want;
    want << 1.0, 0.0, 0.0, complexd(0.0, 1.0);
    CHECK(matrices_close(qwp, want, 1e-12));
  }
  SUBCASE("HWP at pi/8 maps H to diagonal") {
    const Eigen::Matrix2cd hwp = waveplate_jones({M_PI, M_PI / 8.0});
    const Eigen::Vector2cd out = hwp * pol::horizontal().as_vector();
    const Eigen::Vector2cd want = pol::diagonal().as_vector();
    const complexd phase = out(0) / want(0);
    CHECK(std::abs(std::abs(phase) - 1.0) < 1e-12);
    CHECK((out - want * phase).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("unitarity for random settings") {
    Rng rng(7);
    for (int i = 0; i < 50; ++i) {
      const Eigen::Matrix2cd u = waveplate_jones(
          {rng.uniform() * 2.0 * M_PI, rng.uniform() * M_PI});
      CHECK((u * u.adjoint() - Eigen::Matrix2cd::Identity())
                .cwiseAbs()
                .maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("pbs interference basic cases") {
  SUBCASE("diagonal inputs make phi minus") {
    const PbsOutcome outcome =
        pbs_interfere(pol::diagonal(), pol::antidiagonal(), 0.0);
    CHECK(outcome.success_probability == doctest::Approx(0.5).epsilon(1e-12));
    REQUIRE(outcome.state);
    CHECK(fidelity(*outcome.state, bell_phi_minus()) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("both horizontal") {
    const PbsOutcome outcome =
        pbs_interfere(pol::horizontal(), pol::horizontal(), 1.1);
    CHECK(outcome.success_probability == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(outcome.state);
    Eigen::Vector4cd hh = Eigen::Vector4cd::Zero();
    hh(0) = 1.0;
    CHECK(fidelity(*outcome.state, hh) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("H and V never coincide") {
    const PbsOutcome outcome =
        pbs_interfere(pol::horizontal(), pol::vertical(), 0.3);
    CHECK(outcome.success_probability == doctest::Approx(0.0));
    CHECK(!outcome.state);
  }
}

TEST_CASE("pbs interference matches amplitude oracle on random inputs") {
  Rng rng(13);
  for (int i = 0; i < 100; ++i) {
    auto random_photon = [&]() {
      PolarizationVector p;
      p.h = complexd(rng.gaussian(), rng.gaussian());
      p.v = complexd(rng.gaussian(), rng.gaussian());
      return p.normalized();
    };
    const PolarizationVector a = random_photon();
    const PolarizationVector b = random_photon();
    const double alpha = rng.uniform() * 2.0 * M_PI;

    complexd hh, vv;
    double success;
    pbs_oracle(a, b, alpha, &hh, &vv, &success);
    const PbsOutcome outcome = pbs_interfere(a, b, alpha);
    CHECK(outcome.success_probability ==
          doctest::Approx(success).epsilon(1e-12));
    if (success < 1e-12) continue;
    REQUIRE(outcome.state);
    Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
    psi(0) = hh / std::sqrt(success);
    psi(3) = vv / std::sqrt(success);
    CHECK(fidelity(*outcome.state, psi) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("phase compensation recovers phi minus for every alpha") {
  Rng rng(29);
  for (int i = 0; i < 100; ++i) {
    const double alpha = rng.uniform() * 4.0 * M_PI - 2.0 * M_PI;
    const PbsOutcome outcome =
        pbs_interfere(pol::diagonal(), pol::antidiagonal(), alpha);
    REQUIRE(outcome.state);
    const TwoPhotonState fixed = phase_compensate(*outcome.state, alpha);
    CHECK(fidelity(fixed, bell_phi_minus()) ==
          doctest::Approx(1.0).epsilon(1e-12));
    // Compensating by alpha + 2 pi is the same operation.
    const TwoPhotonState wrapped =
        phase_compensate(*outcome.state, alpha + 2.0 * M_PI);
    CHECK((fixed.density_matrix() - wrapped.density_matrix())
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  }
}

TEST_CASE("phase compensation with zero alpha is the identity") {
  const TwoPhotonState state = TwoPhotonState::from_pure(bell_phi_minus());
  const TwoPhotonState same = phase_compensate(state, 0.0);
  CHECK((state.density_matrix() - same.density_matrix()).cwiseAbs().maxCoeff() <
        1e-15);
}

TEST_CASE("werner noise") {
  const TwoPhotonState pure = TwoPhotonState::from_pure(bell_phi_minus());
  SUBCASE("limits") {
    const TwoPhotonState untouched = apply_werner_noise(pure, 1.0);
    CHECK((untouched.density_matrix() - pure.density_matrix())
              .cwiseAbs()
              .maxCoeff() < 1e-15);
    const TwoPhotonState mixed = apply_werner_noise(pure, 0.0);
    CHECK((mixed.density_matrix() -
           Eigen::Matrix4cd::Identity() * 0.25).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("fidelity at V = 0.97") {
    const TwoPhotonState noisy = apply_werner_noise(pure, 0.97);
    CHECK(fidelity(noisy, bell_phi_minus()) ==
          doctest::Approx(0.9775).epsilon(1e-12));
    CHECK(noisy.density_matrix().trace().real() ==
          doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("domain errors") {
    CHECK_THROWS_AS(apply_werner_noise(pure, -0.1), std::domain_error);
    CHECK_THROWS_AS(apply_werner_noise(pure, 1.1), std::domain_error);
    CHECK_THROWS_AS(
        apply_werner_noise(TwoPhotonState::maximally_mixed(), 0.9),
        std::invalid_argument);
  }
}

TEST_CASE("coincidence probability") {
  const TwoPhotonState phi = TwoPhotonState::from_pure(bell_phi_minus());
  CHECK(coincidence_probability(phi, 0.0, 0.0) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(coincidence_probability(phi, 0.0, M_PI / 2.0) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(coincidence_probability(TwoPhotonState::maximally_mixed(), 0.4, 1.2) ==
        doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("coincidence outcomes sum to one over the four analyzer pairs") {
  Rng rng(41);
  for (int i = 0; i < 30; ++i) {
    // Random mixed state from a random pure ensemble.
    Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
    for (int k = 0; k < 3; ++k) {
      Eigen::Vector4cd psi;
      for (int j = 0; j < 4; ++j)
        psi(j) = complexd(rng.gaussian(), rng.gaussian());
      psi.normalize();
      rho += (1.0 / 3.0) * psi * psi.adjoint();
    }
    const TwoPhotonState state(rho);
    const double a = rng.uniform() * M_PI;
    const double b = rng.uniform() * M_PI;
    const double total =
        coincidence_probability(state, a, b) +
        coincidence_probability(state, a + M_PI / 2.0, b) +
        coincidence_probability(state, a, b + M_PI / 2.0) +
        coincidence_probability(state, a + M_PI / 2.0, b + M_PI / 2.0);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("two photon state validation") {
  Eigen::Matrix4cd bad = Eigen::Matrix4cd::Identity() * 0.25;
  bad(0, 1) = complexd(0.2, 0.0);  // not Hermitian
  CHECK_THROWS_AS(TwoPhotonState{bad}, std::invalid_argument);

  Eigen::Matrix4cd traceless = Eigen::Matrix4cd::Identity() * 0.3;
  CHECK_THROWS_AS(TwoPhotonState{traceless}, std::invalid_argument);

  Eigen::Matrix4cd negative = Eigen::Matrix4cd::Identity() * 0.5;
  negative(3, 3) = -0.5;
  CHECK_THROWS_AS(TwoPhotonState{negative}, std::invalid_argument);
}
