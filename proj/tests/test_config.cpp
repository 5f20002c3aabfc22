#include <doctest.h>

#include <cmath>

#include "spdcsim/config.hpp"
#include "spdcsim/rng.hpp"

using namespace spdcsim;

namespace {

bool has_message_containing(const ConfigError& error, const std::string& text) {
  for (const auto& message : error.messages())
    if (message.find(text) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("presets") {
  const ExperimentConfig quoted = preset_quoted();
  CHECK(quoted.cavity.fsr_diff_hz == doctest::Approx(21.0e6));
  CHECK(quoted.cavity.fsr_mean_hz == doctest::Approx(1.9e9));
  CHECK(quoted.cavity.finesse == doctest::Approx(166.0));
  CHECK(quoted.temporal.linewidth_hz == doctest::Approx(9.6e6));
  CHECK(quoted.etalon.fsr_hz == doctest::Approx(13.9e9));
  CHECK(quoted.etalon.finesse == doctest::Approx(31.0));
  CHECK(quoted.pdh.modulation_frequency_hz == doctest::Approx(70.0e6));
  CHECK(quoted.seed == 0);

  const ExperimentConfig ratios = preset_ratios();
  CHECK(ratios.cavity.fsr_diff_hz == doctest::Approx(6.66e6).epsilon(0.01));
  CHECK(mode_weight_ratio(ratios.cavity, 1) ==
        doctest::Approx(1.7).epsilon(1e-9));

  CHECK_THROWS_AS(preset_by_name("default"), ConfigError);
}

TEST_CASE("validate_config") {
  const ExperimentConfig defaults = preset_quoted();

  SUBCASE("empty document keeps the preset defaults") {
    const ExperimentConfig config =
        validate_config(nlohmann::json::object(), defaults);
    CHECK(config.cavity.fsr_mean_hz == defaults.cavity.fsr_mean_hz);
    CHECK(config.seed == 0);
  }

  SUBCASE("valid overrides are applied") {
    const nlohmann::json document = {
        {"cavity", {{"finesse", 200.0}}},
        {"g2", {{"n_events", 5000}, {"threads", 2}}},
        {"noise_visibility", 0.9},
        {"seed", 77}};
    const ExperimentConfig config = validate_config(document, defaults);
    CHECK(config.cavity.finesse == doctest::Approx(200.0));
    CHECK(config.cavity.fsr_mean_hz == defaults.cavity.fsr_mean_hz);
    CHECK(config.g2_events == 5000);
    CHECK(config.threads == 2);
    CHECK(config.noise_visibility == doctest::Approx(0.9));
    CHECK(config.seed == 77);
    // The PDH cavity follows the cavity section.
    CHECK(config.pdh.cavity.finesse == doctest::Approx(200.0));
  }

  SUBCASE("negative finesse names the field path") {
    const nlohmann::json document = {{"cavity", {{"finesse", -3.0}}}};
    try {
      validate_config(document, defaults);
      FAIL("expected ConfigError");
    } catch (const ConfigError& error) {
      CHECK(has_message_containing(error, "cavity.finesse"));
    }
  }

  SUBCASE("unknown keys are rejected with their paths") {
    const nlohmann::json document = {{"cavity", {{"fines", 100.0}}},
                                     {"bogus", 1}};
    try {
      validate_config(document, defaults);
      FAIL("expected ConfigError");
    } catch (const ConfigError& error) {
      CHECK(has_message_containing(error, "cavity.fines"));
      CHECK(has_message_containing(error, "bogus"));
    }
  }

  SUBCASE("multiple violations are all reported") {
    const nlohmann::json document = {
        {"cavity", {{"finesse", -3.0}}},
        {"etalon", {{"fsr_hz", -1.0}}},
        {"noise_visibility", 1.5}};
    try {
      validate_config(document, defaults);
      FAIL("expected ConfigError");
    } catch (const ConfigError& error) {
      CHECK(error.messages().size() >= 3);
      CHECK(has_message_containing(error, "cavity.finesse"));
      CHECK(has_message_containing(error, "etalon.fsr_hz"));
      CHECK(has_message_containing(error, "noise_visibility"));
    }
  }

  SUBCASE("seed must be an unsigned integer") {
    CHECK_THROWS_AS(validate_config({{"seed", -4}}, defaults), ConfigError);
    CHECK_THROWS_AS(validate_config({{"seed", "abc"}}, defaults), ConfigError);
  }
}

TEST_CASE("config json round trip") {
  ExperimentConfig config = preset_ratios();
  config.seed = 123;
  config.noise_visibility = 0.91;
  const nlohmann::json echoed = config_to_json(config);
  const ExperimentConfig back =
      validate_config(echoed, preset_quoted());
  CHECK(back.cavity.fsr_diff_hz ==
        doctest::Approx(config.cavity.fsr_diff_hz).epsilon(1e-15));
  CHECK(back.noise_visibility == doctest::Approx(0.91));
  CHECK(back.seed == 123);
}

TEST_CASE("rng determinism and substreams") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.uniform() == b.uniform());

  // Distinct substreams decorrelate even for adjacent indices.
  Rng s0(substream_seed(7, 0)), s1(substream_seed(7, 1));
  int equal = 0;
  for (int i = 0; i < 1000; ++i)
    if (s0.uniform() == s1.uniform()) ++equal;
  CHECK(equal == 0);
}

TEST_CASE("rng distribution moments") {
  Rng rng(2024);
  const int n = 200000;

  double usum = 0.0, gsum = 0.0, gsq = 0.0, esum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    usum += u;
    const double g = rng.gaussian();
    gsum += g;
    gsq += g * g;
    esum += rng.exponential();
  }
  CHECK(usum / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(gsum / n == doctest::Approx(0.0).epsilon(1.0).scale(0.01));
  CHECK(gsq / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(esum / n == doctest::Approx(1.0).epsilon(0.02));

  // Poisson mean for a small and a large parameter (exact and normal paths).
  double psmall = 0.0, plarge = 0.0;
  const int m = 20000;
  for (int i = 0; i < m; ++i) {
    psmall += static_cast<double>(rng.poisson(3.7));
    plarge += static_cast<double>(rng.poisson(1.0e7));
  }
  CHECK(psmall / m == doctest::Approx(3.7).epsilon(0.03));
  CHECK(plarge / m == doctest::Approx(1.0e7).epsilon(0.001));
}

TEST_CASE("experiment config validation collects every violation") {
  ExperimentConfig config = preset_quoted();
  config.noise_visibility = -0.5;
  config.g2_events = 0;
  config.threads = 0;
  try {
    config.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& error) {
    CHECK(error.messages().size() >= 3);
    CHECK(has_message_containing(error, "noise_visibility"));
    CHECK(has_message_containing(error, "g2.n_events"));
    CHECK(has_message_containing(error, "g2.threads"));
  }
}
