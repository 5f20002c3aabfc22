#pragma once

#include <cstdint>
#include <random>

namespace spdcsim {

// splitmix64 mixing step, used to derive independent substream seeds.
std::uint64_t mix_seed(std::uint64_t seed);

// Substream seed for (seed, stream_index). Streams with different indices
// are statistically independent for any base seed.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream_index);

// Deterministic random source. All samplers are implemented locally so that
// output is bit-identical across standard library implementations; the std::
// distribution classes are deliberately not used.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix_seed(seed)) {}

  // Uniform on the open interval (0, 1).
  double uniform();

  // Standard normal via Box-Muller.
  double gaussian();

  // Exponential with unit mean.
  double exponential();

  // Exact Poisson sample (exponential inter-arrival accumulation, O(mean)).
  // Means above kNormalCutoff fall back to a rounded normal approximation.
  long long poisson(double mean);

  static constexpr double kNormalCutoff = 5.0e6;

 private:
  std::mt19937_64 engine_;
  bool has_cached_gaussian_ = false;
  double cached_gaussian_ = 0.0;
};

}  // namespace spdcsim
