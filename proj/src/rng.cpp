#include "spdcsim/rng.hpp"

#include <cmath>

namespace spdcsim {

std::uint64_t mix_seed(std::uint64_t seed) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream_index) {
  return mix_seed(mix_seed(seed) ^ mix_seed(stream_index + 1));
}

double Rng::uniform() {
  // 53 random bits, shifted into (0, 1).
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::gaussian() {
  if (has_cached_gaussian_) {
    has_cached_gaussian_ = false;
    return cached_gaussian_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  cached_gaussian_ = radius * std::sin(angle);
  has_cached_gaussian_ = true;
  return radius * std::cos(angle);
}

double Rng::exponential() { return -std::log(uniform()); }

long long Rng::poisson(double mean) {
  if (mean <= 0.0) return 0;
  if (mean > kNormalCutoff) {
    const double draw = std::round(mean + std::sqrt(mean) * gaussian());
    return draw < 0.0 ? 0 : static_cast<long long>(draw);
  }
  double accumulated = 0.0;
  long long count = -1;
  while (accumulated < mean) {
    accumulated += exponential();
    ++count;
  }
  return count;
}

}  // namespace spdcsim
