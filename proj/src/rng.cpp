#include "swarmstab/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace swarmstab {

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("below(0)");
  // Lemire-style rejection keeps the draw unbiased.
  const std::uint64_t limit = max() - (max() % n + 1) % n;
  std::uint64_t v;
  do {
    v = eng_();
  } while (v > limit);
  return v % n;
}

double Rng::exponential(double rate) {
  if (!(rate > 0)) throw std::invalid_argument("exponential rate must be positive");
  return -std::log1p(-uniform()) / rate;
}

std::int64_t Rng::poisson(double mean) {
  if (mean < 0) throw std::invalid_argument("negative Poisson mean");
  if (mean == 0) return 0;
  // Split large means so exp(-mean) stays representable.
  std::int64_t total = 0;
  while (mean > 30.0) {
    total += poisson(30.0);
    mean -= 30.0;
  }
  double u = uniform();
  double p = std::exp(-mean);
  double cdf = p;
  std::int64_t k = 0;
  while (u > cdf && p > 0) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
  }
  return total + k;
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace swarmstab
