#pragma once

#include <cstdint>
#include <random>

namespace swarmstab {

// mt19937_64 plus draw helpers that behave the same on every platform
// (the std distributions are implementation-defined).
class Rng {
 public:
  using result_type = std::uint64_t;
  explicit Rng(std::uint64_t seed = 1) : eng_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return eng_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  // Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  double exponential(double rate);
  bool bernoulli(double p) { return uniform() < p; }
  // Poisson by inversion; meant for moderate means.
  std::int64_t poisson(double mean);

 private:
  std::mt19937_64 eng_;
};

// Seed for stream `index` derived from a master seed (splitmix64 mixing).
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace swarmstab
