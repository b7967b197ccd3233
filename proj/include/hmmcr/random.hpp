#ifndef HMMCR_RANDOM_HPP
#define HMMCR_RANDOM_HPP

// Counter-derived random streams. Every random draw in the library comes
// from an engine keyed by (seed, stream, i, j), so results do not depend on
// how work is split across threads.

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace hmmcr {

enum class Stream : std::uint64_t {
  SimulationParams = 1,
  SimulationHistory = 2,
  Ffbs = 3,
  Gibbs = 4,
  HyperProposal = 5,
  FixedEffect = 6,
  Experiment = 7,
  Test = 99,
};

inline constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256** (Blackman & Vigna). Satisfies UniformRandomBitGenerator.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed = 0) noexcept {
    for (auto& w : s_) w = splitmix64(seed);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = std::rotl(s_[3], 45);
    return result;
  }

 private:
  std::uint64_t s_[4];
};

using Rng = Xoshiro256;

// Engine for the substream identified by (seed, stream, i, j).
inline Rng substream(std::uint64_t seed, Stream stream, std::uint64_t i = 0,
                     std::uint64_t j = 0) noexcept {
  std::uint64_t key = seed;
  std::uint64_t h = splitmix64(key);
  key = h ^ static_cast<std::uint64_t>(stream);
  h = splitmix64(key);
  key = h ^ i;
  h = splitmix64(key);
  key = h ^ j;
  h = splitmix64(key);
  return Rng(h);
}

// Derived seed, for handing a fresh top-level seed to a nested run.
inline std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t i) noexcept {
  auto r = substream(seed, stream, i);
  return r();
}

// Uniform on [0, 1) with 53 random bits.
template <class Engine>
double uniform01(Engine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <class Engine>
double draw_normal(Engine& rng, double mean = 0.0, double sd = 1.0) {
  return std::normal_distribution<double>(mean, sd)(rng);
}

// Gamma with shape/rate parameterization.
template <class Engine>
double draw_gamma(Engine& rng, double shape, double rate) {
  return std::gamma_distribution<double>(shape, 1.0 / rate)(rng);
}

template <class Engine>
double draw_beta(Engine& rng, double a, double b) {
  for (;;) {
    const double x = draw_gamma(rng, a, 1.0);
    const double y = draw_gamma(rng, b, 1.0);
    const double s = x + y;
    if (s > 0.0 && std::isfinite(s)) return x / s;
  }
}

}  // namespace hmmcr

#endif  // HMMCR_RANDOM_HPP
