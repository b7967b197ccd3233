#ifndef HMMCR_MODEL_HPP
#define HMMCR_MODEL_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hmmcr/error.hpp"
#include "hmmcr/specfn.hpp"

namespace hmmcr {

inline constexpr double kProbEpsilon = 1e-12;

inline double clamp_probability(double p) noexcept {
  return std::clamp(p, kProbEpsilon, 1.0 - kProbEpsilon);
}

inline double logit(double p) noexcept {
  p = clamp_probability(p);
  return std::log(p) - std::log1p(-p);
}

enum class State : std::uint8_t { Away = 0, Here = 1 };

// The three individual-level parameter families, in update order.
enum class Block : std::size_t { Detection = 0, StayHere = 1, StayAway = 2 };
inline constexpr std::array<Block, 3> kBlocks = {Block::Detection, Block::StayHere,
                                                 Block::StayAway};

inline constexpr std::string_view block_name(Block b) noexcept {
  constexpr std::array<std::string_view, 3> names = {"pi", "gHH", "gAA"};
  return names[static_cast<std::size_t>(b)];
}

inline constexpr std::size_t index(Block b) noexcept { return static_cast<std::size_t>(b); }

// Seen/not-seen series for one animal, starting at its first sighting.
struct CaptureHistory {
  std::string id;
  std::size_t first_occasion = 0;
  std::vector<std::uint8_t> seen;

  std::size_t size() const noexcept { return seen.size(); }
  friend bool operator==(const CaptureHistory&, const CaptureHistory&) = default;
};

// Throws ValidationError naming the first violated invariant.
inline void validate_history(const CaptureHistory& h, std::size_t horizon) {
  if (h.seen.empty()) {
    throw ValidationError(0, "individual '" + h.id + "': empty capture history");
  }
  for (std::size_t t = 0; t < h.seen.size(); ++t) {
    if (h.seen[t] > 1) {
      throw ValidationError(t, "individual '" + h.id + "': non-binary entry at index " +
                                   std::to_string(t));
    }
  }
  if (h.seen[0] != 1) {
    throw ValidationError(0, "individual '" + h.id + "': first observation must be 1");
  }
  if (h.first_occasion + h.seen.size() > horizon) {
    throw ValidationError(horizon - std::min(horizon, h.first_occasion),
                          "individual '" + h.id + "': history overflows horizon " +
                              std::to_string(horizon));
  }
}

struct StateChain {
  std::vector<State> states;

  std::size_t size() const noexcept { return states.size(); }
  friend bool operator==(const StateChain&, const StateChain&) = default;
};

struct BinomialCount {
  std::uint32_t successes = 0;
  std::uint32_t trials = 0;
  friend bool operator==(const BinomialCount&, const BinomialCount&) = default;
};

// Success/trial tallies for pi, gamma^HH and gamma^AA, indexed by Block.
struct CountStats {
  std::array<BinomialCount, 3> blocks{};

  BinomialCount& operator[](Block b) noexcept { return blocks[index(b)]; }
  const BinomialCount& operator[](Block b) const noexcept { return blocks[index(b)]; }
  friend bool operator==(const CountStats&, const CountStats&) = default;
};

// A detection trial happens whenever the animal is Here. A stay-Here trial
// happens whenever it is Here before the final occasion; stay-Away likewise.
inline CountStats count_stats(const StateChain& chain, const CaptureHistory& history) {
  if (chain.size() != history.size()) {
    throw ValidationError(std::min(chain.size(), history.size()),
                          "individual '" + history.id + "': chain/history length mismatch");
  }
  CountStats c;
  const std::size_t n = chain.size();
  for (std::size_t t = 0; t < n; ++t) {
    const bool here = chain.states[t] == State::Here;
    const bool seen = history.seen[t] == 1;
    if (seen && !here) {
      throw ValidationError(t, "individual '" + history.id +
                                   "': chain places Away at a sighting, index " +
                                   std::to_string(t));
    }
    if (here) {
      ++c[Block::Detection].trials;
      if (seen) ++c[Block::Detection].successes;
    }
    if (t + 1 < n) {
      const bool next_here = chain.states[t + 1] == State::Here;
      if (here) {
        ++c[Block::StayHere].trials;
        if (next_here) ++c[Block::StayHere].successes;
      } else {
        ++c[Block::StayAway].trials;
        if (!next_here) ++c[Block::StayAway].successes;
      }
    }
  }
  return c;
}

struct LogitMoments {
  double mean = 0.0;
  double variance = 1.0;
};

// Mean and variance of logit(p) for p ~ Beta(a, b).
inline LogitMoments beta_to_moments(double a, double b) {
  return {specfn::digamma(a) - specfn::digamma(b), specfn::trigamma(a) + specfn::trigamma(b)};
}

// Population Beta(a, b) for one parameter family together with its
// logit-moment image. Both representations are always populated.
class BetaHyper {
 public:
  BetaHyper() : BetaHyper(1.0, 1.0) {}

  BetaHyper(double a, double b) : a_(a), b_(b), moments_(beta_to_moments(a, b)) {}

  // Takes both representations, e.g. from a Newton-Raphson inversion.
  BetaHyper(double a, double b, LogitMoments m) : a_(a), b_(b), moments_(m) {
    if (!(a > 0.0) || !(b > 0.0) || !(m.variance > 0.0) || !std::isfinite(m.mean)) {
      throw DomainError("BetaHyper: invalid parameters");
    }
    const auto exact = beta_to_moments(a, b);
    if (std::abs(exact.mean - m.mean) > 1e-8 || std::abs(exact.variance - m.variance) > 1e-8) {
      throw DomainError("BetaHyper: (a, b) and logit moments disagree");
    }
  }

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  const LogitMoments& moments() const noexcept { return moments_; }
  double logit_mean() const noexcept { return moments_.mean; }
  double logit_variance() const noexcept { return moments_.variance; }
  double logit_sd() const noexcept { return std::sqrt(moments_.variance); }

 private:
  double a_;
  double b_;
  LogitMoments moments_;
};

// Individual-level probabilities, indexed by Block.
struct IndividualParams {
  std::array<double, 3> values{0.5, 0.5, 0.5};

  IndividualParams() = default;
  IndividualParams(double detection, double stay_here, double stay_away)
      : values{clamp_probability(detection), clamp_probability(stay_here),
               clamp_probability(stay_away)} {}

  double detection() const noexcept { return values[0]; }
  double stay_here() const noexcept { return values[1]; }
  double stay_away() const noexcept { return values[2]; }
  double operator[](Block b) const noexcept { return values[index(b)]; }
  void set(Block b, double p) noexcept { values[index(b)] = clamp_probability(p); }
};

// Normal-Gamma hyper-prior on the logit-scale (mu, tau):
//   mu | tau ~ N(mu0, 1 / (kappa0 tau)),  tau ~ Gamma(alpha_tau, beta_tau).
struct HyperPrior {
  double mu0 = 0.0;
  double kappa0 = 0.1;
  double alpha_tau = 0.1;
  double beta_tau = 0.1;

  void validate() const {
    if (!std::isfinite(mu0) || !(kappa0 > 0.0) || !(alpha_tau > 0.0) || !(beta_tau > 0.0)) {
      throw DomainError("HyperPrior: kappa0, alpha_tau and beta_tau must be > 0");
    }
  }
};

struct RunConfig {
  std::size_t iterations = 15000;
  std::size_t burnin = 5000;
  std::size_t thin = 1;
  // Stride (in recorded samples) for storing per-individual thetas.
  std::size_t theta_thin = 10;
  std::size_t threads = 1;
  HyperPrior prior{};

  void validate() const {
    if (burnin >= iterations && iterations != 0) {
      throw DomainError("RunConfig: burn-in must be smaller than iterations");
    }
    if (thin == 0 || theta_thin == 0) throw DomainError("RunConfig: thinning must be >= 1");
    prior.validate();
  }
};

// Full sampler state.
struct ChainState {
  std::vector<IndividualParams> individuals;
  std::array<BetaHyper, 3> hypers{};
  std::size_t iteration = 0;
  std::array<std::size_t, 3> accepted{};
  std::array<std::size_t, 3> attempted{};
  std::uint64_t seed = 0;
};

}  // namespace hmmcr

#endif  // HMMCR_MODEL_HPP
