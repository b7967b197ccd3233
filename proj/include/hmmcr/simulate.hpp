#ifndef HMMCR_SIMULATE_HPP
#define HMMCR_SIMULATE_HPP

#include <array>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "hmmcr/error.hpp"
#include "hmmcr/model.hpp"
#include "hmmcr/random.hpp"

namespace hmmcr {

struct BetaShape {
  double a = 1.0;
  double b = 1.0;
  friend bool operator==(const BetaShape&, const BetaShape&) = default;
};

// True individual parameters plus the generating Beta shapes, by Block.
struct TruthRecord {
  std::vector<std::string> ids;
  std::vector<IndividualParams> individuals;
  std::optional<std::array<BetaShape, 3>> generating;
};

struct Population {
  std::vector<IndividualParams> individuals;
  TruthRecord truth;
};

inline std::string individual_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "ind%04zu", i + 1);
  return buf;
}

// Individual i draws from substream (seed, SimulationParams, i).
inline Population draw_individuals(std::size_t n, const std::array<BetaShape, 3>& blocks,
                                   std::uint64_t seed) {
  if (n == 0) throw DomainError("draw_individuals: need at least one individual");
  for (const auto& s : blocks) {
    if (!(s.a > 0.0) || !(s.b > 0.0)) throw DomainError("draw_individuals: Beta shapes must be > 0");
  }
  Population pop;
  pop.individuals.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto rng = substream(seed, Stream::SimulationParams, i);
    IndividualParams p;
    for (Block b : kBlocks) p.set(b, draw_beta(rng, blocks[index(b)].a, blocks[index(b)].b));
    pop.individuals.push_back(p);
    pop.truth.ids.push_back(individual_id(i));
  }
  pop.truth.individuals = pop.individuals;
  pop.truth.generating = blocks;
  return pop;
}

// Starts Here and seen; then the Here/Away Markov chain with Bernoulli(pi)
// sightings while Here.
template <class Engine>
CaptureHistory simulate_history(const IndividualParams& p, std::size_t horizon, Engine& rng,
                                std::string id = {}) {
  if (horizon == 0) throw DomainError("simulate_history: horizon must be >= 1");
  CaptureHistory h;
  h.id = std::move(id);
  h.seen.assign(horizon, 0);
  h.seen[0] = 1;
  bool here = true;
  for (std::size_t t = 1; t < horizon; ++t) {
    const double stay = here ? p.stay_here() : p.stay_away();
    if (uniform01(rng) >= stay) here = !here;
    if (here && uniform01(rng) < p.detection()) h.seen[t] = 1;
  }
  return h;
}

struct Design {
  std::string name;
  std::size_t individuals = 0;
  std::size_t horizon = 0;
  std::array<BetaShape, 3> blocks{};
};

struct Dataset {
  Design design;
  std::vector<CaptureHistory> histories;
  TruthRecord truth;
};

// Named simulation designs. `size` overrides the population size for
// asymptotic-n, `horizon` the series length for asymptotic-T.
inline Design named_design(const std::string& name, std::optional<std::size_t> size = {},
                           std::optional<std::size_t> horizon = {}) {
  if (name == "exploratory") {
    return {name, size.value_or(60), horizon.value_or(500), {{{4, 2}, {6, 2}, {15, 5}}}};
  }
  if (name == "asymptotic-n") {
    return {name, size.value_or(50), horizon.value_or(250), {{{8, 2}, {8, 2}, {8, 2}}}};
  }
  if (name == "asymptotic-T") {
    return {name, size.value_or(16), horizon.value_or(250), {{{30, 3}, {30, 5}, {30, 2}}}};
  }
  throw DomainError("unknown design '" + name +
                    "' (expected exploratory, asymptotic-n, asymptotic-T or custom)");
}

inline Dataset run_design(const Design& design, std::uint64_t seed) {
  if (design.horizon == 0) throw DomainError("run_design: horizon must be >= 1");
  Dataset ds;
  ds.design = design;
  auto pop = draw_individuals(design.individuals, design.blocks, seed);
  ds.histories.reserve(design.individuals);
  for (std::size_t i = 0; i < design.individuals; ++i) {
    auto rng = substream(seed, Stream::SimulationHistory, i);
    ds.histories.push_back(
        simulate_history(pop.individuals[i], design.horizon, rng, pop.truth.ids[i]));
  }
  ds.truth = std::move(pop.truth);
  return ds;
}

inline Dataset run_design(const std::string& name, std::uint64_t seed,
                          std::optional<std::size_t> size = {},
                          std::optional<std::size_t> horizon = {}) {
  return run_design(named_design(name, size, horizon), seed);
}

}  // namespace hmmcr

#endif  // HMMCR_SIMULATE_HPP
