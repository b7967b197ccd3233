#ifndef HMMCR_ENGINE_HPP
#define HMMCR_ENGINE_HPP

// MCMC driver. One iteration:
//   1. FFBS a Here/Away chain for every individual
//   2. count detection / stay-Here / stay-Away successes and trials
//   3. Gibbs-update every individual's (pi, gHH, gAA)
//   4. IMH-update the Beta hypers, blocks in order pi, gHH, gAA

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hmmcr/error.hpp"
#include "hmmcr/ffbs.hpp"
#include "hmmcr/model.hpp"
#include "hmmcr/parallel.hpp"
#include "hmmcr/random.hpp"
#include "hmmcr/samplers.hpp"
#include "hmmcr/simulate.hpp"

namespace hmmcr {

struct HyperDraw {
  double a = 1.0;
  double b = 1.0;
  double logit_mean = 0.0;
  double logit_sd = 1.0;

  static HyperDraw from(const BetaHyper& h) {
    return {h.a(), h.b(), h.logit_mean(), h.logit_sd()};
  }
};

struct PosteriorSample {
  std::size_t iteration = 0;
  std::array<HyperDraw, 3> hypers{};
  // Empty unless this sample falls on the theta stride.
  std::vector<IndividualParams> thetas;
};

struct ProposalFailure {
  std::size_t iteration = 0;
  Block block = Block::Detection;
  std::string reason;
};

struct RunResult {
  std::vector<std::string> ids;
  std::vector<PosteriorSample> samples;
  std::array<std::size_t, 3> accepted{};
  std::array<std::size_t, 3> attempted{};
  std::vector<ProposalFailure> failures;
  ChainState final_state;

  double acceptance_rate(Block b) const {
    const auto n = attempted[index(b)];
    return n == 0 ? 0.0 : static_cast<double>(accepted[index(b)]) / static_cast<double>(n);
  }
};

// Called after each completed iteration with the updated state and the
// chains drawn in step 1.
using IterationObserver = std::function<void(const ChainState&, std::span<const ChainDraw>)>;

inline std::size_t horizon_of(std::span<const CaptureHistory> histories) {
  std::size_t horizon = 0;
  for (const auto& h : histories) horizon = std::max(horizon, h.first_occasion + h.size());
  return horizon;
}

inline RunResult run_chain(std::span<const CaptureHistory> histories, const RunConfig& config,
                           std::uint64_t seed, const IterationObserver& observer = {}) {
  config.validate();
  if (histories.empty()) throw DomainError("run_chain: no capture histories");
  const std::size_t horizon = horizon_of(histories);
  for (const auto& h : histories) validate_history(h, horizon);

  const std::size_t n = histories.size();
  RunResult result;
  result.ids.reserve(n);
  for (const auto& h : histories) result.ids.push_back(h.id);

  ChainState& state = result.final_state;
  state.seed = seed;
  state.individuals.assign(n, IndividualParams(0.5, 0.5, 0.5));
  state.hypers.fill(BetaHyper(1.0, 1.0));

  std::vector<ChainDraw> draws;
  std::array<std::vector<double>, 3> thetas;
  for (auto& v : thetas) v.resize(n);

  for (std::size_t it = 1; it <= config.iterations; ++it) {
    try {
      sample_all_chains(histories, state.individuals, seed, it, config.threads, draws);
    } catch (const std::exception& e) {
      throw NumericError("iteration " + std::to_string(it) + ": " + e.what());
    }

    parallel_for(n, config.threads, [&](std::size_t i) {
      auto rng = substream(seed, Stream::Gibbs, it, i);
      for (Block b : kBlocks) {
        state.individuals[i].set(b, gibbs_theta(draws[i].counts[b], state.hypers[index(b)], rng));
      }
    });

    for (Block b : kBlocks) {
      auto& col = thetas[index(b)];
      for (std::size_t i = 0; i < n; ++i) col[i] = state.individuals[i][b];
      auto rng = substream(seed, Stream::HyperProposal, it, index(b));
      auto step = imh_hyper_step(col, state.hypers[index(b)], config.prior, rng);
      ++state.attempted[index(b)];
      if (step.accepted) {
        ++state.accepted[index(b)];
        state.hypers[index(b)] = step.hyper;
      }
      if (step.proposal_failed) result.failures.push_back({it, b, std::move(step.failure)});
    }
    state.iteration = it;

    if (observer) observer(state, draws);

    if (it > config.burnin && (it - config.burnin) % config.thin == 0) {
      PosteriorSample s;
      s.iteration = it;
      for (Block b : kBlocks) s.hypers[index(b)] = HyperDraw::from(state.hypers[index(b)]);
      const std::size_t recorded = (it - config.burnin) / config.thin;
      if ((recorded - 1) % config.theta_thin == 0) s.thetas = state.individuals;
      result.samples.push_back(std::move(s));
    }
  }
  result.accepted = state.accepted;
  result.attempted = state.attempted;
  return result;
}

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};

inline MeanSd mean_sd(std::span<const double> x) {
  if (x.empty()) return {};
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  if (x.size() < 2) return {m, 0.0};
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return {m, std::sqrt(ss / static_cast<double>(x.size() - 1))};
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("pearson: need two equal series");
  const auto mx = mean_sd(x).mean;
  const auto my = mean_sd(y).mean;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

struct HyperSummary {
  MeanSd a;
  MeanSd b;
  MeanSd logit_mean;
  MeanSd logit_sd;
};

struct Summary {
  std::size_t samples = 0;
  std::array<HyperSummary, 3> hypers{};
  std::vector<IndividualParams> individual_means;
  std::optional<std::array<double, 3>> correlations;
  std::optional<std::array<double, 3>> acceptance;
};

inline Summary summarize(std::span<const PosteriorSample> samples,
                         const TruthRecord* truth = nullptr) {
  if (samples.empty()) throw DomainError("summarize: no posterior samples");
  Summary s;
  s.samples = samples.size();
  std::vector<double> buf(samples.size());
  auto column = [&](auto&& get) {
    for (std::size_t k = 0; k < samples.size(); ++k) buf[k] = get(samples[k]);
    return mean_sd(buf);
  };
  for (Block b : kBlocks) {
    const auto j = index(b);
    auto& h = s.hypers[j];
    h.a = column([j](const PosteriorSample& p) { return p.hypers[j].a; });
    h.b = column([j](const PosteriorSample& p) { return p.hypers[j].b; });
    h.logit_mean = column([j](const PosteriorSample& p) { return p.hypers[j].logit_mean; });
    h.logit_sd = column([j](const PosteriorSample& p) { return p.hypers[j].logit_sd; });
  }

  std::size_t theta_draws = 0;
  std::vector<std::array<double, 3>> sums;
  for (const auto& p : samples) {
    if (p.thetas.empty()) continue;
    if (sums.empty()) sums.assign(p.thetas.size(), {0.0, 0.0, 0.0});
    if (p.thetas.size() != sums.size()) throw DomainError("summarize: ragged theta samples");
    for (std::size_t i = 0; i < sums.size(); ++i) {
      for (std::size_t j = 0; j < 3; ++j) sums[i][j] += p.thetas[i].values[j];
    }
    ++theta_draws;
  }
  for (const auto& t : sums) {
    IndividualParams m;
    for (std::size_t j = 0; j < 3; ++j) m.values[j] = t[j] / static_cast<double>(theta_draws);
    s.individual_means.push_back(m);
  }

  if (truth && !s.individual_means.empty()) {
    if (truth->individuals.size() != s.individual_means.size()) {
      throw DomainError("summarize: truth and posterior cover different individuals");
    }
    std::array<double, 3> corr{};
    std::vector<double> est(s.individual_means.size()), tru(est.size());
    for (Block b : kBlocks) {
      for (std::size_t i = 0; i < est.size(); ++i) {
        est[i] = s.individual_means[i][b];
        tru[i] = truth->individuals[i][b];
      }
      corr[index(b)] = pearson(est, tru);
    }
    s.correlations = corr;
  }
  return s;
}

inline Summary summarize(const RunResult& run, const TruthRecord* truth = nullptr) {
  Summary s = summarize(run.samples, truth);
  std::array<double, 3> acc{};
  for (Block b : kBlocks) acc[index(b)] = run.acceptance_rate(b);
  s.acceptance = acc;
  return s;
}

// Scaling experiment: asymptotic-n datasets of each size, fitted
// independently. Dataset and chain seeds are keyed on the size, so a row
// does not depend on which other sizes are requested.
struct ScalingRow {
  std::size_t individuals = 0;
  std::array<HyperSummary, 3> hypers{};
  std::array<double, 3> acceptance{};
};

inline std::vector<ScalingRow> scaling_experiment(std::span<const std::size_t> sizes,
                                                  std::uint64_t seed, const RunConfig& config,
                                                  std::size_t horizon = 250) {
  std::vector<ScalingRow> rows;
  for (std::size_t n : sizes) {
    const auto data = run_design(named_design("asymptotic-n", n, horizon),
                                 derive_seed(seed, Stream::Experiment, 2 * n));
    const auto run = run_chain(data.histories, config, derive_seed(seed, Stream::Experiment, 2 * n + 1));
    const auto s = summarize(run);
    rows.push_back({n, s.hypers, *s.acceptance});
  }
  return rows;
}

// Horizon experiment: one asymptotic-T population observed for each
// horizon. The shorter histories are prefixes of the longer ones.
struct HorizonRow {
  std::size_t horizon = 0;
  std::array<double, 3> correlation{};
  std::array<HyperSummary, 3> hypers{};
};

inline std::vector<HorizonRow> horizon_experiment(std::span<const std::size_t> horizons,
                                                  std::uint64_t seed, const RunConfig& config,
                                                  std::size_t individuals = 16) {
  std::vector<HorizonRow> rows;
  for (std::size_t t : horizons) {
    const auto data = run_design(named_design("asymptotic-T", individuals, t),
                                 derive_seed(seed, Stream::Experiment, 0));
    const auto run = run_chain(data.histories, config, derive_seed(seed, Stream::Experiment, 2 * t + 1));
    const auto s = summarize(run, &data.truth);
    rows.push_back({t, s.correlations.value_or(std::array<double, 3>{}), s.hypers});
  }
  return rows;
}

}  // namespace hmmcr

#endif  // HMMCR_ENGINE_HPP
