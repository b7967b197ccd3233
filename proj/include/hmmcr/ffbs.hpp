#ifndef HMMCR_FFBS_HPP
#define HMMCR_FFBS_HPP

// Forward-filtering backward-sampling for the two-state Here/Away chain.
//
// Emissions: P(seen | Here) = pi, P(seen | Away) = 0. The chain is
// conditioned on being Here at first sighting, so alpha_0 = (1, 0) and the
// first occasion contributes nothing to the likelihood.

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hmmcr/error.hpp"
#include "hmmcr/model.hpp"
#include "hmmcr/parallel.hpp"
#include "hmmcr/random.hpp"

namespace hmmcr {

// Normalized filter. alpha_t(Here) is stored; alpha_t(Away) = 1 - here[t].
struct ForwardProbs {
  std::vector<double> here;
  double log_likelihood = 0.0;

  double away(std::size_t t) const noexcept { return 1.0 - here[t]; }
};

namespace detail {

// Fills `here` and returns log P(X_{2:T} | X_1 = 1, theta). Normalizers are
// multiplied into a running product that is folded into the log sum only
// when it gets small.
inline double forward_filter_into(const CaptureHistory& history, const IndividualParams& p,
                                  std::vector<double>& here) {
  const std::size_t n = history.size();
  here.resize(n);
  if (n == 0) return 0.0;
  const double pi = p.detection();
  const double g_hh = p.stay_here();
  const double g_ah = 1.0 - p.stay_away();
  here[0] = 1.0;
  double log_sum = 0.0;
  double scale = 1.0;
  double h = 1.0;
  for (std::size_t t = 1; t < n; ++t) {
    const double pred_here = h * g_hh + (1.0 - h) * g_ah;
    double norm;
    if (history.seen[t]) {
      norm = pred_here * pi;
      h = 1.0;
    } else {
      const double un_here = pred_here * (1.0 - pi);
      norm = un_here + (1.0 - pred_here);
      h = un_here / norm;
    }
    if (!(norm > 0.0)) {
      throw NumericError("forward filter: zero normalizer for individual '" + history.id +
                         "' at index " + std::to_string(t));
    }
    here[t] = h;
    scale *= norm;
    if (scale < 1e-250) {
      log_sum += std::log(scale);
      scale = 1.0;
    }
  }
  return log_sum + std::log(scale);
}

}  // namespace detail

inline ForwardProbs forward_filter(const CaptureHistory& history, const IndividualParams& p) {
  ForwardProbs fp;
  fp.log_likelihood = detail::forward_filter_into(history, p, fp.here);
  return fp;
}

namespace detail {

// Draws Z_T ~ alpha_T, then Z_t with weight alpha_t(Z_t) * gamma(Z_t -> Z_{t+1}).
// Occasions with alpha_t(Here) == 1 are forced and consume no randomness.
template <class Engine>
void backward_sample_into(std::span<const double> here, const IndividualParams& p,
                          Engine& rng, std::vector<State>& out) {
  const std::size_t n = here.size();
  out.resize(n);
  if (n == 0) return;
  const double g_hh = p.stay_here();
  const double g_aa = p.stay_away();
  auto draw = [&](double prob_here) {
    if (prob_here >= 1.0) return State::Here;
    return uniform01(rng) < prob_here ? State::Here : State::Away;
  };
  out[n - 1] = draw(here[n - 1]);
  for (std::size_t t = n - 1; t-- > 0;) {
    const double h = here[t];
    if (h >= 1.0) {
      out[t] = State::Here;
      continue;
    }
    double w_here, w_away;
    if (out[t + 1] == State::Here) {
      w_here = h * g_hh;
      w_away = (1.0 - h) * (1.0 - g_aa);
    } else {
      w_here = h * (1.0 - g_hh);
      w_away = (1.0 - h) * g_aa;
    }
    const double total = w_here + w_away;
    if (!(total > 0.0)) throw NumericError("backward sampler: degenerate weights");
    out[t] = draw(w_here / total);
  }
}

}  // namespace detail

template <class Engine>
StateChain backward_sample(const ForwardProbs& fp, const IndividualParams& p, Engine& rng) {
  StateChain chain;
  detail::backward_sample_into(fp.here, p, rng, chain.states);
  return chain;
}

struct ChainDraw {
  StateChain chain;
  CountStats counts;
  double log_likelihood = 0.0;
};

// FFBS plus counting for every individual. Individual i draws from substream
// (seed, Ffbs, iteration, i), so the output is independent of `threads`.
// `out` is resized to match and its buffers are reused across calls.
inline void sample_all_chains(std::span<const CaptureHistory> histories,
                              std::span<const IndividualParams> params, std::uint64_t seed,
                              std::uint64_t iteration, std::size_t threads,
                              std::vector<ChainDraw>& out) {
  if (histories.size() != params.size()) {
    throw DomainError("sample_all_chains: one parameter set per history required");
  }
  const std::size_t n = histories.size();
  out.resize(n);
  std::vector<std::string> failures(n);
  parallel_for(n, threads, [&](std::size_t i) {
    thread_local std::vector<double> here;
    try {
      auto rng = substream(seed, Stream::Ffbs, iteration, i);
      out[i].log_likelihood = detail::forward_filter_into(histories[i], params[i], here);
      detail::backward_sample_into(here, params[i], rng, out[i].chain.states);
      out[i].counts = count_stats(out[i].chain, histories[i]);
    } catch (const std::exception& e) {
      failures[i] = histories[i].id + ": " + e.what();
    }
  });
  std::string message;
  for (const auto& f : failures) {
    if (!f.empty()) message += (message.empty() ? "" : "; ") + f;
  }
  if (!message.empty()) throw NumericError("sample_all_chains: " + message);
}

inline std::vector<ChainDraw> sample_all_chains(std::span<const CaptureHistory> histories,
                                                std::span<const IndividualParams> params,
                                                std::uint64_t seed, std::uint64_t iteration,
                                                std::size_t threads = 1) {
  std::vector<ChainDraw> out;
  sample_all_chains(histories, params, seed, iteration, threads, out);
  return out;
}

}  // namespace hmmcr

#endif  // HMMCR_FFBS_HPP
