#include <cmath>

#include <gtest/gtest.h>

#include "hmmcr/ffbs.hpp"
#include "oracles.hpp"

namespace {

using namespace hmmcr;

CaptureHistory history(std::vector<std::uint8_t> x) { return {"x", 0, std::move(x)}; }

std::uint32_t encode(const StateChain& z) {
  std::uint32_t bits = 0;
  for (std::size_t t = 0; t < z.size(); ++t) {
    if (z.states[t] == State::Here) bits |= 1u << t;
  }
  return bits;
}

CaptureHistory random_history(Rng& rng, std::size_t n) {
  CaptureHistory h{"r", 0, std::vector<std::uint8_t>(n, 0)};
  h.seen[0] = 1;
  for (std::size_t t = 1; t < n; ++t) h.seen[t] = uniform01(rng) < 0.4 ? 1 : 0;
  return h;
}

IndividualParams random_params(Rng& rng) {
  return {0.05 + 0.9 * uniform01(rng), 0.05 + 0.9 * uniform01(rng), 0.05 + 0.9 * uniform01(rng)};
}

TEST(ForwardFilter, SingleOccasion) {
  const auto fp = forward_filter(history({1}), {0.3, 0.4, 0.5});
  ASSERT_EQ(fp.here.size(), 1u);
  EXPECT_EQ(fp.here[0], 1.0);
  EXPECT_EQ(fp.away(0), 0.0);
  EXPECT_EQ(fp.log_likelihood, 0.0);
}

TEST(ForwardFilter, HandRecursion) {
  // Unnormalized (0.8 * 0.5, 0.2 * 1.0) -> (2/3, 1/3).
  const auto fp = forward_filter(history({1, 0}), {0.5, 0.8, 0.7});
  EXPECT_NEAR(fp.here[1], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(fp.away(1), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(fp.log_likelihood, std::log(0.6), 1e-15);
}

TEST(ForwardFilter, SightingForcesHere) {
  const auto fp = forward_filter(history({1, 1}), {0.5, 0.8, 0.7});
  EXPECT_EQ(fp.here[1], 1.0);
  EXPECT_NEAR(fp.log_likelihood, std::log(0.4), 1e-15);
}

TEST(ForwardFilter, LikelihoodMatchesEnumeration) {
  auto rng = substream(3, Stream::Test);
  for (int rep = 0; rep < 50; ++rep) {
    const auto h = random_history(rng, 2 + rep % 9);
    const auto p = random_params(rng);
    const auto fp = forward_filter(h, p);
    const auto oracle = oracle::enumerate_paths(h, p);
    EXPECT_NEAR(fp.log_likelihood, std::log(oracle.likelihood), 1e-10);
    const auto marg = oracle::here_marginals(oracle, h.size());
    // The filter and smoother agree at the final occasion.
    EXPECT_NEAR(fp.here.back(), marg.back(), 1e-12);
  }
}

TEST(ForwardFilter, LongHorizonDoesNotUnderflow) {
  auto rng = substream(5, Stream::Test);
  const auto h = random_history(rng, 4000);
  const auto fp = forward_filter(h, {0.3, 0.6, 0.9});
  EXPECT_TRUE(std::isfinite(fp.log_likelihood));
  EXPECT_LT(fp.log_likelihood, -700.0);
  for (double v : fp.here) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(BackwardSample, AllSeenIsDeterministic) {
  auto rng = substream(1, Stream::Test);
  const auto h = history({1, 1, 1});
  const IndividualParams p(0.5, 0.8, 0.7);
  const auto fp = forward_filter(h, p);
  for (int i = 0; i < 100; ++i) {
    const auto z = backward_sample(fp, p, rng);
    EXPECT_EQ(encode(z), 0b111u);
  }
}

TEST(BackwardSample, TerminalMarginal) {
  auto rng = substream(2, Stream::Test);
  const auto h = history({1, 0});
  const IndividualParams p(0.5, 0.8, 0.7);
  const auto fp = forward_filter(h, p);
  const int draws = 100000;
  int here = 0;
  for (int i = 0; i < draws; ++i) here += backward_sample(fp, p, rng).states[1] == State::Here;
  const double se = std::sqrt((2.0 / 9.0) / draws);
  EXPECT_NEAR(static_cast<double>(here) / draws, 2.0 / 3.0, 4 * se);
}

TEST(BackwardSample, PathDistributionMatchesEnumeration) {
  auto rng = substream(4, Stream::Test);
  for (int rep = 0; rep < 3; ++rep) {
    const auto h = random_history(rng, 8);
    const auto p = random_params(rng);
    const auto fp = forward_filter(h, p);
    const auto oracle = oracle::enumerate_paths(h, p);
    std::vector<double> freq(oracle.prob.size(), 0.0);
    const int draws = 50000;
    for (int i = 0; i < draws; ++i) {
      const auto z = backward_sample(fp, p, rng);
      for (std::size_t t = 0; t < z.size(); ++t) {
        if (h.seen[t]) {
          ASSERT_EQ(z.states[t], State::Here);
        }
      }
      freq[encode(z)] += 1.0 / draws;
    }
    for (std::size_t k = 0; k < freq.size(); ++k) EXPECT_NEAR(freq[k], oracle.prob[k], 0.01);
  }
}

TEST(SampleAllChains, EmptyAndSingle) {
  std::vector<CaptureHistory> none;
  std::vector<IndividualParams> no_params;
  EXPECT_TRUE(sample_all_chains(none, no_params, 1, 1).empty());

  std::vector<CaptureHistory> one{history({1})};
  std::vector<IndividualParams> params{IndividualParams(0.5, 0.5, 0.5)};
  const auto out = sample_all_chains(one, params, 1, 1);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].chain.states, std::vector<State>{State::Here});
  EXPECT_EQ(out[0].counts[Block::Detection], (BinomialCount{1, 1}));
  EXPECT_EQ(out[0].counts[Block::StayHere], (BinomialCount{0, 0}));
  EXPECT_EQ(out[0].counts[Block::StayAway], (BinomialCount{0, 0}));
}

TEST(SampleAllChains, IndependentOfThreadCount) {
  auto rng = substream(8, Stream::Test);
  std::vector<CaptureHistory> hs;
  std::vector<IndividualParams> ps;
  for (int i = 0; i < 37; ++i) {
    hs.push_back(random_history(rng, 50 + i));
    ps.push_back(random_params(rng));
  }
  const auto serial = sample_all_chains(hs, ps, 99, 7, 1);
  for (std::size_t threads : {2u, 3u, 8u}) {
    const auto par = sample_all_chains(hs, ps, 99, 7, threads);
    ASSERT_EQ(par.size(), serial.size());
    for (std::size_t i = 0; i < par.size(); ++i) {
      EXPECT_EQ(par[i].chain, serial[i].chain);
      EXPECT_EQ(par[i].counts, serial[i].counts);
      EXPECT_EQ(par[i].log_likelihood, serial[i].log_likelihood);
    }
  }
}

TEST(SampleAllChains, MismatchedInputs) {
  std::vector<CaptureHistory> hs{history({1})};
  std::vector<IndividualParams> ps;
  EXPECT_THROW(sample_all_chains(hs, ps, 1, 1), DomainError);
}

}  // namespace
