#include <gtest/gtest.h>

#include "hmmcr/engine.hpp"

namespace {

using namespace hmmcr;

RunConfig small_config(std::size_t iters, std::size_t burn) {
  RunConfig c;
  c.iterations = iters;
  c.burnin = burn;
  c.theta_thin = 5;
  return c;
}

TEST(RunChain, NoPostBurninIterations) {
  const auto data = run_design("asymptotic-n", 1, 5, 20);
  RunConfig c = small_config(0, 0);
  const auto r = run_chain(data.histories, c, 1);
  EXPECT_TRUE(r.samples.empty());
  EXPECT_THROW(summarize(r.samples), DomainError);
}

TEST(RunChain, BurninAndThinning) {
  const auto data = run_design("asymptotic-n", 2, 5, 20);
  RunConfig c = small_config(100, 40);
  c.thin = 3;
  const auto r = run_chain(data.histories, c, 9);
  ASSERT_EQ(r.samples.size(), 20u);
  EXPECT_EQ(r.samples.front().iteration, 43u);
  EXPECT_EQ(r.samples.back().iteration, 100u);
  std::size_t with_thetas = 0;
  for (const auto& s : r.samples) with_thetas += !s.thetas.empty();
  EXPECT_EQ(with_thetas, 4u);
  EXPECT_FALSE(r.samples.front().thetas.empty());
}

TEST(RunChain, DeterministicAndThreadIndependent) {
  const auto data = run_design("exploratory", 3, 12, 60);
  RunConfig c = small_config(60, 10);
  const auto r1 = run_chain(data.histories, c, 77);
  const auto r2 = run_chain(data.histories, c, 77);
  c.threads = 4;
  const auto r3 = run_chain(data.histories, c, 77);
  ASSERT_EQ(r1.samples.size(), r2.samples.size());
  for (std::size_t k = 0; k < r1.samples.size(); ++k) {
    for (std::size_t b = 0; b < 3; ++b) {
      EXPECT_EQ(r1.samples[k].hypers[b].a, r2.samples[k].hypers[b].a);
      EXPECT_EQ(r1.samples[k].hypers[b].a, r3.samples[k].hypers[b].a);
      EXPECT_EQ(r1.samples[k].hypers[b].b, r3.samples[k].hypers[b].b);
    }
  }
  EXPECT_EQ(r1.accepted, r3.accepted);
}

TEST(RunChain, InvariantsHoldEveryIteration) {
  const auto data = run_design("exploratory", 4, 10, 80);
  const RunConfig c = small_config(50, 0);
  std::size_t calls = 0;
  const auto r = run_chain(data.histories, c, 5, [&](const ChainState& s, auto draws) {
    ++calls;
    ASSERT_EQ(draws.size(), data.histories.size());
    for (std::size_t i = 0; i < draws.size(); ++i) {
      const auto& h = data.histories[i];
      for (std::size_t t = 0; t < h.size(); ++t) {
        if (h.seen[t]) {
          ASSERT_EQ(draws[i].chain.states[t], State::Here);
        }
      }
    }
    for (std::size_t b = 0; b < 3; ++b) {
      ASSERT_LE(s.accepted[b], s.iteration);
      ASSERT_EQ(s.attempted[b], s.iteration);
    }
  });
  EXPECT_EQ(calls, 50u);
  for (Block b : kBlocks) {
    EXPECT_EQ(r.acceptance_rate(b),
              static_cast<double>(r.accepted[index(b)]) / static_cast<double>(r.attempted[index(b)]));
  }
  for (const auto& s : r.samples) {
    for (const auto& h : s.hypers) {
      const auto m = beta_to_moments(h.a, h.b);
      EXPECT_NEAR(h.logit_mean, m.mean, 1e-10);
      EXPECT_NEAR(h.logit_sd, std::sqrt(m.variance), 1e-10);
    }
  }
}

TEST(RunChain, RejectsBadInput) {
  std::vector<CaptureHistory> none;
  EXPECT_THROW(run_chain(none, small_config(10, 0), 1), DomainError);
  std::vector<CaptureHistory> bad{{"x", 0, {0, 1}}};
  EXPECT_THROW(run_chain(bad, small_config(10, 0), 1), ValidationError);
}

TEST(RunChain, RaggedStarts) {
  std::vector<CaptureHistory> hs{{"a", 0, {1, 0, 1, 1, 0}}, {"b", 3, {1, 0}}, {"c", 1, {1, 1, 0, 0}}};
  const auto r = run_chain(hs, small_config(200, 100), 3);
  EXPECT_EQ(r.samples.size(), 100u);
}

TEST(Summarize, ConstantSamplesHaveZeroSd) {
  std::vector<PosteriorSample> s(10);
  for (std::size_t k = 0; k < s.size(); ++k) {
    s[k].iteration = k + 1;
    s[k].hypers.fill({3.0, 2.0, 0.1, 0.9});
    s[k].thetas = {IndividualParams(0.2, 0.3, 0.4), IndividualParams(0.5, 0.6, 0.7)};
  }
  const auto sum = summarize(s);
  for (const auto& h : sum.hypers) {
    EXPECT_EQ(h.a.sd, 0.0);
    EXPECT_EQ(h.a.mean, 3.0);
    EXPECT_EQ(h.b.sd, 0.0);
  }
  ASSERT_EQ(sum.individual_means.size(), 2u);
  EXPECT_NEAR(sum.individual_means[1].stay_away(), 0.7, 1e-15);

  TruthRecord truth;
  truth.ids = {"a", "b"};
  truth.individuals = {IndividualParams(0.1, 0.1, 0.1), IndividualParams(0.9, 0.9, 0.9)};
  const auto with_truth = summarize(s, &truth);
  ASSERT_TRUE(with_truth.correlations);
  EXPECT_NEAR((*with_truth.correlations)[0], 1.0, 1e-12);
}

TEST(Summarize, Pearson) {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{2, 4, 6, 8};
  const std::vector<double> z{8, 6, 4, 2};
  EXPECT_NEAR(pearson(x, y), 1.0, 1e-15);
  EXPECT_NEAR(pearson(x, z), -1.0, 1e-15);
}

TEST(Experiments, ScalingIsReproducible) {
  RunConfig c = small_config(40, 20);
  const std::vector<std::size_t> sizes{5, 10};
  const auto a = scaling_experiment(sizes, 7, c, 30);
  c.threads = 3;
  const auto b = scaling_experiment(sizes, 7, c, 30);
  ASSERT_EQ(a.size(), 2u);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].individuals, sizes[k]);
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_EQ(a[k].hypers[j].a.mean, b[k].hypers[j].a.mean);
      EXPECT_EQ(a[k].hypers[j].b.sd, b[k].hypers[j].b.sd);
    }
  }
}

TEST(Experiments, HorizonProducesCorrelations) {
  const RunConfig c = small_config(60, 20);
  const std::vector<std::size_t> horizons{30, 60};
  const auto rows = horizon_experiment(horizons, 3, c, 6);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) {
    for (double v : r.correlation) {
      EXPECT_GE(v, -1.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

}  // namespace
