#include <sstream>

#include <gtest/gtest.h>

#include "hmmcr/io.hpp"

namespace {

using namespace hmmcr;

TEST(Histories, RoundtripRandomRaggedPopulations) {
  auto rng = substream(1, Stream::Test);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<CaptureHistory> hs;
    const std::size_t horizon = 2 + rng() % 30;
    const std::size_t n = 1 + rng() % 10;
    for (std::size_t i = 0; i < n; ++i) {
      CaptureHistory h{"id" + std::to_string(i), rng() % horizon, {}};
      const std::size_t len = 1 + rng() % (horizon - h.first_occasion);
      h.seen.push_back(1);
      for (std::size_t t = 1; t < len; ++t) h.seen.push_back(uniform01(rng) < 0.5);
      hs.push_back(h);
    }
    std::stringstream ss;
    io::write_histories(ss, hs);
    const auto back = io::read_histories(ss);
    EXPECT_EQ(back.histories, hs);
  }
}

TEST(Histories, MalformedRowNamesLine) {
  std::istringstream in("id,t,x\nz,0,1\na,b,2\n");
  try {
    io::read_histories(in);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("'b'"), std::string::npos);
  }
}

TEST(Histories, StructuralErrors) {
  auto parse = [](const char* s) {
    std::istringstream in(s);
    return io::read_histories(in);
  };
  EXPECT_THROW(parse("id,t\n"), ParseError);
  EXPECT_THROW(parse("id,t,x\na,0,0\n"), ParseError);
  EXPECT_THROW(parse("id,t,x\na,0,1\na,2,0\n"), ParseError);
  EXPECT_THROW(parse("id,t,x\na,0,1\na,1,3\n"), ParseError);
  EXPECT_THROW(parse("id,t,x\na,0\n"), ParseError);
  const auto ok = parse("id,t,x\r\na,0,1\r\nb,2,1\r\na,1,0\r\n");
  ASSERT_EQ(ok.histories.size(), 2u);
  EXPECT_EQ(ok.horizon, 3u);
  EXPECT_EQ(ok.histories[1].first_occasion, 2u);
}

TEST(Truth, Roundtrip) {
  const auto pop = draw_individuals(7, {{{4, 2}, {6, 2}, {15, 5}}}, 3);
  std::stringstream ss;
  io::write_truth(ss, pop.truth);
  const auto back = io::read_truth(ss);
  EXPECT_EQ(back.ids, pop.truth.ids);
  for (std::size_t i = 0; i < 7; ++i) EXPECT_EQ(back.individuals[i].values, pop.truth.individuals[i].values);
}

TEST(Samples, RoundtripBitExact) {
  const auto data = run_design("exploratory", 2, 4, 30);
  RunConfig c;
  c.iterations = 30;
  c.burnin = 10;
  c.theta_thin = 4;
  const auto run = run_chain(data.histories, c, 3);
  std::stringstream ss;
  io::write_samples(ss, run.ids, run.samples);
  const auto back = io::read_samples(ss);
  EXPECT_EQ(back.ids, run.ids);
  ASSERT_EQ(back.samples.size(), run.samples.size());
  for (std::size_t k = 0; k < back.samples.size(); ++k) {
    EXPECT_EQ(back.samples[k].iteration, run.samples[k].iteration);
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_EQ(back.samples[k].hypers[j].a, run.samples[k].hypers[j].a);
      EXPECT_EQ(back.samples[k].hypers[j].logit_sd, run.samples[k].hypers[j].logit_sd);
    }
    ASSERT_EQ(back.samples[k].thetas.size(), run.samples[k].thetas.size());
    for (std::size_t i = 0; i < back.samples[k].thetas.size(); ++i) {
      EXPECT_EQ(back.samples[k].thetas[i].values, run.samples[k].thetas[i].values);
    }
  }
}

TEST(Samples, Errors) {
  std::istringstream bad_block("iter,block,name,value\n1,zz,a,1\n");
  EXPECT_THROW(io::read_samples(bad_block), ParseError);
  std::istringstream bad_name("iter,block,name,value\n1,pi,q,1\n");
  EXPECT_THROW(io::read_samples(bad_name), ParseError);
  std::istringstream empty("iter,block,name,value\n");
  EXPECT_TRUE(io::read_samples(empty).samples.empty());
}

TEST(Config, ParsesNestedSections) {
  const auto j = nlohmann::json::parse(R"({
    "seed": 12,
    "mcmc": {"iterations": 200, "burnin": 50, "thin": 2, "theta_thin": 3},
    "prior": {"kappa0": 0.5},
    "simulation": {"individuals": 9, "horizon": 40,
                   "blocks": {"pi": [2, 3], "gHH": [4, 5], "gAA": [6, 7]}}
  })");
  const auto cfg = io::parse_config(j);
  EXPECT_EQ(cfg.seed, 12u);
  EXPECT_EQ(cfg.run.iterations, 200u);
  EXPECT_EQ(cfg.run.burnin, 50u);
  EXPECT_EQ(cfg.run.thin, 2u);
  EXPECT_EQ(cfg.run.theta_thin, 3u);
  EXPECT_EQ(cfg.run.prior.kappa0, 0.5);
  EXPECT_EQ(cfg.run.prior.alpha_tau, 0.1);
  ASSERT_TRUE(cfg.design);
  EXPECT_EQ(cfg.design->name, "custom");
  EXPECT_EQ(cfg.design->blocks[2], (BetaShape{6, 7}));

  EXPECT_THROW(io::parse_config(nlohmann::json::parse(R"({"mcmc": {"iterations": 5, "burnin": 9}})")),
               ParseError);
  EXPECT_THROW(io::parse_config(nlohmann::json::parse(R"({"simulation": {"individuals": 3}})")),
               ParseError);
  const auto back = io::parse_config(io::to_json(cfg.run));
  EXPECT_EQ(back.run.iterations, cfg.run.iterations);
  EXPECT_EQ(back.run.prior.kappa0, cfg.run.prior.kappa0);
}

TEST(Tables, FormatDoubleIsShortestRoundtrip) {
  for (double v : {0.1, 1.0 / 3.0, 7.98, 1e-300, 12345.678}) {
    EXPECT_EQ(std::stod(io::format_double(v)), v);
  }
  EXPECT_EQ(io::format_double(0.5), "0.5");
}

}  // namespace
