// hmmcr: simulate capture histories, fit the Here/Away model, plot
// diagnostics and rerun the simulation experiments.
//
// Exit codes: 0 success, 1 I/O failure, 2 usage, 3 input parse, 4 numeric.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hmmcr/diagnose.hpp"
#include "hmmcr/engine.hpp"
#include "hmmcr/io.hpp"
#include "hmmcr/simulate.hpp"

namespace fs = std::filesystem;
using namespace hmmcr;

namespace {

enum Exit : int { kOk = 0, kIo = 1, kUsage = 2, kParse = 3, kNumeric = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

std::size_t resolve_threads(std::size_t flag) {
  if (const char* env = std::getenv("HMMCR_THREADS")) {
    try {
      const auto v = std::stoul(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
    throw UsageError(std::string("HMMCR_THREADS must be a positive integer, got '") + env + "'");
  }
  return flag == 0 ? 1 : flag;
}

struct McmcFlags {
  std::optional<std::size_t> iters, burnin, thin;
  std::size_t threads = 1;

  void add(CLI::App* app) {
    app->add_option("--iters", iters, "MCMC iterations");
    app->add_option("--burnin", burnin, "iterations discarded as burn-in");
    app->add_option("--thin", thin, "keep every k-th post-burn-in iteration");
    app->add_option("--threads", threads, "worker threads (results do not depend on it)");
  }

  void apply(RunConfig& c) const {
    if (iters) c.iterations = *iters;
    if (burnin) c.burnin = *burnin;
    if (thin) c.thin = *thin;
    c.threads = resolve_threads(threads);
    try {
      c.validate();
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
  }
};

nlohmann::json acceptance_json(const std::array<double, 3>& acc) {
  nlohmann::json j;
  for (Block b : kBlocks) j[std::string(block_name(b))] = acc[index(b)];
  return j;
}

int cmd_simulate(const std::string& design_name, std::optional<std::size_t> size,
                 std::optional<std::size_t> horizon, std::uint64_t seed,
                 const std::optional<std::string>& config_path, const fs::path& out) {
  Design design;
  if (config_path) {
    const auto cfg = io::read_config(*config_path);
    if (!cfg.design) throw ParseError(0, *config_path + ": no 'simulation' section");
    design = *cfg.design;
    if (size) design.individuals = *size;
    if (horizon) design.horizon = *horizon;
  } else {
    if (design_name == "custom") throw UsageError("--design custom requires --config");
    try {
      design = named_design(design_name, size, horizon);
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
  }
  const auto data = run_design(design, seed);
  fs::create_directories(out);
  {
    auto f = open_out(out / "histories.csv");
    io::write_histories(f, data.histories);
  }
  {
    auto f = open_out(out / "truth.csv");
    io::write_truth(f, data.truth);
  }
  {
    auto f = open_out(out / "config.json");
    f << nlohmann::json{{"seed", seed}, {"simulation", io::to_json(design)}}.dump(2) << '\n';
  }
  std::cout << "wrote " << data.histories.size() << " histories of length " << design.horizon
            << " to " << out.string() << '\n';
  return kOk;
}

int cmd_fit(const std::string& data_path, const std::optional<std::string>& config_path,
            std::optional<std::uint64_t> seed_flag, const McmcFlags& flags, const fs::path& out) {
  io::ConfigFile cfg;
  if (config_path) cfg = io::read_config(*config_path);
  flags.apply(cfg.run);
  const std::uint64_t seed = seed_flag.value_or(cfg.seed.value_or(1));
  const auto data = io::read_histories(data_path);

  const auto start = std::chrono::steady_clock::now();
  const auto run = run_chain(data.histories, cfg.run, seed);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  fs::create_directories(out);
  {
    auto f = open_out(out / "samples.csv");
    io::write_samples(f, run.ids, run.samples);
  }
  nlohmann::json meta = io::to_json(cfg.run);
  meta["seed"] = seed;
  meta["data"] = data_path;
  meta["individuals"] = data.histories.size();
  meta["horizon"] = data.horizon;
  meta["wall_seconds"] = wall;
  std::array<double, 3> acc{};
  for (Block b : kBlocks) acc[index(b)] = run.acceptance_rate(b);
  meta["acceptance"] = acceptance_json(acc);
  meta["proposal_failures"] = run.failures.size();
  nlohmann::json failures = nlohmann::json::array();
  for (std::size_t k = 0; k < std::min<std::size_t>(run.failures.size(), 100); ++k) {
    const auto& f = run.failures[k];
    failures.push_back({{"iteration", f.iteration},
                        {"block", std::string(block_name(f.block))},
                        {"reason", f.reason}});
  }
  meta["first_failures"] = failures;
  if (!run.samples.empty()) {
    const auto s = summarize(run);
    auto f = open_out(out / "summary.csv");
    io::write_summary(f, s);
  }
  {
    auto f = open_out(out / "metadata.json");
    f << meta.dump(2) << '\n';
  }
  std::cout << "fitted " << data.histories.size() << " individuals, " << run.samples.size()
            << " samples, acceptance pi " << acc[0] << " gHH " << acc[1] << " gAA " << acc[2]
            << '\n';
  return kOk;
}

int cmd_diagnose(const std::string& samples_path, const std::optional<std::string>& truth_path,
                 const std::optional<std::string>& design_config, const fs::path& out) {
  const auto samples = io::read_samples(samples_path);
  if (samples.samples.empty()) throw ParseError(0, samples_path + ": no samples");
  std::optional<TruthRecord> truth;
  std::optional<std::array<BetaShape, 3>> hyper_truth;
  std::optional<std::string> cfg_path = design_config;
  if (truth_path) {
    truth = io::read_truth(*truth_path);
    const auto sibling = fs::path(*truth_path).parent_path() / "config.json";
    if (!cfg_path && fs::exists(sibling)) cfg_path = sibling.string();
  }
  if (cfg_path) {
    const auto cfg = io::read_config(*cfg_path);
    if (cfg.design) hyper_truth = cfg.design->blocks;
  }
  const auto rep = diagnose(samples, truth ? &*truth : nullptr, hyper_truth, out);
  std::cout << rep.text;
  return kOk;
}

int cmd_experiment(const std::string& name, std::uint64_t seed, const McmcFlags& flags,
                   std::vector<std::size_t> sizes, std::vector<std::size_t> horizons,
                   const fs::path& out) {
  RunConfig cfg;
  flags.apply(cfg);
  fs::create_directories(out);
  const auto start = std::chrono::steady_clock::now();
  nlohmann::json meta = io::to_json(cfg);
  meta["seed"] = seed;
  meta["experiment"] = name;
  if (name == "scaling") {
    if (sizes.empty()) sizes = {50, 200, 800};
    const std::size_t horizon = horizons.empty() ? 250 : horizons.front();
    const auto rows = scaling_experiment(sizes, seed, cfg, horizon);
    auto f = open_out(out / "scaling.csv");
    io::write_scaling_table(f, rows);
    io::write_scaling_table(std::cout, rows);
    nlohmann::json acc;
    for (const auto& r : rows) acc[std::to_string(r.individuals)] = acceptance_json(r.acceptance);
    meta["acceptance"] = acc;
    meta["sizes"] = sizes;
    meta["horizon"] = horizon;
  } else if (name == "horizon") {
    if (horizons.empty()) horizons = {250, 1000, 4000};
    const std::size_t individuals = sizes.empty() ? 16 : sizes.front();
    const auto rows = horizon_experiment(horizons, seed, cfg, individuals);
    auto f = open_out(out / "horizon.csv");
    io::write_horizon_table(f, rows);
    io::write_horizon_table(std::cout, rows);
    meta["horizons"] = horizons;
    meta["individuals"] = individuals;
  } else {
    throw UsageError("unknown experiment '" + name + "' (expected scaling or horizon)");
  }
  meta["wall_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  auto f = open_out(out / "metadata.json");
  f << meta.dump(2) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical Here/Away mark-recapture model: simulation and MCMC fitting"};
  app.require_subcommand(1, 1);

  std::string design = "exploratory";
  std::optional<std::size_t> size, horizon;
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> fit_seed;
  std::optional<std::string> config;
  std::string out;

  auto* sim = app.add_subcommand("simulate", "simulate a capture-history dataset");
  sim->add_option("--design", design, "exploratory | asymptotic-n | asymptotic-T | custom");
  sim->add_option("--size", size, "number of individuals");
  sim->add_option("--horizon", horizon, "capture-history length");
  sim->add_option("--seed", seed, "random seed");
  sim->add_option("--config", config, "JSON config with a 'simulation' section");
  sim->add_option("--out", out, "output directory")->required();

  std::string data;
  McmcFlags fit_flags;
  auto* fit = app.add_subcommand("fit", "fit the model by MCMC");
  fit->add_option("--data", data, "capture-history file (id,t,x)")->required();
  fit->add_option("--config", config, "JSON config");
  fit->add_option("--seed", fit_seed, "random seed (overrides config)");
  fit_flags.add(fit);
  fit->add_option("--out", out, "output directory")->required();

  std::string samples;
  std::optional<std::string> truth, design_config;
  auto* diag = app.add_subcommand("diagnose", "trace, density and truth-vs-posterior plots");
  diag->add_option("--samples", samples, "samples file (iter,block,name,value)")->required();
  diag->add_option("--truth", truth, "truth file (id,pi,gHH,gAA)");
  diag->add_option("--config", design_config, "simulation config.json with generating shapes");
  diag->add_option("--out", out, "output directory")->required();

  std::string experiment;
  McmcFlags exp_flags;
  std::vector<std::size_t> sizes, horizons;
  auto* exp = app.add_subcommand("experiment", "rerun a simulation experiment end to end");
  exp->add_option("name", experiment, "scaling | horizon")->required();
  exp->add_option("--seed", seed, "random seed");
  exp_flags.add(exp);
  exp->add_option("--size", sizes, "population sizes (scaling) or population (horizon)");
  exp->add_option("--horizon", horizons, "horizons (horizon) or history length (scaling)");
  exp->add_option("--out", out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*sim) return cmd_simulate(design, size, horizon, seed, config, out);
    if (*fit) return cmd_fit(data, config, fit_seed, fit_flags, out);
    if (*diag) return cmd_diagnose(samples, truth, design_config, out);
    if (*exp) return cmd_experiment(experiment, seed, exp_flags, sizes, horizons, out);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const ValidationError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const ConvergenceError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const DomainError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  }
  return kUsage;
}
