#ifndef HMMCR_IO_HPP
#define HMMCR_IO_HPP

// Delimited-text and JSON formats.
//
//   histories  id,t,x             one row per occasion from first sighting
//   truth      id,pi,gHH,gAA
//   samples    iter,block,name,value
//              name is a, b, logit_mean, logit_sd, or theta:<id>
//   config     JSON {"mcmc": {...}, "prior": {...}, "simulation": {...}}

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "hmmcr/engine.hpp"
#include "hmmcr/error.hpp"
#include "hmmcr/model.hpp"
#include "hmmcr/simulate.hpp"

namespace hmmcr::io {

// Shortest round-trip decimal representation.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class T>
T parse_number(std::string_view field, std::size_t line, const char* what) {
  T value{};
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc{} || ptr != end) {
    throw ParseError(line, std::string("invalid ") + what + " '" + std::string(field) + "'");
  }
  return value;
}

// Reads the header and returns the data lines with their 1-based numbers.
inline std::vector<std::pair<std::size_t, std::string>> read_table(std::istream& in,
                                                                  std::string_view header) {
  std::vector<std::pair<std::size_t, std::string>> rows;
  std::string line;
  std::size_t lineno = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty()) continue;
    if (!seen_header) {
      if (t != header) {
        throw ParseError(lineno, "expected header '" + std::string(header) + "', got '" +
                                     std::string(t) + "'");
      }
      seen_header = true;
      continue;
    }
    rows.emplace_back(lineno, std::string(t));
  }
  if (!seen_header) throw ParseError(0, "missing header '" + std::string(header) + "'");
  return rows;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open " + path);
  return in;
}

}  // namespace detail

struct HistoryFile {
  std::vector<CaptureHistory> histories;
  std::size_t horizon = 0;
};

inline HistoryFile read_histories(std::istream& in) {
  HistoryFile file;
  std::unordered_map<std::string, std::size_t> slot;
  for (const auto& [lineno, row] : detail::read_table(in, "id,t,x")) {
    const auto f = detail::split(row);
    if (f.size() != 3) {
      throw ParseError(lineno, "expected 3 fields in row '" + row + "'");
    }
    if (f[0].empty()) throw ParseError(lineno, "empty id in row '" + row + "'");
    const auto t = detail::parse_number<std::size_t>(f[1], lineno, "occasion");
    const auto x = detail::parse_number<unsigned>(f[2], lineno, "observation");
    if (x > 1) throw ParseError(lineno, "non-binary observation in row '" + row + "'");
    const std::string id(f[0]);
    auto [it, fresh] = slot.try_emplace(id, file.histories.size());
    if (fresh) {
      if (x != 1) throw ParseError(lineno, "first observation of '" + id + "' must be 1");
      file.histories.push_back({id, t, {1}});
    } else {
      auto& h = file.histories[it->second];
      if (t != h.first_occasion + h.size()) {
        throw ParseError(lineno, "occasion " + std::to_string(t) + " of '" + id +
                                     "' is not consecutive");
      }
      h.seen.push_back(static_cast<std::uint8_t>(x));
    }
    file.horizon = std::max(file.horizon, t + 1);
  }
  for (const auto& h : file.histories) validate_history(h, file.horizon);
  return file;
}

inline HistoryFile read_histories(const std::string& path) {
  auto in = detail::open_in(path);
  try {
    return read_histories(in);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path + ": " + e.what());
  }
}

inline void write_histories(std::ostream& out, std::span<const CaptureHistory> histories) {
  out << "id,t,x\n";
  for (const auto& h : histories) {
    for (std::size_t t = 0; t < h.size(); ++t) {
      out << h.id << ',' << h.first_occasion + t << ',' << static_cast<int>(h.seen[t]) << '\n';
    }
  }
}

inline void write_truth(std::ostream& out, const TruthRecord& truth) {
  out << "id,pi,gHH,gAA\n";
  for (std::size_t i = 0; i < truth.individuals.size(); ++i) {
    const auto& p = truth.individuals[i];
    out << truth.ids[i] << ',' << format_double(p.detection()) << ','
        << format_double(p.stay_here()) << ',' << format_double(p.stay_away()) << '\n';
  }
}

inline TruthRecord read_truth(std::istream& in) {
  TruthRecord truth;
  for (const auto& [lineno, row] : detail::read_table(in, "id,pi,gHH,gAA")) {
    const auto f = detail::split(row);
    if (f.size() != 4) throw ParseError(lineno, "expected 4 fields in row '" + row + "'");
    truth.ids.emplace_back(f[0]);
    truth.individuals.emplace_back(detail::parse_number<double>(f[1], lineno, "probability"),
                                   detail::parse_number<double>(f[2], lineno, "probability"),
                                   detail::parse_number<double>(f[3], lineno, "probability"));
  }
  return truth;
}

inline TruthRecord read_truth(const std::string& path) {
  auto in = detail::open_in(path);
  return read_truth(in);
}

inline void write_samples(std::ostream& out, std::span<const std::string> ids,
                          std::span<const PosteriorSample> samples) {
  out << "iter,block,name,value\n";
  for (const auto& s : samples) {
    for (Block b : kBlocks) {
      const auto& h = s.hypers[index(b)];
      const auto blk = block_name(b);
      out << s.iteration << ',' << blk << ",a," << format_double(h.a) << '\n';
      out << s.iteration << ',' << blk << ",b," << format_double(h.b) << '\n';
      out << s.iteration << ',' << blk << ",logit_mean," << format_double(h.logit_mean) << '\n';
      out << s.iteration << ',' << blk << ",logit_sd," << format_double(h.logit_sd) << '\n';
    }
    if (s.thetas.empty()) continue;
    for (Block b : kBlocks) {
      for (std::size_t i = 0; i < s.thetas.size(); ++i) {
        out << s.iteration << ',' << block_name(b) << ",theta:" << ids[i] << ','
            << format_double(s.thetas[i][b]) << '\n';
      }
    }
  }
}

struct SampleFile {
  std::vector<std::string> ids;
  std::vector<PosteriorSample> samples;
};

inline SampleFile read_samples(std::istream& in) {
  SampleFile file;
  std::unordered_map<std::string, std::size_t> id_slot;
  auto block_of = [](std::string_view s, std::size_t lineno) {
    for (Block b : kBlocks) {
      if (block_name(b) == s) return b;
    }
    throw ParseError(lineno, "unknown block '" + std::string(s) + "'");
  };
  for (const auto& [lineno, row] : detail::read_table(in, "iter,block,name,value")) {
    const auto f = detail::split(row);
    if (f.size() != 4) throw ParseError(lineno, "expected 4 fields in row '" + row + "'");
    const auto iter = detail::parse_number<std::size_t>(f[0], lineno, "iteration");
    const Block b = block_of(f[1], lineno);
    const auto value = detail::parse_number<double>(f[3], lineno, "value");
    if (file.samples.empty() || file.samples.back().iteration != iter) {
      if (!file.samples.empty() && iter < file.samples.back().iteration) {
        throw ParseError(lineno, "iterations must be non-decreasing");
      }
      file.samples.push_back({});
      file.samples.back().iteration = iter;
    }
    auto& s = file.samples.back();
    auto& h = s.hypers[index(b)];
    const auto name = f[2];
    if (name == "a") {
      h.a = value;
    } else if (name == "b") {
      h.b = value;
    } else if (name == "logit_mean") {
      h.logit_mean = value;
    } else if (name == "logit_sd") {
      h.logit_sd = value;
    } else if (name.starts_with("theta:")) {
      const std::string id(name.substr(6));
      auto [it, fresh] = id_slot.try_emplace(id, file.ids.size());
      if (fresh) file.ids.push_back(id);
      if (s.thetas.size() <= it->second) s.thetas.resize(it->second + 1);
      s.thetas[it->second].values[index(b)] = value;
    } else {
      throw ParseError(lineno, "unknown name '" + std::string(name) + "'");
    }
  }
  for (const auto& s : file.samples) {
    if (!s.thetas.empty() && s.thetas.size() != file.ids.size()) {
      throw ParseError(0, "iteration " + std::to_string(s.iteration) +
                              " is missing individual thetas");
    }
  }
  return file;
}

inline SampleFile read_samples(const std::string& path) {
  auto in = detail::open_in(path);
  try {
    return read_samples(in);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path + ": " + e.what());
  }
}

inline void write_summary(std::ostream& out, const Summary& s) {
  out << "block,name,mean,sd\n";
  for (Block b : kBlocks) {
    const auto& h = s.hypers[index(b)];
    const auto blk = block_name(b);
    auto row = [&](std::string_view name, const MeanSd& m) {
      out << blk << ',' << name << ',' << format_double(m.mean) << ',' << format_double(m.sd)
          << '\n';
    };
    row("a", h.a);
    row("b", h.b);
    row("logit_mean", h.logit_mean);
    row("logit_sd", h.logit_sd);
    if (s.acceptance) {
      out << blk << ",acceptance," << format_double((*s.acceptance)[index(b)]) << ",0\n";
    }
    if (s.correlations) {
      out << blk << ",correlation," << format_double((*s.correlations)[index(b)]) << ",0\n";
    }
  }
}

inline void write_scaling_table(std::ostream& out, std::span<const ScalingRow> rows) {
  out << "individuals,block,param,mean,sd\n";
  for (const auto& r : rows) {
    for (Block b : kBlocks) {
      const auto& h = r.hypers[index(b)];
      out << r.individuals << ',' << block_name(b) << ",a," << format_double(h.a.mean) << ','
          << format_double(h.a.sd) << '\n';
      out << r.individuals << ',' << block_name(b) << ",b," << format_double(h.b.mean) << ','
          << format_double(h.b.sd) << '\n';
    }
  }
}

inline void write_horizon_table(std::ostream& out, std::span<const HorizonRow> rows) {
  out << "horizon,block,correlation\n";
  for (const auto& r : rows) {
    for (Block b : kBlocks) {
      out << r.horizon << ',' << block_name(b) << ',' << format_double(r.correlation[index(b)])
          << '\n';
    }
  }
}

// Run-level settings read from a JSON config file.
struct ConfigFile {
  RunConfig run;
  std::optional<std::uint64_t> seed;
  std::optional<Design> design;
};

inline ConfigFile parse_config(const nlohmann::json& j) {
  ConfigFile cfg;
  try {
    if (j.contains("mcmc")) {
      const auto& m = j.at("mcmc");
      cfg.run.iterations = m.value("iterations", cfg.run.iterations);
      cfg.run.burnin = m.value("burnin", cfg.run.burnin);
      cfg.run.thin = m.value("thin", cfg.run.thin);
      cfg.run.theta_thin = m.value("theta_thin", cfg.run.theta_thin);
      cfg.run.threads = m.value("threads", cfg.run.threads);
    }
    if (j.contains("prior")) {
      const auto& p = j.at("prior");
      cfg.run.prior.mu0 = p.value("mu0", cfg.run.prior.mu0);
      cfg.run.prior.kappa0 = p.value("kappa0", cfg.run.prior.kappa0);
      cfg.run.prior.alpha_tau = p.value("alpha_tau", cfg.run.prior.alpha_tau);
      cfg.run.prior.beta_tau = p.value("beta_tau", cfg.run.prior.beta_tau);
    }
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("simulation")) {
      const auto& s = j.at("simulation");
      Design d;
      d.name = s.value("design", std::string("custom"));
      if (d.name != "custom") d = named_design(d.name);
      d.individuals = s.value("individuals", d.individuals);
      d.horizon = s.value("horizon", d.horizon);
      if (s.contains("blocks")) {
        for (Block b : kBlocks) {
          const auto ab = s.at("blocks").at(std::string(block_name(b))).get<std::vector<double>>();
          if (ab.size() != 2) throw ParseError(0, "config: block shapes must be [a, b]");
          d.blocks[index(b)] = {ab[0], ab[1]};
        }
      } else if (d.name == "custom") {
        throw ParseError(0, "config: custom simulation requires 'blocks'");
      }
      cfg.design = d;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("config: ") + e.what());
  }
  try {
    cfg.run.validate();
  } catch (const DomainError& e) {
    throw ParseError(0, std::string("config: ") + e.what());
  }
  return cfg;
}

inline ConfigFile read_config(const std::string& path) {
  auto in = detail::open_in(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, path + ": " + e.what());
  }
  return parse_config(j);
}

inline nlohmann::json to_json(const RunConfig& c) {
  return {{"mcmc",
           {{"iterations", c.iterations},
            {"burnin", c.burnin},
            {"thin", c.thin},
            {"theta_thin", c.theta_thin},
            {"threads", c.threads}}},
          {"prior",
           {{"mu0", c.prior.mu0},
            {"kappa0", c.prior.kappa0},
            {"alpha_tau", c.prior.alpha_tau},
            {"beta_tau", c.prior.beta_tau}}}};
}

inline nlohmann::json to_json(const Design& d) {
  nlohmann::json blocks;
  for (Block b : kBlocks) {
    blocks[std::string(block_name(b))] = {d.blocks[index(b)].a, d.blocks[index(b)].b};
  }
  return {{"design", d.name},
          {"individuals", d.individuals},
          {"horizon", d.horizon},
          {"blocks", blocks}};
}

}  // namespace hmmcr::io

#endif  // HMMCR_IO_HPP
