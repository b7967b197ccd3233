#ifndef HMMCR_DIAGNOSE_HPP
#define HMMCR_DIAGNOSE_HPP

// Trace, density and truth-vs-posterior plots for a samples file.

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "hmmcr/engine.hpp"
#include "hmmcr/io.hpp"
#include "hmmcr/simulate.hpp"
#include "hmmcr/svg.hpp"

namespace hmmcr {

struct DiagnoseReport {
  Summary summary;
  std::vector<std::filesystem::path> files;
  std::string text;
};

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& content,
                       std::vector<std::filesystem::path>& files) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  files.push_back(path);
}

inline std::vector<double> histogram(const std::vector<double>& x, double lo, double width,
                                     std::size_t bins) {
  std::vector<double> h(bins, 0.0);
  for (double v : x) {
    auto k = static_cast<std::size_t>(std::clamp((v - lo) / width, 0.0, bins - 1.0));
    h[k] += 1.0;
  }
  for (auto& v : h) v /= static_cast<double>(x.size()) * width;
  return h;
}

}  // namespace detail

// Truth values are matched to sample individuals by id. hyper_truth holds the
// generating Beta shapes, drawn as vertical lines on traces and densities.
inline DiagnoseReport diagnose(const io::SampleFile& file, const TruthRecord* truth,
                               const std::optional<std::array<BetaShape, 3>>& hyper_truth,
                               const std::filesystem::path& outdir) {
  if (file.samples.empty()) throw DomainError("diagnose: samples file has no samples");
  std::filesystem::create_directories(outdir);
  DiagnoseReport rep;

  std::optional<TruthRecord> aligned;
  if (truth) {
    std::unordered_map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < truth->ids.size(); ++i) pos[truth->ids[i]] = i;
    TruthRecord t;
    for (const auto& id : file.ids) {
      auto it = pos.find(id);
      if (it == pos.end()) throw DomainError("diagnose: no truth for individual '" + id + "'");
      t.ids.push_back(id);
      t.individuals.push_back(truth->individuals[it->second]);
    }
    aligned = std::move(t);
  }
  rep.summary = summarize(file.samples, aligned && !file.ids.empty() ? &*aligned : nullptr);

  const std::size_t n = file.samples.size();
  const std::size_t half = n / 2;
  std::ostringstream text;
  text << "samples: " << n << "\n";
  for (Block b : kBlocks) {
    const auto j = index(b);
    const auto blk = std::string(block_name(b));
    for (int which = 0; which < 2; ++which) {
      const std::string param = which == 0 ? "a" : "b";
      std::vector<double> iter(n), val(n);
      for (std::size_t k = 0; k < n; ++k) {
        iter[k] = static_cast<double>(file.samples[k].iteration);
        val[k] = which == 0 ? file.samples[k].hypers[j].a : file.samples[k].hypers[j].b;
      }
      std::optional<double> true_val;
      if (hyper_truth) true_val = which == 0 ? (*hyper_truth)[j].a : (*hyper_truth)[j].b;

      svg::Plot trace("trace " + blk + " " + param, "iteration", param);
      trace.line({iter.begin(), iter.begin() + half}, {val.begin(), val.begin() + half}, "#1f5fbf",
                 "first half");
      trace.line({iter.begin() + half, iter.end()}, {val.begin() + half, val.end()}, "#c0392b",
                 "second half");
      if (true_val) trace.note("truth " + io::format_double(*true_val));
      std::vector<double> hline_x{iter.front(), iter.back()};
      if (true_val) trace.line(hline_x, {*true_val, *true_val}, "#888888");
      detail::write_file(outdir / ("trace_" + blk + "_" + param + ".svg"), trace.render(), rep.files);

      const auto [lo_it, hi_it] = std::minmax_element(val.begin(), val.end());
      double lo = *lo_it, hi = *hi_it;
      if (!(hi > lo)) { lo -= 0.5; hi += 0.5; }
      const std::size_t bins = 40;
      const double width = (hi - lo) / bins;
      const auto h = detail::histogram(val, lo, width, bins);
      std::vector<double> centers(bins);
      for (std::size_t k = 0; k < bins; ++k) centers[k] = lo + width * (k + 0.5);
      svg::Plot density("density " + blk + " " + param, param, "density");
      density.bars(centers, h, width, "#1f5fbf");
      // Gaussian kernel density, Silverman bandwidth.
      const auto ms = mean_sd(val);
      const double bw = std::max(1e-12, 1.06 * ms.sd * std::pow(static_cast<double>(n), -0.2));
      std::vector<double> gx(200), gy(200);
      for (std::size_t g = 0; g < gx.size(); ++g) {
        gx[g] = lo + (hi - lo) * g / (gx.size() - 1.0);
        double s = 0.0;
        for (double v : val) {
          const double u = (gx[g] - v) / bw;
          s += std::exp(-0.5 * u * u);
        }
        gy[g] = s / (static_cast<double>(n) * bw * std::sqrt(2.0 * std::numbers::pi));
      }
      density.line(gx, gy, "#000000");
      if (true_val) density.vline(*true_val, "#000000");
      detail::write_file(outdir / ("density_" + blk + "_" + param + ".svg"), density.render(),
                         rep.files);

      const auto& ms_hyper = which == 0 ? rep.summary.hypers[j].a : rep.summary.hypers[j].b;
      text << blk << " " << param << ": mean " << io::format_double(ms_hyper.mean) << " sd "
           << io::format_double(ms_hyper.sd);
      if (true_val) text << " truth " << io::format_double(*true_val);
      text << "\n";
    }

    if (rep.summary.correlations) {
      std::vector<double> tx, ex;
      for (std::size_t i = 0; i < aligned->individuals.size(); ++i) {
        tx.push_back(aligned->individuals[i][b]);
        ex.push_back(rep.summary.individual_means[i][b]);
      }
      const double r = (*rep.summary.correlations)[j];
      svg::Plot scatter("truth vs posterior mean " + blk, "true " + blk, "posterior mean");
      scatter.points(tx, ex, "#1f5fbf");
      const auto [mn, mx] = std::minmax_element(tx.begin(), tx.end());
      scatter.line({*mn, *mx}, {*mn, *mx}, "#888888");
      scatter.note("r = " + io::format_double(r));
      detail::write_file(outdir / ("scatter_" + blk + ".svg"), scatter.render(), rep.files);
      text << blk << " correlation(truth, posterior mean): " << io::format_double(r) << "\n";
    }
  }
  rep.text = text.str();
  detail::write_file(outdir / "diagnose.txt", rep.text, rep.files);
  return rep;
}

}  // namespace hmmcr

#endif  // HMMCR_DIAGNOSE_HPP
