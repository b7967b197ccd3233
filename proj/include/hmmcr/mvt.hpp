#ifndef HMMCR_MVT_HPP
#define HMMCR_MVT_HPP

// Multivariate Student-t proposal and the fixed-proposal Independent
// Metropolis-Hastings step used for fixed-effect blocks.

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "hmmcr/error.hpp"
#include "hmmcr/random.hpp"

namespace hmmcr {

class MvtProposal {
 public:
  MvtProposal(Eigen::VectorXd mean, Eigen::MatrixXd scale, double dof)
      : mean_(std::move(mean)), scale_(std::move(scale)), dof_(dof) {
    const auto d = mean_.size();
    if (d == 0 || scale_.rows() != d || scale_.cols() != d) {
      throw FactorizationError("MvtProposal: scale must be a square matrix matching the mean");
    }
    if (!(dof_ > 2.0) || !std::isfinite(dof_)) {
      throw DomainError("MvtProposal: degrees of freedom must exceed 2");
    }
    if (!scale_.isApprox(scale_.transpose(), 1e-12)) {
      throw FactorizationError("MvtProposal: scale matrix is not symmetric");
    }
    llt_.compute(scale_);
    if (llt_.info() != Eigen::Success) {
      throw FactorizationError("MvtProposal: scale matrix is not positive definite");
    }
    const Eigen::MatrixXd l = llt_.matrixL();
    log_det_ = 2.0 * l.diagonal().array().log().sum();
  }

  Eigen::Index dim() const noexcept { return mean_.size(); }
  const Eigen::VectorXd& mean() const noexcept { return mean_; }
  const Eigen::MatrixXd& scale() const noexcept { return scale_; }
  double dof() const noexcept { return dof_; }

  // mean + L z sqrt(dof / g), z ~ N(0, I), g ~ chi^2(dof).
  template <class Engine>
  Eigen::VectorXd sample(Engine& rng) const {
    Eigen::VectorXd z(dim());
    for (Eigen::Index i = 0; i < dim(); ++i) z[i] = draw_normal(rng);
    const double g = std::chi_squared_distribution<double>(dof_)(rng);
    return mean_ + llt_.matrixL() * z * std::sqrt(dof_ / g);
  }

  double logpdf(const Eigen::VectorXd& x) const {
    if (x.size() != dim()) throw DomainError("MvtProposal::logpdf: dimension mismatch");
    const double d = static_cast<double>(dim());
    const Eigen::VectorXd w = llt_.matrixL().solve(x - mean_);
    const double maha = w.squaredNorm();
    return std::lgamma(0.5 * (dof_ + d)) - std::lgamma(0.5 * dof_) -
           0.5 * d * std::log(dof_ * std::numbers::pi) - 0.5 * log_det_ -
           0.5 * (dof_ + d) * std::log1p(maha / dof_);
  }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd scale_;
  double dof_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double log_det_ = 0.0;
};

template <class Engine>
Eigen::VectorXd mvt_sample(const MvtProposal& p, Engine& rng) {
  return p.sample(rng);
}

inline double mvt_logpdf(const MvtProposal& p, const Eigen::VectorXd& x) { return p.logpdf(x); }

// {"mean": [..], "scale": [row-major ..], "dof": 5}
inline MvtProposal mvt_from_json(const nlohmann::json& j) {
  try {
    const auto mean_v = j.at("mean").get<std::vector<double>>();
    const auto scale_v = j.at("scale").get<std::vector<double>>();
    const double dof = j.value("dof", 5.0);
    const auto d = static_cast<Eigen::Index>(mean_v.size());
    if (static_cast<Eigen::Index>(scale_v.size()) != d * d) {
      throw ParseError(0, "mvt proposal: scale must hold dim*dim entries");
    }
    Eigen::VectorXd mean = Eigen::Map<const Eigen::VectorXd>(mean_v.data(), d);
    Eigen::MatrixXd scale(d, d);
    for (Eigen::Index r = 0; r < d; ++r) {
      for (Eigen::Index c = 0; c < d; ++c) scale(r, c) = scale_v[r * d + c];
    }
    return MvtProposal(std::move(mean), std::move(scale), dof);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("mvt proposal: ") + e.what());
  }
}

inline MvtProposal load_mvt_proposal(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, path + ": " + e.what());
  }
  return mvt_from_json(j);
}

struct FixedStep {
  Eigen::VectorXd value;
  bool accepted = false;
};

// Independent MH with a fixed proposal. log_target maps a vector to a log
// density; candidates with a non-finite log target are rejected.
template <class LogTarget, class Engine>
FixedStep imh_fixed_step(const Eigen::VectorXd& current, LogTarget&& log_target,
                         const MvtProposal& p, Engine& rng) {
  Eigen::VectorXd cand = p.sample(rng);
  const double u = uniform01(rng);
  const double t_cand = log_target(cand);
  if (!std::isfinite(t_cand)) return {current, false};
  const double t_cur = log_target(current);
  const double log_ratio = (t_cand - t_cur) - (p.logpdf(cand) - p.logpdf(current));
  if (log_ratio >= 0.0 || std::log(u) < log_ratio) return {std::move(cand), true};
  return {current, false};
}

}  // namespace hmmcr

#endif  // HMMCR_MVT_HPP
