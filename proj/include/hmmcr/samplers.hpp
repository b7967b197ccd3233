#ifndef HMMCR_SAMPLERS_HPP
#define HMMCR_SAMPLERS_HPP

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "hmmcr/error.hpp"
#include "hmmcr/model.hpp"
#include "hmmcr/random.hpp"
#include "hmmcr/specfn.hpp"

namespace hmmcr {

// Full conditional of an individual probability: Beta(y + a, n - y + b).
template <class Engine>
double gibbs_theta(BinomialCount count, const BetaHyper& hyper, Engine& rng) {
  const double y = count.successes;
  const double n = count.trials;
  return clamp_probability(draw_beta(rng, y + hyper.a(), n - y + hyper.b()));
}

struct MomentInversion {
  double a = 1.0;
  double b = 1.0;
  int iterations = 0;
  double residual = 0.0;
};

inline constexpr int kMaxNewtonIterations = 100;
inline constexpr double kNewtonTolerance = 1e-10;

// Solves psi(a) - psi(b) = mean, psi'(a) + psi'(b) = variance for (a, b) by
// Newton-Raphson in (log a, log b) with step halving. Throws
// ConvergenceError carrying the final residual when it fails.
inline MomentInversion moments_to_beta(double mean, double variance) {
  if (!std::isfinite(mean) || !std::isfinite(variance) || !(variance > 0.0)) {
    throw DomainError("moments_to_beta: need finite mean and variance > 0");
  }
  // Large-argument asymptotics: mean ~ log(a/b), variance ~ 1/a + 1/b.
  double u = std::log1p(std::exp(mean)) - std::log(variance);
  double v = std::log1p(std::exp(-mean)) - std::log(variance);
  if (!std::isfinite(u)) u = mean - std::log(variance);
  if (!std::isfinite(v)) v = -mean - std::log(variance);

  auto residual = [&](double lu, double lv, double& f1, double& f2) {
    const double a = std::exp(lu);
    const double b = std::exp(lv);
    f1 = specfn::digamma(a) - specfn::digamma(b) - mean;
    f2 = specfn::trigamma(a) + specfn::trigamma(b) - variance;
    return std::hypot(f1, f2);
  };

  constexpr double kMaxLog = 700.0;
  double f1, f2;
  double norm = residual(u, v, f1, f2);
  int it = 0;
  for (; it < kMaxNewtonIterations && norm >= kNewtonTolerance; ++it) {
    const double a = std::exp(u);
    const double b = std::exp(v);
    // Jacobian with respect to (log a, log b).
    const double j11 = a * specfn::trigamma(a);
    const double j12 = -b * specfn::trigamma(b);
    const double j21 = a * specfn::tetragamma(a);
    const double j22 = b * specfn::tetragamma(b);
    const double det = j11 * j22 - j12 * j21;
    if (!(std::abs(det) > 0.0) || !std::isfinite(det)) break;
    const double du = (j22 * f1 - j12 * f2) / det;
    const double dv = (-j21 * f1 + j11 * f2) / det;

    double step = 1.0;
    bool improved = false;
    for (int halving = 0; halving < 60; ++halving, step *= 0.5) {
      const double nu = u - step * du;
      const double nv = v - step * dv;
      if (std::abs(nu) > kMaxLog || std::abs(nv) > kMaxLog) continue;
      double g1, g2;
      const double trial = residual(nu, nv, g1, g2);
      if (std::isfinite(trial) && trial < norm) {
        u = nu;
        v = nv;
        f1 = g1;
        f2 = g2;
        norm = trial;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  if (!(norm < kNewtonTolerance)) {
    throw ConvergenceError("moments_to_beta: no convergence for mean=" + std::to_string(mean) +
                               ", variance=" + std::to_string(variance),
                           norm);
  }
  return {std::exp(u), std::exp(v), it, norm};
}

inline BetaHyper hyper_from_moments(double mean, double variance) {
  const auto inv = moments_to_beta(mean, variance);
  return BetaHyper(inv.a, inv.b, beta_to_moments(inv.a, inv.b));
}

struct NormalGammaPosterior {
  double mu = 0.0;
  double kappa = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
};

inline NormalGammaPosterior normal_gamma_update(std::span<const double> z,
                                                const HyperPrior& prior) {
  if (z.empty()) throw DomainError("normal_gamma_update: no data");
  const double n = static_cast<double>(z.size());
  double mean = 0.0;
  for (double v : z) {
    if (!std::isfinite(v)) throw DomainError("normal_gamma_update: non-finite datum");
    mean += v;
  }
  mean /= n;
  double ss = 0.0;
  for (double v : z) ss += (v - mean) * (v - mean);
  const double d = mean - prior.mu0;
  NormalGammaPosterior post;
  post.kappa = prior.kappa0 + n;
  post.mu = (prior.kappa0 * prior.mu0 + n * mean) / post.kappa;
  post.alpha = prior.alpha_tau + 0.5 * n;
  post.beta = prior.beta_tau + 0.5 * ss + prior.kappa0 * n * d * d / (2.0 * post.kappa);
  return post;
}

// Log density of (mu, tau) under mu | tau ~ N(m, 1/(k tau)), tau ~ Gamma(al, be).
inline double normal_gamma_logpdf(double mu, double tau, double m, double k, double al,
                                  double be) {
  if (!(tau > 0.0)) return -std::numeric_limits<double>::infinity();
  const double prec = k * tau;
  const double d = mu - m;
  const double log_normal = 0.5 * (std::log(prec) - std::log(2.0 * std::numbers::pi)) -
                            0.5 * prec * d * d;
  const double log_gamma =
      al * std::log(be) - std::lgamma(al) + (al - 1.0) * std::log(tau) - be * tau;
  return log_normal + log_gamma;
}

inline double normal_gamma_logpdf(double mu, double tau, const NormalGammaPosterior& p) {
  return normal_gamma_logpdf(mu, tau, p.mu, p.kappa, p.alpha, p.beta);
}

inline double normal_gamma_logpdf(double mu, double tau, const HyperPrior& p) {
  return normal_gamma_logpdf(mu, tau, p.mu0, p.kappa0, p.alpha_tau, p.beta_tau);
}

// Sufficient statistics of a theta collection for the Beta log-likelihood.
struct BetaSufficient {
  double n = 0.0;
  double sum_log = 0.0;
  double sum_log1m = 0.0;

  explicit BetaSufficient(std::span<const double> thetas) : n(static_cast<double>(thetas.size())) {
    for (double t : thetas) {
      const double p = clamp_probability(t);
      sum_log += std::log(p);
      sum_log1m += std::log1p(-p);
    }
  }

  double loglik(double a, double b) const {
    return (a - 1.0) * sum_log + (b - 1.0) * sum_log1m - n * specfn::log_beta(a, b);
  }
};

struct HyperStep {
  BetaHyper hyper;
  bool accepted = false;
  bool proposal_failed = false;
  std::string failure;
};

// One Independent Metropolis-Hastings update of a Beta hyper block. The
// chain lives on (mu, tau = 1/sigma^2) with (a, b) derived from it; the
// proposal is the Normal-Gamma posterior of the logit thetas, and the target
// is the Beta likelihood of the thetas times the Normal-Gamma hyper-prior.
template <class Engine>
HyperStep imh_hyper_step(std::span<const double> thetas, const BetaHyper& current,
                         const HyperPrior& prior, Engine& rng) {
  HyperStep out{current, false, false, {}};
  std::vector<double> z(thetas.size());
  for (std::size_t i = 0; i < thetas.size(); ++i) z[i] = logit(thetas[i]);
  const auto post = normal_gamma_update(z, prior);

  const double tau_star = draw_gamma(rng, post.alpha, post.beta);
  const double mu_star = draw_normal(rng, post.mu, 1.0 / std::sqrt(post.kappa * tau_star));
  const double u = uniform01(rng);
  if (!(tau_star > 0.0) || !std::isfinite(tau_star) || !std::isfinite(mu_star)) {
    out.proposal_failed = true;
    out.failure = "non-finite proposal";
    return out;
  }

  BetaHyper candidate;
  try {
    candidate = hyper_from_moments(mu_star, 1.0 / tau_star);
  } catch (const std::exception& e) {
    out.proposal_failed = true;
    out.failure = e.what();
    return out;
  }

  const BetaSufficient suff(thetas);
  const double tau_cur = 1.0 / current.logit_variance();
  const double target_cur = suff.loglik(current.a(), current.b()) +
                            normal_gamma_logpdf(current.logit_mean(), tau_cur, prior);
  const double target_new = suff.loglik(candidate.a(), candidate.b()) +
                            normal_gamma_logpdf(mu_star, tau_star, prior);
  const double prop_cur = normal_gamma_logpdf(current.logit_mean(), tau_cur, post);
  const double prop_new = normal_gamma_logpdf(mu_star, tau_star, post);
  const double log_ratio = (target_new - target_cur) - (prop_new - prop_cur);
  if (!std::isfinite(target_new) || !std::isfinite(log_ratio)) {
    out.proposal_failed = !std::isfinite(target_new);
    if (out.proposal_failed) out.failure = "non-finite candidate target";
    return out;
  }
  if (log_ratio >= 0.0 || std::log(u) < log_ratio) {
    out.hyper = candidate;
    out.accepted = true;
  }
  return out;
}

}  // namespace hmmcr

#endif  // HMMCR_SAMPLERS_HPP
