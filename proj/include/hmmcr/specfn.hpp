#ifndef HMMCR_SPECFN_HPP
#define HMMCR_SPECFN_HPP

// Log-gamma and the first three polygamma functions on the positive real
// axis. psi, psi' and psi'' shift the argument upward with the recurrence
// until x >= kAsymptoticThreshold, then sum the Bernoulli asymptotic series.

#include <array>
#include <cmath>
#include <string>

#include "hmmcr/error.hpp"

namespace hmmcr::specfn {

inline constexpr double kAsymptoticThreshold = 6.0;

namespace detail {

// Bernoulli numbers B_2, B_4, ..., B_20.
inline constexpr std::array<double, 10> kBernoulli = {
    1.0 / 6.0,         -1.0 / 30.0,     1.0 / 42.0,    -1.0 / 30.0,
    5.0 / 66.0,        -691.0 / 2730.0, 7.0 / 6.0,     -3617.0 / 510.0,
    43867.0 / 798.0,   -174611.0 / 330.0};

inline void require_positive(double x, const char* fn) {
  if (!std::isfinite(x) || x <= 0.0) {
    throw DomainError(std::string(fn) + ": argument must be finite and > 0, got " +
                      std::to_string(x));
  }
}

}  // namespace detail

inline double log_gamma(double x) {
  detail::require_positive(x, "log_gamma");
  return std::lgamma(x);
}

/// Digamma psi(x) = d/dx ln Gamma(x).
inline double digamma(double x) {
  detail::require_positive(x, "digamma");
  double shift = 0.0;
  while (x < kAsymptoticThreshold) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  // psi(x) ~ ln x - 1/(2x) - sum_k B_2k / (2k x^2k)
  const double inv2 = 1.0 / (x * x);
  double series = 0.0;
  for (std::size_t k = detail::kBernoulli.size(); k-- > 0;) {
    series = series * inv2 + detail::kBernoulli[k] / (2.0 * static_cast<double>(k + 1));
  }
  series *= inv2;
  return shift + std::log(x) - 0.5 / x - series;
}

/// Trigamma psi'(x).
inline double trigamma(double x) {
  detail::require_positive(x, "trigamma");
  double shift = 0.0;
  while (x < kAsymptoticThreshold) {
    shift += 1.0 / (x * x);
    x += 1.0;
  }
  // psi'(x) ~ 1/x + 1/(2x^2) + sum_k B_2k / x^(2k+1)
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double series = 0.0;
  for (std::size_t k = detail::kBernoulli.size(); k-- > 0;) {
    series = series * inv2 + detail::kBernoulli[k];
  }
  series *= inv2 * inv;
  return shift + inv + 0.5 * inv2 + series;
}

/// Tetragamma psi''(x).
inline double tetragamma(double x) {
  detail::require_positive(x, "tetragamma");
  double shift = 0.0;
  while (x < kAsymptoticThreshold) {
    shift -= 2.0 / (x * x * x);
    x += 1.0;
  }
  // psi''(x) ~ -1/x^2 - 1/x^3 - sum_k (2k+1) B_2k / x^(2k+2)
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double series = 0.0;
  for (std::size_t k = detail::kBernoulli.size(); k-- > 0;) {
    series = series * inv2 + (2.0 * static_cast<double>(k + 1) + 1.0) * detail::kBernoulli[k];
  }
  series *= inv2 * inv2;
  return shift - inv2 - inv2 * inv - series;
}

inline double log_beta(double a, double b) {
  detail::require_positive(a, "log_beta");
  detail::require_positive(b, "log_beta");
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

}  // namespace hmmcr::specfn

#endif  // HMMCR_SPECFN_HPP
