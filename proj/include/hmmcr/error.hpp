#ifndef HMMCR_ERROR_HPP
#define HMMCR_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hmmcr {

// Argument outside the mathematical domain of a function (x <= 0, NaN, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Capture history or chain violates a structural invariant.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::size_t index, const std::string& what)
      : std::invalid_argument(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

// Malformed input file. line is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error(line == 0 ? what
                                     : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Fatal numeric failure inside the sampler (underflow, non-finite state).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Newton-Raphson failed to reach the residual tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Scale matrix is not symmetric positive definite.
class FactorizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hmmcr

#endif  // HMMCR_ERROR_HPP
