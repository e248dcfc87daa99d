#pragma once

#include <stdexcept>
#include <string>

namespace excursia {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid model specification or parameters.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Laplace transform requested at or beyond its convergence boundary.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, double boundary)
      : Error(what), boundary_(boundary) {}
  [[nodiscard]] double boundary() const noexcept { return boundary_; }

 private:
  double boundary_;
};

/// Evaluation at a pole of a transform.
class PoleError : public Error {
 public:
  using Error::Error;
};

/// No sign change of the pole equation inside the search bracket.
class PoleNotFound : public Error {
 public:
  PoleNotFound(const std::string& what, double lo, double hi, double h_lo,
               double h_hi)
      : Error(what), lo_(lo), hi_(hi), h_lo_(h_lo), h_hi_(h_hi) {}
  [[nodiscard]] double lo() const noexcept { return lo_; }
  [[nodiscard]] double hi() const noexcept { return hi_; }
  [[nodiscard]] double h_lo() const noexcept { return h_lo_; }
  [[nodiscard]] double h_hi() const noexcept { return h_hi_; }

 private:
  double lo_, hi_, h_lo_, h_hi_;
};

/// The model does not satisfy the hypotheses needed for the operation.
class ValidityError : public Error {
 public:
  ValidityError(const std::string& what, std::string verdict)
      : Error(what), verdict_(std::move(verdict)) {}
  [[nodiscard]] const std::string& verdict() const noexcept { return verdict_; }

 private:
  std::string verdict_;
};

/// Tail regression with fewer than two distinct order statistics.
class DegenerateTail : public Error {
 public:
  using Error::Error;
};

/// Misconfigured sampler (e.g. a rejection envelope that does not dominate).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

}  // namespace excursia
