#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

namespace cpsphere {

/// Base of every error raised by the library. The message can be extended
/// with context (e.g. which transition or Matsubara index failed) while the
/// dynamic type is preserved for callers that dispatch on it.
class Error : public std::exception {
public:
  explicit Error(std::string message) : message_(std::move(message)) {}

  const char *what() const noexcept override { return message_.c_str(); }

  void prepend_context(const std::string &context) {
    message_ = context + ": " + message_;
  }

private:
  std::string message_;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
  using Error::Error;
};

/// Particle too close to the sphere surface for certified summation.
class NearContactError : public DomainError {
public:
  using DomainError::DomainError;
};

/// An intermediate or final magnitude is not representable in double.
class OverflowError : public Error {
public:
  OverflowError(std::string message, int order, std::complex<double> argument)
      : Error(std::move(message)), order_(order), argument_(argument) {}

  int order() const noexcept { return order_; }
  std::complex<double> argument() const noexcept { return argument_; }

private:
  int order_;
  std::complex<double> argument_;
};

/// Evaluation at (or numerically indistinguishable from) a pole.
class PoleError : public Error {
public:
  using Error::Error;
};

/// Multipole order outside the supported range.
class UnsupportedOrderError : public Error {
public:
  using Error::Error;
};

/// Parameters outside the validity regime of an asymptotic formula.
class RegimeError : public Error {
public:
  using Error::Error;
};

/// A series, continued fraction or quadrature failed to reach tolerance.
class ConvergenceError : public Error {
public:
  ConvergenceError(std::string message, std::complex<double> partial_sum,
                   double estimate, long index)
      : Error(std::move(message)), partial_sum_(partial_sum),
        estimate_(estimate), index_(index) {}

  std::complex<double> partial_sum() const noexcept { return partial_sum_; }
  double estimate() const noexcept { return estimate_; }
  long index() const noexcept { return index_; }

private:
  std::complex<double> partial_sum_;
  double estimate_;
  long index_;
};

/// An internal cross-check failed (e.g. non-real Green's trace at imaginary
/// frequency).
class ConsistencyError : public Error {
public:
  using Error::Error;
};

namespace detail {

inline std::string format_complex(std::complex<double> z) {
  return "(" + std::to_string(z.real()) + "," + std::to_string(z.imag()) + ")";
}

} // namespace detail
} // namespace cpsphere
