#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace cpsphere {

/// Complex number with an explicit binary exponent, value = mantissa * 2^exponent.
///
/// Spherical Bessel and Hankel functions of high order at small argument
/// span far more than the double exponent range, while the products that
/// enter the Green's trace (j_l(phi x) h_l(x)^2 / h_l(phi x), ...) are
/// moderate. Carrying the exponent separately lets those products be formed
/// without intermediate overflow or underflow.
class ScaledComplex {
public:
  using complex = std::complex<double>;

  constexpr ScaledComplex() = default;

  ScaledComplex(complex value) : mantissa_(value), exponent_(0) { normalize(); }

  ScaledComplex(complex mantissa, long exponent)
      : mantissa_(mantissa), exponent_(exponent) {
    normalize();
  }

  /// e^w without forming the (possibly unrepresentable) real exponential.
  static ScaledComplex exp(complex w) {
    const double base2 = w.real() / std::numbers::ln2;
    const double whole = std::floor(base2);
    const double frac = (base2 - whole) * std::numbers::ln2;
    return {std::polar(std::exp(frac), w.imag()), static_cast<long>(whole)};
  }

  const complex &mantissa() const noexcept { return mantissa_; }
  long exponent() const noexcept { return exponent_; }
  bool is_zero() const noexcept { return mantissa_ == complex{}; }

  /// log2 |value|; -infinity for zero.
  double log2_abs() const {
    if (is_zero())
      return -std::numeric_limits<double>::infinity();
    return std::log2(std::abs(mantissa_)) + static_cast<double>(exponent_);
  }

  /// The plain complex value. Values below the double range flush to zero;
  /// values above it return infinite components, use fits() to check first.
  complex value() const {
    if (is_zero())
      return {};
    if (exponent_ > 2000)
      return {std::copysign(HUGE_VAL, mantissa_.real()),
              std::copysign(HUGE_VAL, mantissa_.imag())};
    if (exponent_ < -2200)
      return {};
    const int e = static_cast<int>(exponent_);
    return {std::ldexp(mantissa_.real(), e), std::ldexp(mantissa_.imag(), e)};
  }

  bool fits() const {
    const complex v = value();
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  }

  ScaledComplex &operator*=(const ScaledComplex &rhs) {
    mantissa_ *= rhs.mantissa_;
    exponent_ += rhs.exponent_;
    normalize();
    return *this;
  }

  ScaledComplex &operator/=(const ScaledComplex &rhs) {
    mantissa_ /= rhs.mantissa_;
    exponent_ -= rhs.exponent_;
    normalize();
    return *this;
  }

  ScaledComplex &operator+=(const ScaledComplex &rhs) {
    if (rhs.is_zero())
      return *this;
    if (is_zero())
      return *this = rhs;
    if (exponent_ >= rhs.exponent_) {
      mantissa_ += shifted(rhs.mantissa_, rhs.exponent_ - exponent_);
    } else {
      mantissa_ = rhs.mantissa_ + shifted(mantissa_, exponent_ - rhs.exponent_);
      exponent_ = rhs.exponent_;
    }
    normalize();
    return *this;
  }

  ScaledComplex operator-() const {
    ScaledComplex out = *this;
    out.mantissa_ = -out.mantissa_;
    return out;
  }

  ScaledComplex &operator-=(const ScaledComplex &rhs) { return *this += -rhs; }

  friend ScaledComplex conj(ScaledComplex a) {
    a.mantissa_ = std::conj(a.mantissa_);
    return a;
  }

  friend ScaledComplex operator*(ScaledComplex a, const ScaledComplex &b) {
    return a *= b;
  }
  friend ScaledComplex operator/(ScaledComplex a, const ScaledComplex &b) {
    return a /= b;
  }
  friend ScaledComplex operator+(ScaledComplex a, const ScaledComplex &b) {
    return a += b;
  }
  friend ScaledComplex operator-(ScaledComplex a, const ScaledComplex &b) {
    return a -= b;
  }
  friend ScaledComplex operator*(ScaledComplex a, complex b) {
    a.mantissa_ *= b;
    a.normalize();
    return a;
  }
  friend ScaledComplex operator*(complex b, ScaledComplex a) { return a * b; }

private:
  static complex shifted(complex m, long by) {
    if (by < -1100)
      return {};
    const int e = static_cast<int>(by);
    return {std::ldexp(m.real(), e), std::ldexp(m.imag(), e)};
  }

  void normalize() {
    const double scale = std::max(std::abs(mantissa_.real()),
                                  std::abs(mantissa_.imag()));
    if (scale == 0.0 || !std::isfinite(scale)) {
      if (scale == 0.0) {
        mantissa_ = {};
        exponent_ = 0;
      }
      return;
    }
    int shift = 0;
    std::frexp(scale, &shift);
    mantissa_ = {std::ldexp(mantissa_.real(), -shift),
                 std::ldexp(mantissa_.imag(), -shift)};
    exponent_ += shift;
  }

  complex mantissa_{};
  long exponent_ = 0;
};

} // namespace cpsphere
