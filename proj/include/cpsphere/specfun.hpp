#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "cpsphere/errors.hpp"
#include "cpsphere/scaled_complex.hpp"

/// Spherical Bessel j_l and Hankel h_l^(1) functions of complex argument,
/// their Riccati derivatives [z f_l(z)]' and the logarithmic-derivative ratio
/// used by the Mie coefficients.
///
/// The sequence routines return every order 0..lmax in scaled form so that
/// high orders at small argument (which leave the double range in either
/// direction) can still be combined into moderate products.
namespace cpsphere::specfun {

using complex = std::complex<double>;

namespace detail {

/// Below this |z| the power series is used for j_l; Miller's recurrence
/// would need more rescaling steps than the exponent range allows.
inline constexpr double kSeriesThreshold = 1e-100;

inline ScaledComplex scaled_sin(complex z) {
  if (std::abs(z.imag()) < 600.0)
    return ScaledComplex(std::sin(z));
  const complex i{0.0, 1.0};
  return (ScaledComplex::exp(i * z) - ScaledComplex::exp(-i * z)) *
         complex{0.0, -0.5};
}

inline ScaledComplex scaled_cos(complex z) {
  if (std::abs(z.imag()) < 600.0)
    return ScaledComplex(std::cos(z));
  const complex i{0.0, 1.0};
  return (ScaledComplex::exp(i * z) + ScaledComplex::exp(-i * z)) *
         complex{0.5, 0.0};
}

/// log((2n+1)!!) via the gamma function; exact enough for scaling purposes
/// and free of overflow for any order the library accepts.
inline double log_double_factorial_odd(int n) {
  // (2n+1)!! = (2n+1)! / (2^n n!)
  return std::lgamma(2.0 * n + 2.0) - n * std::log(2.0) -
         std::lgamma(n + 1.0);
}

/// Start order for the downward recurrence. Beyond max(l, |z|) the ratio of
/// the minimal to the dominant solution falls off super-exponentially; the
/// sqrt term covers the transition region where |z| ~ l.
inline int miller_start(int lmax, double abs_z) {
  const double scale = std::max(static_cast<double>(lmax), abs_z);
  return static_cast<int>(std::ceil(scale + 20.0 + 4.0 * std::sqrt(scale + 1.0)));
}

inline void check_order(int l) {
  if (l < 0)
    throw DomainError("spherical Bessel order must be non-negative, got " +
                      std::to_string(l));
}

inline std::vector<ScaledComplex> bessel_j_series(int lmax, complex z) {
  std::vector<ScaledComplex> out(lmax + 1);
  const complex z2 = z * z;
  ScaledComplex power(1.0);
  for (int l = 0; l <= lmax; ++l) {
    if (l > 0)
      power *= ScaledComplex(z);
    const double log_df = log_double_factorial_odd(l);
    const double log2_df = log_df / std::log(2.0);
    const double whole = std::floor(log2_df);
    const ScaledComplex inv_df(std::exp2(-(log2_df - whole)),
                               -static_cast<long>(whole));
    const complex corr = 1.0 - z2 / (2.0 * (2 * l + 3)) +
                         z2 * z2 / (8.0 * (2 * l + 3) * (2 * l + 5));
    out[l] = power * inv_df * corr;
  }
  return out;
}

inline std::vector<ScaledComplex> bessel_j_upward(int lmax, complex z) {
  std::vector<ScaledComplex> out(lmax + 1);
  const ScaledComplex s = scaled_sin(z);
  const ScaledComplex c = scaled_cos(z);
  const ScaledComplex sz(z);
  out[0] = s / sz;
  if (lmax >= 1)
    out[1] = (s / sz - c) / sz;
  for (int k = 1; k < lmax; ++k)
    out[k + 1] = out[k] * (static_cast<double>(2 * k + 1) / z) - out[k - 1];
  return out;
}

inline std::vector<ScaledComplex> bessel_j_miller(int lmax, complex z) {
  const int start = miller_start(lmax, std::abs(z));
  std::vector<ScaledComplex> out(lmax + 1);
  constexpr int kRescaleBits = 500;
  const double rescale_at = std::ldexp(1.0, kRescaleBits);

  long offset = 0;
  complex above{0.0, 0.0};
  complex current{1.0, 0.0};
  for (int k = start; k >= 1; --k) {
    if (k <= lmax)
      out[k] = ScaledComplex(current, offset);
    const complex below = (static_cast<double>(2 * k + 1) / z) * current - above;
    above = current;
    current = below;
    if (std::max(std::abs(current.real()), std::abs(current.imag())) > rescale_at) {
      current = {std::ldexp(current.real(), -kRescaleBits),
                 std::ldexp(current.imag(), -kRescaleBits)};
      above = {std::ldexp(above.real(), -kRescaleBits),
               std::ldexp(above.imag(), -kRescaleBits)};
      offset += kRescaleBits;
    }
  }
  out[0] = ScaledComplex(current, offset);
  // `above` now holds f_1 at the final offset.
  const ScaledComplex f1(above, offset);

  // Normalise against whichever of j_0, j_1 is larger: they never vanish
  // together, so the reference value is always well conditioned.
  const ScaledComplex s = scaled_sin(z);
  const ScaledComplex c = scaled_cos(z);
  const ScaledComplex sz(z);
  const ScaledComplex j0 = s / sz;
  const ScaledComplex j1 = (s / sz - c) / sz;
  const ScaledComplex norm =
      j0.log2_abs() >= j1.log2_abs() ? j0 / out[0] : j1 / f1;
  for (auto &value : out)
    value *= norm;
  return out;
}

inline ScaledComplex tilde_from(std::span<const ScaledComplex> f, int l,
                                complex z) {
  return f[l] * complex(l + 1.0, 0.0) - f[l + 1] * z;
}

inline complex checked_value(const ScaledComplex &v, int l, complex z,
                             const char *what) {
  if (!v.fits())
    throw OverflowError(std::string(what) + " overflows at order " +
                            std::to_string(l) + ", z = " +
                            cpsphere::detail::format_complex(z),
                        l, z);
  return v.value();
}

/// j_n(w) / j_{n-1}(w) by the modified Lentz algorithm applied to
/// 1/r_n = b_n - 1/(b_{n+1} - 1/(b_{n+2} - ...)), b_k = (2k+1)/w.
inline complex bessel_j_ratio_cf(int n, complex w) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  auto b = [w](int k) { return static_cast<double>(2 * k + 1) / w; };
  complex f = b(n);
  if (f == complex{})
    f = tiny;
  complex c = f;
  complex d{};
  const long max_iter = 10 * static_cast<long>(std::abs(w) + n) + 10000;
  for (long k = 1; k <= max_iter; ++k) {
    const complex bk = b(n + static_cast<int>(k));
    d = bk - d;
    if (d == complex{})
      d = tiny;
    c = bk - 1.0 / c;
    if (c == complex{})
      c = tiny;
    d = 1.0 / d;
    const complex delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < eps)
      return 1.0 / f;
  }
  throw ConvergenceError("continued fraction for j_n/j_{n-1} did not converge",
                         1.0 / f, 0.0, max_iter);
}

} // namespace detail

/// j_0(z) .. j_lmax(z), scaled. Upward recurrence from the closed forms only
/// for |z| >= lmax + 10 near the real axis; off the axis j_l decays with l
/// while the companion solution grows, so Miller's downward recurrence is used.
inline std::vector<ScaledComplex> bessel_j_sequence(int lmax, complex z) {
  detail::check_order(lmax);
  if (z == complex{}) {
    std::vector<ScaledComplex> out(lmax + 1);
    out[0] = ScaledComplex(1.0);
    return out;
  }
  if (std::abs(z) < detail::kSeriesThreshold)
    return detail::bessel_j_series(lmax, z);
  if (std::abs(z) >= lmax + 10.0 && std::abs(z.imag()) <= 1.0)
    return detail::bessel_j_upward(lmax, z);
  return detail::bessel_j_miller(lmax, z);
}

/// h^(1)_0(z) .. h^(1)_lmax(z), scaled. Upward recurrence in the closed upper
/// half-plane, where h^(1) is never the recessive solution.
inline std::vector<ScaledComplex> hankel1_sequence(int lmax, complex z) {
  detail::check_order(lmax);
  if (z == complex{})
    throw DomainError("spherical Hankel function has a pole at z = 0");
  if (z.imag() < 0.0) {
    // Upward recurrence is unstable here (h^(2) grows with l faster than h^(1)):
    // h^(1) = 2 j - h^(2), with h^(2)(z) = conj h^(1)(conj z).
    const auto upper = hankel1_sequence(lmax, std::conj(z));
    const auto j = bessel_j_sequence(lmax, z);
    std::vector<ScaledComplex> out(lmax + 1);
    for (int l = 0; l <= lmax; ++l)
      out[l] = j[l] * complex(2.0, 0.0) - conj(upper[l]);
    return out;
  }
  const complex i{0.0, 1.0};
  const ScaledComplex e = ScaledComplex::exp(i * z);
  const ScaledComplex sz(z);
  std::vector<ScaledComplex> out(lmax + 1);
  out[0] = e * complex(0.0, -1.0) / sz;
  if (lmax >= 1)
    out[1] = -(e * (z + i)) / (sz * sz);
  for (int k = 1; k < lmax; ++k)
    out[k + 1] = out[k] * (ScaledComplex(2.0 * k + 1.0) / sz) - out[k - 1];
  return out;
}

/// A_l(w) = [w j_l(w)]' / j_l(w) for l = 0..lmax. The top ratio comes from a
/// continued fraction and the rest from the (stable) downward recurrence of
/// j_k / j_{k-1}, so j_l(w) itself is never formed and large Im w is safe.
inline std::vector<complex> log_ratio_A_sequence(int lmax, complex w) {
  detail::check_order(lmax);
  if (w == complex{})
    throw DomainError("log_ratio_A requires a non-zero argument");
  std::vector<complex> ratio(lmax + 2);
  ratio[lmax + 1] = detail::bessel_j_ratio_cf(lmax + 1, w);
  for (int k = lmax; k >= 1; --k)
    ratio[k] = 1.0 / (static_cast<double>(2 * k + 1) / w - ratio[k + 1]);
  std::vector<complex> out(lmax + 1);
  for (int l = 0; l <= lmax; ++l) {
    out[l] = static_cast<double>(l + 1) - w * ratio[l + 1];
    if (!std::isfinite(out[l].real()) || !std::isfinite(out[l].imag()))
      throw PoleError("log_ratio_A: j_" + std::to_string(l) +
                      " vanishes at w = " + cpsphere::detail::format_complex(w));
  }
  return out;
}

/// Spherical Bessel function of the first kind, j_l(z).
inline complex sph_bessel_j(int l, complex z) {
  detail::check_order(l);
  if (z == complex{})
    return l == 0 ? complex{1.0, 0.0} : complex{};
  const auto seq = bessel_j_sequence(l, z);
  return detail::checked_value(seq[l], l, z, "j_l");
}

/// Spherical Hankel function of the first kind, h_l(z) = j_l(z) + i y_l(z).
inline complex sph_hankel1(int l, complex z) {
  detail::check_order(l);
  const auto seq = hankel1_sequence(l, z);
  return detail::checked_value(seq[l], l, z, "h_l");
}

/// [z j_l(z)]' = (l+1) j_l(z) - z j_{l+1}(z).
inline complex tilde_j(int l, complex z) {
  detail::check_order(l);
  if (z == complex{})
    return l == 0 ? complex{1.0, 0.0} : complex{};
  const auto seq = bessel_j_sequence(l + 1, z);
  return detail::checked_value(detail::tilde_from(seq, l, z), l, z,
                               "[z j_l]'");
}

/// [z h_l(z)]' = (l+1) h_l(z) - z h_{l+1}(z).
inline complex tilde_h(int l, complex z) {
  detail::check_order(l);
  const auto seq = hankel1_sequence(l + 1, z);
  return detail::checked_value(detail::tilde_from(seq, l, z), l, z,
                               "[z h_l]'");
}

/// [z j_l(z)]' / j_l(z), finite even where j_l(z) alone overflows.
inline complex log_ratio_A(int l, complex z) {
  detail::check_order(l);
  return log_ratio_A_sequence(l, z)[l];
}

} // namespace cpsphere::specfun
