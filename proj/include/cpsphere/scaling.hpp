#pragma once

#include <cmath>
#include <string>

#include "cpsphere/errors.hpp"

/// Dimensionless geometry functions of phi = R/r that govern the
/// temperature-invariant potential and its two leading corrections.
namespace cpsphere::scaling {

namespace detail {

inline void check_phi(double phi) {
  if (!(phi > 0.0 && phi < 1.0))
    throw DomainError("geometry parameter phi must lie in (0, 1), got " +
                      std::to_string(phi));
}

// The closed form of g_ret cancels to O(phi^3) from O(phi) pieces; below
// this the series is both cheaper and exact.
inline constexpr double kSeriesBelow = 0.05;
inline constexpr int kMaxSeriesTerms = 1000000;

/// Sums term(l, phi^(2l)) for l = 1, 2, ... until three consecutive terms
/// are below 1e-17 of the partial sum.
template <class Term> double sum_series(double phi, Term term) {
  const double p2 = phi * phi;
  double power = p2;
  double sum = 0.0;
  int quiet = 0;
  for (int l = 1; l <= kMaxSeriesTerms; ++l) {
    const double t = term(static_cast<double>(l), power);
    sum += t;
    quiet = std::abs(t) <= 1e-17 * std::abs(sum) ? quiet + 1 : 0;
    if (quiet >= 3)
      return sum;
    power *= p2;
  }
  throw ConvergenceError("scaling series not converged", sum, 0.0, kMaxSeriesTerms);
}

} // namespace detail

/// f as the multipole sum  sum_l (2l+1)(l+1) phi^(2l+1).
inline double series_f(double phi) {
  detail::check_phi(phi);
  return detail::sum_series(phi, [phi](double l, double p2l) {
    return (2.0 * l + 1.0) * (l + 1.0) * p2l * phi;
  });
}

/// g_ret as  2 sum_l {l phi^(2l+1) - (2l+1)[(l+3)/(2l+3) + (l+1)(l-2)/((2l-1)l)] phi^(2l+3)/2}.
inline double series_g_ret(double phi) {
  detail::check_phi(phi);
  const double p2 = phi * phi;
  return 2.0 * detail::sum_series(phi, [phi, p2](double l, double p2l) {
           const double bracket =
               (l + 3.0) / (2.0 * l + 3.0) + (l + 1.0) * (l - 2.0) / ((2.0 * l - 1.0) * l);
           return l * p2l * phi - (2.0 * l + 1.0) * bracket * p2l * phi * p2 / 2.0;
         });
}

/// g_refl as  2 sum_l (2l+1)[1 + (2l+1) phi^2 / l] phi^(2l).
inline double series_g_refl(double phi) {
  detail::check_phi(phi);
  const double p2 = phi * phi;
  return 2.0 * detail::sum_series(phi, [p2](double l, double p2l) {
           return (2.0 * l + 1.0) * (1.0 + (2.0 * l + 1.0) * p2 / l) * p2l;
         });
}

/// f(phi) = phi^3 (6 - 3 phi^2 + phi^4) / (1 - phi^2)^3
inline double scaling_f(double phi) {
  detail::check_phi(phi);
  const double p2 = phi * phi;
  const double q = 1.0 - p2;
  return phi * p2 * (6.0 - 3.0 * p2 + p2 * p2) / (q * q * q);
}

/// g_ret(phi) = 3(1 + 3 phi^4) artanh(phi) - phi(3 - phi^2) + 2 phi^3 log(1 - phi^2)
inline double scaling_g_ret(double phi) {
  detail::check_phi(phi);
  if (phi < detail::kSeriesBelow)
    return series_g_ret(phi);
  const double p2 = phi * phi;
  return 3.0 * (1.0 + 3.0 * p2 * p2) * std::atanh(phi) - phi * (3.0 - p2) +
         2.0 * phi * p2 * std::log1p(-p2);
}

/// g_refl(phi) = 2 phi^2 [(3 + 7 phi^2 - 4 phi^4)/(1 - phi^2)^2 - log(1 - phi^2)]
inline double scaling_g_refl(double phi) {
  detail::check_phi(phi);
  const double p2 = phi * phi;
  const double q = 1.0 - p2;
  return 2.0 * p2 * ((3.0 + 7.0 * p2 - 4.0 * p2 * p2) / (q * q) - std::log1p(-p2));
}

} // namespace cpsphere::scaling
