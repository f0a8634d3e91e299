#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "cpsphere/errors.hpp"
#include "cpsphere/materials.hpp"
#include "cpsphere/scaled_complex.hpp"
#include "cpsphere/specfun.hpp"

/// Sphere reflection (Mie) coefficients r_l^TE(z), r_l^TM(z) as they enter
/// the Green's trace, exact and in the limiting / perturbative forms.
namespace cpsphere::mie {

using complex = std::complex<double>;
using materials::Permittivity;

enum class Polarization { TE, TM };

/// |z| below which the non-retarded forms are considered applicable.
inline constexpr double kNonRetardedLimit = 0.3;
/// Im(sqrt eps) |z| above which a body counts as a good conductor.
inline constexpr double kMetallicThreshold = 5.0;
inline constexpr int kMaxOrder = 200;

struct MieArgs {
  int l;
  complex z;
  Permittivity eps;
};

/// r^TE_l and r^TM_l for l = 0..lmax (entry 0 unused, left zero).
struct CoefficientSequence {
  std::vector<ScaledComplex> te;
  std::vector<ScaledComplex> tm;
};

namespace detail {

inline void check_order(int l) {
  if (l < 1)
    throw DomainError("Mie multipole order must be >= 1, got " +
                      std::to_string(l));
  if (l > kMaxOrder)
    throw UnsupportedOrderError("Mie multipole order " + std::to_string(l) +
                                " exceeds the supported maximum " +
                                std::to_string(kMaxOrder));
}

inline void check_argument(complex z) {
  if (z == complex{})
    throw DomainError("Mie coefficients need a non-zero size parameter");
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw DomainError("Mie size parameter must be finite");
}

inline ScaledComplex checked_ratio(const ScaledComplex &num,
                                   const ScaledComplex &den, int l, complex z) {
  if (den.is_zero() || !std::isfinite(den.mantissa().real()) ||
      !std::isfinite(den.mantissa().imag()))
    throw PoleError("reflection coefficient pole at l = " + std::to_string(l) +
                    ", z = " + cpsphere::detail::format_complex(z));
  return -(num / den);
}

/// i z^(2l+1) / [(2l+1)!! (2l-1)!!], the common non-retarded building block.
inline ScaledComplex nonretarded_base(int l, complex z) {
  ScaledComplex power(complex{0.0, 1.0} * z);
  const ScaledComplex z2(z * z);
  for (int k = 1; k <= l; ++k)
    power = power * z2 / ScaledComplex(static_cast<double>((2 * k + 1) * (2 * k - 1)));
  return power;
}

inline complex to_value(const ScaledComplex &v, int l, complex z) {
  if (!v.fits())
    throw OverflowError("reflection coefficient overflows", l, z);
  return v.value();
}

inline void check_nonretarded(complex z) {
  if (!(std::abs(z) < kNonRetardedLimit))
    throw RegimeError("non-retarded coefficient needs |z| < " +
                      std::to_string(kNonRetardedLimit) + ", got |z| = " +
                      std::to_string(std::abs(z)));
}

} // namespace detail

/// Exact coefficients for all orders up to lmax. Finite permittivities are
/// handled in the factorised form
///   r^TM = -(eps j~ - A j) / (eps h~ - A h),  r^TE = -(A j - j~) / (A h - h~)
/// with A = [w j_l(w)]'/j_l(w), w = sqrt(eps) z, so that j_l(w) is never
/// formed. Infinite permittivity gives -j/h and -j~/h~.
inline CoefficientSequence coefficient_sequence(int lmax, complex z,
                                                const Permittivity &eps) {
  detail::check_order(lmax);
  detail::check_argument(z);
  CoefficientSequence out{std::vector<ScaledComplex>(lmax + 1),
                          std::vector<ScaledComplex>(lmax + 1)};
  if (!eps.is_infinite() && eps.value() == complex{1.0, 0.0})
    return out;

  const auto j = specfun::bessel_j_sequence(lmax + 1, z);
  const auto h = specfun::hankel1_sequence(lmax + 1, z);

  if (eps.is_infinite()) {
    for (int l = 1; l <= lmax; ++l) {
      out.te[l] = detail::checked_ratio(j[l], h[l], l, z);
      out.tm[l] = detail::checked_ratio(specfun::detail::tilde_from(j, l, z),
                                        specfun::detail::tilde_from(h, l, z),
                                        l, z);
    }
    return out;
  }

  const complex e = eps.value();
  const auto a = specfun::log_ratio_A_sequence(lmax, materials::sqrt_eps(eps) * z);
  for (int l = 1; l <= lmax; ++l) {
    const ScaledComplex jt = specfun::detail::tilde_from(j, l, z);
    const ScaledComplex ht = specfun::detail::tilde_from(h, l, z);
    out.te[l] = detail::checked_ratio(j[l] * a[l] - jt, h[l] * a[l] - ht, l, z);
    out.tm[l] = detail::checked_ratio(jt * e - j[l] * a[l], ht * e - h[l] * a[l],
                                      l, z);
  }
  return out;
}

/// Exact TE / TM reflection coefficient for finite permittivity.
inline complex refl_exact(const MieArgs &args, Polarization pol) {
  detail::check_order(args.l);
  if (args.eps.is_infinite())
    throw DomainError("refl_exact needs a finite permittivity; use refl_pc for "
                      "a perfect conductor");
  const auto seq = coefficient_sequence(args.l, args.z, args.eps);
  return detail::to_value(pol == Polarization::TE ? seq.te[args.l]
                                                  : seq.tm[args.l],
                          args.l, args.z);
}

/// Perfect-conductor coefficients -j_l/h_l (TE) and -j~_l/h~_l (TM).
inline complex refl_pc(int l, complex z, Polarization pol) {
  detail::check_order(l);
  const auto seq = coefficient_sequence(l, z, Permittivity::infinite());
  return detail::to_value(pol == Polarization::TE ? seq.te[l] : seq.tm[l], l, z);
}

/// Leading non-retarded coefficient at finite permittivity. For TM an
/// infinite permittivity is accepted and gives the perfect-conductor form;
/// for TE that limit does not exist (the coefficient grows like eps).
inline complex refl_nonret(int l, complex z, const Permittivity &eps,
                           Polarization pol) {
  detail::check_order(l);
  detail::check_nonretarded(z);
  if (z == complex{})
    return {};
  if (pol == Polarization::TE) {
    if (eps.is_infinite())
      throw DomainError("TE non-retarded coefficient diverges as eps -> inf");
    return detail::to_value(detail::nonretarded_base(l + 1, z) *
                                (eps.value() - 1.0),
                            l, z);
  }
  const double ld = l;
  const complex weight =
      eps.is_infinite()
          ? complex((ld + 1.0) / ld, 0.0)
          : (ld + 1.0) * (eps.value() - 1.0) / (ld * eps.value() + ld + 1.0);
  return detail::to_value(detail::nonretarded_base(l, z) * weight, l, z);
}

/// Perfect-conductor TM coefficient with its leading retardation correction,
/// r^{TM,PC}_{l,0}(z) {1 - z^2/2 [(l+3)/((2l+3)(l+1)) + (l-2)/(l(2l-1))]}.
inline complex refl_tm_pc_retarded(int l, double z) {
  detail::check_order(l);
  if (!(z > 0.0))
    throw DomainError("refl_tm_pc_retarded needs z > 0");
  detail::check_nonretarded(z);
  const double ld = l;
  const double bracket = (ld + 3.0) / ((2.0 * ld + 3.0) * (ld + 1.0)) +
                         (ld - 2.0) / (ld * (2.0 * ld - 1.0));
  const double factor = 1.0 - 0.5 * z * z * bracket;
  return detail::to_value(detail::nonretarded_base(l, z) *
                              complex((ld + 1.0) / ld * factor, 0.0),
                          l, z);
}

/// Non-retarded perfect-conductor coefficients with their first-order
/// correction in 1/sqrt(eps):
///   TE: r^{TE,PC}_{l,0} [1 - i(2l+1)/(sqrt(eps) z)]
///   TM: r^{TM,PC}_{l,0} [1 + i z (2l+1)/(sqrt(eps) l(l+1))]
/// Valid for a good conductor, Im(sqrt eps)|z| > kMetallicThreshold.
inline complex refl_perturbative(int l, complex z, const Permittivity &eps,
                                 Polarization pol) {
  detail::check_order(l);
  detail::check_argument(z);
  detail::check_nonretarded(z);
  const double ld = l;
  complex inv_root{};
  if (!eps.is_infinite()) {
    const complex root = materials::sqrt_eps(eps);
    if (!(root.imag() * std::abs(z) > kMetallicThreshold))
      throw RegimeError("perturbative reflection coefficient needs Im(sqrt "
                        "eps)|z| > " +
                        std::to_string(kMetallicThreshold) + ", got " +
                        std::to_string(root.imag() * std::abs(z)));
    inv_root = 1.0 / root;
  }
  const complex i{0.0, 1.0};
  const ScaledComplex base = detail::nonretarded_base(l, z);
  if (pol == Polarization::TE) {
    const complex factor = 1.0 - i * (2.0 * ld + 1.0) * inv_root / z;
    return detail::to_value(base * (-factor), l, z);
  }
  const complex factor =
      1.0 + i * z * (2.0 * ld + 1.0) * inv_root / (ld * (ld + 1.0));
  return detail::to_value(base * ((ld + 1.0) / ld * factor), l, z);
}

} // namespace cpsphere::mie
