#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "cpsphere/constants.hpp"
#include "cpsphere/errors.hpp"
#include "cpsphere/materials.hpp"
#include "cpsphere/mie.hpp"
#include "cpsphere/scaling.hpp"
#include "cpsphere/specfun.hpp"

/// Trace of the scattering Green's tensor at the particle position,
///   Gamma_w(r) = (w^2/c^2) Tr G^(1)(r, r, w),
/// for a particle at distance r from the centre of a sphere of radius R.
namespace cpsphere::greens {

using complex = std::complex<double>;
using materials::Permittivity;
using materials::PermittivityModel;

/// phi above which series truncation cannot be certified in double precision.
inline constexpr double kMaxPhi = 0.995;
inline constexpr double kMinTolerance = 1e-12;
inline constexpr double kMaxTolerance = 1e-3;
/// Consecutive negligible terms required before a multipole sum stops.
inline constexpr int kQuietTerms = 3;

class SphereSystem {
public:
  SphereSystem(double radius, double distance)
      : radius_(radius), distance_(distance) {
    if (!(radius > 0.0) || !std::isfinite(radius))
      throw DomainError("sphere radius must be positive");
    if (!(distance > radius) || !std::isfinite(distance))
      throw DomainError("particle must lie outside the sphere (R < r), got R = " +
                        std::to_string(radius) + ", r = " +
                        std::to_string(distance));
  }

  double radius() const noexcept { return radius_; }
  double distance() const noexcept { return distance_; }
  double phi() const noexcept { return radius_ / distance_; }

  /// x = r |w| / c
  double retardation(double omega) const {
    return distance_ * std::abs(omega) / constants::speed_of_light;
  }

  /// 1 / (4 pi r^3), the natural unit of Gamma.
  double unit() const {
    return 1.0 / (4.0 * constants::pi * distance_ * distance_ * distance_);
  }

private:
  double radius_;
  double distance_;
};

struct GammaValue {
  complex value; // m^-3
  int l_terms_used = 0;
  double truncation_estimate = 0.0;
};

namespace detail {

inline void check_contact(const SphereSystem &sys) {
  if (sys.phi() > kMaxPhi)
    throw NearContactError("phi = " + std::to_string(sys.phi()) +
                           " exceeds the near-contact limit " +
                           std::to_string(kMaxPhi));
}

inline void check_tolerance(double tol) {
  if (!(tol >= kMinTolerance && tol <= kMaxTolerance))
    throw DomainError("tolerance must lie in [1e-12, 1e-3], got " +
                      std::to_string(tol));
}

/// Highest multipole considered. Terms need not decrease before l ~ |x|;
/// beyond that they fall off like phi^(2l) times a polynomial in l, which the
/// factor 1.5 absorbs.
inline int order_cap(double phi, double abs_x, double tol) {
  const double geometric = std::log(tol * 1e-3) / (2.0 * std::log(phi));
  const double oscillatory = std::ceil(2.0 * abs_x) + 20.0;
  const double decaying = std::ceil(1.5 * geometric + abs_x) + 10.0;
  const double cap = std::max({40.0, std::ceil(12.0 / (1.0 - phi)), oscillatory, decaying});
  return static_cast<int>(std::min(cap, static_cast<double>(mie::kMaxOrder)));
}

} // namespace detail

/// Mie multipole sum
///   Gamma = i x/(4 pi r^3) sum_l (2l+1) { x^2 r^TE_l(phi x) h_l(x)^2
///           + r^TM_l(phi x) [l(l+1) h_l(x)^2 + h~_l(x)^2] },  x = r w / c,
/// truncated once kQuietTerms consecutive terms fall below tol relative to the
/// partial sum. Accepts real w (either sign) and w = i xi; on the imaginary
/// axis the result is checked to be real and returned with zero imaginary part.
inline GammaValue gamma_trace(const SphereSystem &sys, complex omega,
                              const PermittivityModel &model, double tol) {
  materials::detail::check_frequency(omega);
  if (omega == complex{})
    throw DomainError("gamma_trace excludes w = 0; use gamma_static");
  detail::check_tolerance(tol);
  detail::check_contact(sys);
  if (model.is_vacuum())
    return {};

  const double phi = sys.phi();
  const complex x = sys.distance() * omega / constants::speed_of_light;
  const complex z = phi * x;
  const Permittivity eps = materials::permittivity(model, omega);
  const int lmax = detail::order_cap(phi, std::abs(x), tol);

  const auto coeff = mie::coefficient_sequence(lmax, z, eps);
  const auto h = specfun::hankel1_sequence(lmax + 1, x);
  const ScaledComplex x2(x * x);

  complex sum{};
  double abs_sum = 0.0;
  double last = 0.0;
  int quiet = 0;
  int used = 0;
  for (int l = 1; l <= lmax; ++l) {
    const ScaledComplex h2 = h[l] * h[l];
    const ScaledComplex ht = specfun::detail::tilde_from(h, l, x);
    const double ld = l;
    const ScaledComplex bracket = h2 * complex(ld * (ld + 1.0), 0.0) + ht * ht;
    const ScaledComplex term =
        (x2 * coeff.te[l] * h2 + coeff.tm[l] * bracket) * complex(2.0 * ld + 1.0, 0.0);
    if (!term.fits())
      throw OverflowError("Green's trace term overflows", l, x);
    const complex t = term.value();
    sum += t;
    abs_sum += std::abs(t);
    used = l;
    last = std::abs(sum) > 0.0 ? std::abs(t) / std::abs(sum) : 0.0;
    quiet = std::abs(t) <= tol * std::abs(sum) ? quiet + 1 : 0;
    if (quiet >= kQuietTerms)
      break;
  }

  const complex prefactor = complex(0.0, 1.0) * x * sys.unit();
  if (quiet < kQuietTerms)
    throw ConvergenceError("multipole sum not converged at l = " +
                               std::to_string(lmax),
                           prefactor * sum, last, lmax);

  GammaValue out{prefactor * sum, used, last};
  if (materials::detail::on_positive_imaginary_axis(omega)) {
    const double scale = std::max(std::abs(out.value), std::abs(prefactor) * abs_sum);
    if (std::abs(out.value.imag()) > 10.0 * tol * scale)
      throw ConsistencyError("Green's trace at imaginary frequency is not real: " +
                             cpsphere::detail::format_complex(out.value));
    out.value = {out.value.real(), 0.0};
  }
  return out;
}

/// Static (w -> 0) trace. Finite eps: sum_l l(l+1)(2l+1)(eps-1) phi^(2l+1) /
/// (l eps + l + 1) / (4 pi r^3); perfect conductor: the closed form
/// f(phi) / (4 pi r^3).
inline double gamma_static(const SphereSystem &sys, const Permittivity &eps) {
  detail::check_contact(sys);
  const double phi = sys.phi();
  if (eps.is_infinite())
    return scaling::scaling_f(phi) * sys.unit();
  const complex e = eps.value();
  if (e.imag() != 0.0 || !(e.real() >= 1.0))
    throw DomainError("static permittivity must be real and >= 1");
  const double ev = e.real();
  if (ev == 1.0)
    return 0.0;

  constexpr int kMaxTerms = 20000;
  const double p2 = phi * phi;
  double power = phi * p2;
  double sum = 0.0;
  int quiet = 0;
  for (int l = 1; l <= kMaxTerms; ++l) {
    const double ld = l;
    const double term =
        ld * (ld + 1.0) * (2.0 * ld + 1.0) * (ev - 1.0) * power / (ld * ev + ld + 1.0);
    sum += term;
    quiet = term <= 1e-17 * sum ? quiet + 1 : 0;
    if (quiet >= kQuietTerms)
      return sum * sys.unit();
    power *= p2;
  }
  throw ConvergenceError("static multipole series not converged", sum * sys.unit(),
                         0.0, kMaxTerms);
}

/// Leading retardation correction of the perfect-conductor trace,
/// x^2 g_ret(phi) / (8 pi r^3).
inline double delta_gamma_ret(const SphereSystem &sys, double x) {
  if (!(x > 0.0))
    throw DomainError("retardation parameter must be positive");
  if (!(x < mie::kNonRetardedLimit))
    throw RegimeError("retardation correction needs x < " +
                      std::to_string(mie::kNonRetardedLimit));
  return x * x * scaling::scaling_g_ret(sys.phi()) * sys.unit() / 2.0;
}

/// Leading reflectivity correction,
/// i x phi^2 / (4 pi r^3 sqrt(eps)) [(3 + 7phi^2 - 4phi^4)/(1-phi^2)^2 - log(1-phi^2)].
/// Zero for a perfect conductor.
inline complex delta_gamma_refl(const SphereSystem &sys, double x,
                                const PermittivityModel &model, double omega) {
  if (!(x > 0.0))
    throw DomainError("retardation parameter must be positive");
  if (model.kind() == materials::MaterialKind::PerfectConductor)
    return {};
  const complex root = materials::sqrt_eps(model, complex(std::abs(omega), 0.0));
  const double phi = sys.phi();
  if (!(root.imag() * phi * x > mie::kMetallicThreshold))
    throw RegimeError("reflectivity correction needs Im(sqrt eps) phi x > " +
                      std::to_string(mie::kMetallicThreshold) + ", got " +
                      std::to_string(root.imag() * phi * x));
  const double bracket = scaling::scaling_g_refl(phi) / (2.0 * phi * phi);
  return complex(0.0, 1.0) * x * phi * phi * bracket * sys.unit() / root;
}

} // namespace cpsphere::greens
