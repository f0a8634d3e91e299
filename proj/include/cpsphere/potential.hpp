#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cpsphere/constants.hpp"
#include "cpsphere/errors.hpp"
#include "cpsphere/greens.hpp"
#include "cpsphere/materials.hpp"
#include "cpsphere/scaling.hpp"

/// Casimir-Polder potential of a single dipole transition outside a sphere:
/// the exact thermal result (Matsubara sum plus resonant part), the
/// zero-temperature integral, and the closed-form approximations.
///
/// All energies are in joules. Transition frequencies are signed: positive
/// for upward transitions (the particle would absorb), negative for downward.
namespace cpsphere::potential {

using complex = std::complex<double>;
using greens::SphereSystem;
using materials::MaterialKind;
using materials::Permittivity;
using materials::PermittivityModel;
using scaling::scaling_f;
using scaling::scaling_g_refl;
using scaling::scaling_g_ret;

struct TransitionSpec {
  double d2;    // |d_kn|^2, C^2 m^2
  double omega; // signed angular frequency, rad/s

  void validate() const {
    if (!(d2 >= 0.0) || !std::isfinite(d2))
      throw DomainError("squared dipole moment must be finite and >= 0");
    if (omega == 0.0 || !std::isfinite(omega))
      throw DomainError("transition frequency must be finite and non-zero");
  }
};

struct ThermalState {
  double temperature; // K

  void validate() const {
    if (!(temperature >= 0.0) || !std::isfinite(temperature))
      throw DomainError("temperature must be finite and >= 0");
  }
};

struct PotentialBreakdown {
  double total = 0.0;
  double nonresonant = 0.0;
  double resonant = 0.0;
  double u0 = 0.0;
  double du_ret = 0.0;
  double du_refl = 0.0;
  int matsubara_terms = 0;
  double reduced = 0.0; // total * 24 pi eps0 r^3 / |d|^2
};

struct SpectroscopicResult {
  double energy = 0.0;
  double u0 = 0.0;
  double correction = 0.0;
  std::optional<std::string> regime_warning;
};

enum class Method {
  Exact,
  ZeroTemperature,
  Invariant,
  ClosedForm,
  Spectroscopic,
  Dielectric
};

/// Matsubara sums stop once 2 xi_j (r - R)/c exceeds this; the imaginary
/// frequency trace decays like exp(-2 xi (r - R)/c).
inline constexpr double kMatsubaraDecayCutoff = 40.0;
/// Zero-temperature integrand treated as zero beyond this decay exponent.
inline constexpr double kIntegrandDecayCutoff = 70.0;
inline constexpr long kMaxMatsubaraTerms = 2000000;
/// k_B T / (hbar |w|) below which the spectroscopic form is flagged.
inline constexpr double kSpectroscopicRatio = 3.0;

namespace detail {

inline double clamp_tol(double tol) {
  return std::clamp(tol, greens::kMinTolerance, greens::kMaxTolerance);
}

inline double dipole_unit(const TransitionSpec &tr, const SphereSystem &sys) {
  const double r = sys.distance();
  return tr.d2 / (24.0 * constants::pi * constants::vacuum_permittivity * r * r * r);
}

/// Permittivity entering the static (xi -> 0) trace. A Drude metal diverges
/// there, so it shares the perfect-conductor value.
inline Permittivity static_permittivity(const PermittivityModel &model) {
  if (model.kind() == MaterialKind::ConstantDielectric)
    return Permittivity::finite(model.eps_static());
  return Permittivity::infinite();
}

inline double decay_exponent(const SphereSystem &sys, double xi) {
  return 2.0 * xi * (sys.distance() - sys.radius()) / constants::speed_of_light;
}

/// k_B T / (hbar w) - 1/2 with signed w.
inline double thermal_factor(double omega, const ThermalState &state) {
  return constants::boltzmann * state.temperature / (constants::hbar * omega) - 0.5;
}

/// U^nr and U^r are each ~ k_B T/hbar|w| times the total and cancel, so the
/// traces inside them are summed that much tighter.
inline double cancellation_tol(double tol, const TransitionSpec &tr,
                               const ThermalState &state) {
  const double ratio = constants::boltzmann * state.temperature /
                       (constants::hbar * std::abs(tr.omega));
  return clamp_tol(tol / (1.0 + 2.0 * ratio));
}

struct ZeroTemperatureParts {
  double integral;
  double step;
};

} // namespace detail

/// U * 24 pi eps0 r^3 / |d|^2, or 0 when |d|^2 = 0.
inline double reduced(double energy, const TransitionSpec &tr,
                      const SphereSystem &sys) {
  if (tr.d2 == 0.0)
    return 0.0;
  return energy / detail::dipole_unit(tr, sys);
}

/// xi_j = 2 pi j k_B T / hbar
inline double matsubara_xi(int j, const ThermalState &state) {
  state.validate();
  if (j < 0)
    throw DomainError("Matsubara index must be non-negative");
  return 2.0 * constants::pi * j * constants::boltzmann * state.temperature /
         constants::hbar;
}

/// n(w) = 1/(exp(hbar w / k_B T) - 1); at T = 0 this is 0 for w > 0 and -1
/// for w < 0, consistent with n(w) + n(-w) = -1.
inline double bose_einstein(double omega, const ThermalState &state) {
  state.validate();
  if (omega == 0.0 || !std::isfinite(omega))
    throw DomainError("Bose-Einstein occupation needs a non-zero frequency");
  if (state.temperature == 0.0)
    return omega > 0.0 ? 0.0 : -1.0;
  const double a =
      constants::hbar * omega / (constants::boltzmann * state.temperature);
  return 1.0 / std::expm1(a);
}

struct NonresonantPart {
  double energy = 0.0;
  int terms = 0;
};

/// -(2 k_B T |d|^2 w / 3 hbar eps0) sum'_j Gamma(i xi_j)/(w^2 + xi_j^2), with
/// the j = 0 term weighted 1/2 and taken from the static trace.
inline NonresonantPart u_nonresonant(const TransitionSpec &tr,
                                     const SphereSystem &sys,
                                     const PermittivityModel &model,
                                     const ThermalState &state, double tol) {
  tr.validate();
  state.validate();
  if (state.temperature == 0.0)
    throw DomainError("u_nonresonant needs T > 0; use u_zero_temperature");
  const double gtol = detail::clamp_tol(tol);
  const double w2 = tr.omega * tr.omega;

  double sum = 0.5 * greens::gamma_static(sys, detail::static_permittivity(model)) / w2;
  int terms = 1;
  int quiet = 0;
  for (long j = 1;; ++j) {
    if (j > kMaxMatsubaraTerms)
      throw ConvergenceError("Matsubara sum not converged", sum, 0.0, j);
    const double xi = matsubara_xi(static_cast<int>(j), state);
    if (detail::decay_exponent(sys, xi) > kMatsubaraDecayCutoff)
      break;
    double g = 0.0;
    try {
      g = greens::gamma_trace(sys, complex(0.0, xi), model, gtol).value.real();
    } catch (Error &e) {
      e.prepend_context("Matsubara term j = " + std::to_string(j));
      throw;
    }
    const double term = g / (w2 + xi * xi);
    sum += term;
    ++terms;
    quiet = std::abs(term) <= tol * std::abs(sum) ? quiet + 1 : 0;
    if (quiet >= greens::kQuietTerms)
      break;
  }
  const double prefactor = -2.0 * constants::boltzmann * state.temperature *
                           tr.d2 * tr.omega /
                           (3.0 * constants::hbar * constants::vacuum_permittivity);
  return {prefactor * sum, terms};
}

/// (|d|^2 / 3 eps0) n(w) Re Gamma_w. Re Gamma is even in w, so downward
/// transitions use Gamma at |w|.
inline double u_resonant(const TransitionSpec &tr, const SphereSystem &sys,
                         const PermittivityModel &model,
                         const ThermalState &state, double tol) {
  tr.validate();
  const double n = bose_einstein(tr.omega, state);
  if (n == 0.0)
    return 0.0;
  const double g =
      greens::gamma_trace(sys, std::abs(tr.omega), model, detail::clamp_tol(tol))
          .value.real();
  return tr.d2 / (3.0 * constants::vacuum_permittivity) * n * g;
}

namespace detail {

inline ZeroTemperatureParts zero_temperature_parts(const TransitionSpec &tr,
                                                   const SphereSystem &sys,
                                                   const PermittivityModel &model,
                                                   double tol) {
  tr.validate();
  const double gtol = clamp_tol(tol);
  const double w = std::abs(tr.omega);
  const double g_static = greens::gamma_static(sys, static_permittivity(model));

  // xi = |w| u / (1 - u) maps (0, inf) onto (0, 1); the Jacobian and the
  // 1/(w^2 + xi^2) weight combine into 1 / (|w| ((1-u)^2 + u^2)).
  auto integrand = [&](double u) {
    const double weight = 1.0 / (w * ((1.0 - u) * (1.0 - u) + u * u));
    if (u <= 0.0)
      return g_static * weight;
    if (u >= 1.0)
      return 0.0;
    const double xi = w * u / (1.0 - u);
    if (decay_exponent(sys, xi) > kIntegrandDecayCutoff)
      return 0.0;
    return greens::gamma_trace(sys, complex(0.0, xi), model, gtol).value.real() *
           weight;
  };

  double error = 0.0;
  double l1 = 0.0;
  const double qtol = std::max(tol, 1e-13);
  const double integral = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      integrand, 0.0, 1.0, 20, qtol, &error, &l1);
  if (!(error <= 10.0 * qtol * l1) || !std::isfinite(integral))
    throw ConvergenceError("zero-temperature quadrature not converged", integral,
                           l1 > 0.0 ? error / l1 : error, 0);

  ZeroTemperatureParts parts{};
  parts.integral = -tr.d2 * tr.omega /
                   (3.0 * constants::pi * constants::vacuum_permittivity) * integral;
  if (tr.omega < 0.0) {
    const double g = greens::gamma_trace(sys, w, model, gtol).value.real();
    parts.step = -tr.d2 / (3.0 * constants::vacuum_permittivity) * g;
  }
  return parts;
}

} // namespace detail

/// T = 0 potential: -(|d|^2 w / 3 pi eps0) int_0^inf dxi Gamma(i xi)/(w^2+xi^2)
/// - Theta(-w) (|d|^2/3 eps0) Re Gamma_w, by adaptive Gauss-Kronrod.
inline double u_zero_temperature(const TransitionSpec &tr, const SphereSystem &sys,
                                 const PermittivityModel &model, double tol) {
  const auto parts = detail::zero_temperature_parts(tr, sys, model, tol);
  return parts.integral + parts.step;
}

/// U0 = -|d|^2 f(phi) / (24 pi eps0 r^3)
inline double u_invariant(const TransitionSpec &tr, const SphereSystem &sys) {
  tr.validate();
  return -detail::dipole_unit(tr, sys) * scaling_f(sys.phi());
}

/// Exact potential U = U^nr + U^r. At T = 0 the Matsubara sum is replaced by
/// the zero-temperature integral (nonresonant) and the step term (resonant).
inline PotentialBreakdown u_exact(const TransitionSpec &tr, const SphereSystem &sys,
                                  const PermittivityModel &model,
                                  const ThermalState &state, double tol) {
  tr.validate();
  state.validate();
  PotentialBreakdown out;
  if (state.temperature == 0.0) {
    const auto parts = detail::zero_temperature_parts(tr, sys, model, tol);
    out.nonresonant = parts.integral;
    out.resonant = parts.step;
  } else {
    const double inner = detail::cancellation_tol(tol, tr, state);
    const auto nr = u_nonresonant(tr, sys, model, state, inner);
    out.nonresonant = nr.energy;
    out.matsubara_terms = nr.terms;
    out.resonant = u_resonant(tr, sys, model, state, inner);
  }
  out.total = out.nonresonant + out.resonant;
  out.u0 = -tr.d2 * greens::gamma_static(sys, detail::static_permittivity(model)) /
           (6.0 * constants::vacuum_permittivity);
  out.reduced = reduced(out.total, tr, sys);
  return out;
}

/// Closed-form metal result U0 + dU_ret + dU_refl with
///   dU_ret  = |d|^2 x^2 (k_B T/hbar w - 1/2) g_ret(phi) / (24 pi eps0 r^3),
///   dU_refl = |d|^2 x Re(i/sqrt eps) (k_B T/hbar w - 1/2) g_refl(phi) / (24 pi eps0 r^3).
inline PotentialBreakdown u_approx_metal(const TransitionSpec &tr,
                                         const SphereSystem &sys,
                                         const PermittivityModel &model,
                                         const ThermalState &state) {
  tr.validate();
  state.validate();
  if (model.kind() == MaterialKind::ConstantDielectric)
    throw DomainError("closed-form metal approximation needs a Drude or "
                      "perfect-conductor model");
  const double x = sys.retardation(tr.omega);
  if (!(x < mie::kNonRetardedLimit))
    throw RegimeError("closed-form approximation needs x < " +
                      std::to_string(mie::kNonRetardedLimit) + ", got " +
                      std::to_string(x));
  const double phi = sys.phi();
  double re_i_root = 0.0;
  if (model.kind() == MaterialKind::Drude) {
    const complex root = materials::sqrt_eps(model, complex(std::abs(tr.omega), 0.0));
    if (!(root.imag() * phi * x > mie::kMetallicThreshold))
      throw RegimeError("reflectivity correction needs Im(sqrt eps) phi x > " +
                        std::to_string(mie::kMetallicThreshold) + ", got " +
                        std::to_string(root.imag() * phi * x));
    re_i_root = materials::re_i_over_sqrt_eps(model, tr.omega);
  }
  const double unit = detail::dipole_unit(tr, sys);
  const double factor = detail::thermal_factor(tr.omega, state);

  PotentialBreakdown out;
  out.u0 = -unit * scaling_f(phi);
  out.du_ret = unit * x * x * factor * scaling_g_ret(phi);
  out.du_refl = unit * x * re_i_root * factor * scaling_g_refl(phi);
  out.total = out.u0 + out.du_ret + out.du_refl;
  out.reduced = reduced(out.total, tr, sys);
  return out;
}

enum class DielectricCorrection { Included, Omitted };

/// Dielectric-sphere series
///   U = -|d|^2 (eps-1)/(24 pi eps0 r^3) sum_l w_l {1 - 2 x^2 (k_B T/hbar w - 1/2) B_l},
///   w_l = l(l+1)(2l+1) phi^(2l+1) / (eps l + l + 1),
///   B_l = 1/(2l+1) - phi^2 (2l+1)(eps(l-2) + l + 1) / ((2l-1)(2l+3)(eps l + l + 1)),
/// with signed w. For a downward transition the bracket prefactor becomes
/// 2 x^2 (k_B T/hbar|w| + 1/2).
inline double u_approx_dielectric(const TransitionSpec &tr, const SphereSystem &sys,
                                  double eps_static, const ThermalState &state,
                                  double tol,
                                  DielectricCorrection correction =
                                      DielectricCorrection::Included) {
  tr.validate();
  state.validate();
  if (!(eps_static >= 1.0) || !std::isfinite(eps_static))
    throw DomainError("dielectric constant must be finite and >= 1");
  const double x = sys.retardation(tr.omega);
  if (!(std::sqrt(eps_static) * x < mie::kNonRetardedLimit))
    throw RegimeError("dielectric series needs sqrt(eps) x < " +
                      std::to_string(mie::kNonRetardedLimit) + ", got " +
                      std::to_string(std::sqrt(eps_static) * x));
  greens::detail::check_contact(sys);

  const double phi = sys.phi();
  const double p2 = phi * phi;
  const double e = eps_static;
  const double a = correction == DielectricCorrection::Included
                       ? 2.0 * x * x * detail::thermal_factor(tr.omega, state)
                       : 0.0;
  constexpr int kMaxTerms = 20000;
  double power = phi * p2;
  double sum = 0.0;
  int quiet = 0;
  for (int l = 1;; ++l) {
    if (l > kMaxTerms)
      throw ConvergenceError("dielectric series not converged", sum, 0.0, l);
    const double ld = l;
    const double denom = e * ld + ld + 1.0;
    const double weight = ld * (ld + 1.0) * (2.0 * ld + 1.0) * power / denom;
    const double bracket =
        1.0 / (2.0 * ld + 1.0) - p2 * (2.0 * ld + 1.0) * (e * (ld - 2.0) + ld + 1.0) /
                                     ((2.0 * ld - 1.0) * (2.0 * ld + 3.0) * denom);
    const double term = weight * (1.0 - a * bracket);
    sum += term;
    quiet = std::abs(term) <= tol * std::abs(sum) ? quiet + 1 : 0;
    if (quiet >= greens::kQuietTerms)
      break;
    power *= p2;
  }
  return -detail::dipole_unit(tr, sys) * (e - 1.0) * sum;
}

/// High-temperature form -|d|^2 Gamma_0/(6 eps0) + (|d|^2/3 eps0)
/// (k_B T/hbar w - 1/2) Re[Gamma_w - Gamma_0] with the exact Mie trace.
inline SpectroscopicResult u_spectroscopic(const TransitionSpec &tr,
                                           const SphereSystem &sys,
                                           const PermittivityModel &model,
                                           const ThermalState &state, double tol) {
  tr.validate();
  state.validate();
  const double g0 = greens::gamma_static(sys, detail::static_permittivity(model));
  const double gw =
      greens::gamma_trace(sys, std::abs(tr.omega), model, detail::clamp_tol(tol))
          .value.real();
  SpectroscopicResult out;
  out.u0 = -tr.d2 * g0 / (6.0 * constants::vacuum_permittivity);
  out.correction = tr.d2 / (3.0 * constants::vacuum_permittivity) *
                   detail::thermal_factor(tr.omega, state) * (gw - g0);
  out.energy = out.u0 + out.correction;
  const double ratio = constants::boltzmann * state.temperature /
                       (constants::hbar * std::abs(tr.omega));
  if (!(ratio > kSpectroscopicRatio))
    out.regime_warning = "k_B T / hbar|w| = " + std::to_string(ratio) +
                         " is not large; high-temperature form is unreliable";
  return out;
}

/// Single-transition potential by the chosen method.
inline double evaluate(Method method, const TransitionSpec &tr,
                       const SphereSystem &sys, const PermittivityModel &model,
                       const ThermalState &state, double tol) {
  switch (method) {
  case Method::Exact:
    return u_exact(tr, sys, model, state, tol).total;
  case Method::ZeroTemperature:
    return u_zero_temperature(tr, sys, model, tol);
  case Method::Invariant:
    return u_invariant(tr, sys);
  case Method::ClosedForm:
    return u_approx_metal(tr, sys, model, state).total;
  case Method::Spectroscopic:
    return u_spectroscopic(tr, sys, model, state, tol).energy;
  case Method::Dielectric:
    if (model.kind() != MaterialKind::ConstantDielectric)
      throw DomainError("dielectric series needs a constant-dielectric model");
    return u_approx_dielectric(tr, sys, model.eps_static(), state, tol);
  }
  throw DomainError("unknown method");
}

/// U_n = sum_k U_nk over the transitions out of one eigenstate.
inline double aggregate_transitions(std::span<const TransitionSpec> transitions,
                                    const SphereSystem &sys,
                                    const PermittivityModel &model,
                                    const ThermalState &state, Method method,
                                    double tol) {
  if (transitions.empty())
    throw DomainError("at least one transition is required");
  double total = 0.0;
  for (std::size_t k = 0; k < transitions.size(); ++k) {
    try {
      total += evaluate(method, transitions[k], sys, model, state, tol);
    } catch (Error &e) {
      e.prepend_context("transition " + std::to_string(k));
      throw;
    }
  }
  return total;
}

struct WeightedState {
  double probability;
  std::vector<TransitionSpec> transitions;
};

/// U = sum_n p_n U_n for a particle in a superposition of eigenstates.
inline double aggregate_superposition(std::span<const WeightedState> states,
                                      const SphereSystem &sys,
                                      const PermittivityModel &model,
                                      const ThermalState &state, Method method,
                                      double tol) {
  if (states.empty())
    throw DomainError("at least one eigenstate is required");
  double norm = 0.0;
  for (const auto &s : states) {
    if (!(s.probability >= 0.0))
      throw DomainError("occupation probabilities must be >= 0");
    norm += s.probability;
  }
  if (std::abs(norm - 1.0) > 1e-12)
    throw DomainError("occupation probabilities must sum to 1");
  double total = 0.0;
  for (std::size_t n = 0; n < states.size(); ++n) {
    if (states[n].probability == 0.0)
      continue;
    try {
      total += states[n].probability *
               aggregate_transitions(states[n].transitions, sys, model, state,
                                     method, tol);
    } catch (Error &e) {
      e.prepend_context("eigenstate " + std::to_string(n));
      throw;
    }
  }
  return total;
}

} // namespace cpsphere::potential
