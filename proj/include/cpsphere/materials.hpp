#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "cpsphere/errors.hpp"

namespace cpsphere::materials {

using complex = std::complex<double>;

enum class MaterialKind { PerfectConductor, Drude, ConstantDielectric };

/// Dielectric response of the sphere. Frequencies are angular (rad/s).
class PermittivityModel {
public:
  static PermittivityModel perfect_conductor() {
    return PermittivityModel(MaterialKind::PerfectConductor, 0.0, 0.0, 0.0);
  }

  /// eps(w) = 1 - wp^2 / [w (w + i gamma)]
  static PermittivityModel drude(double plasma_frequency, double damping) {
    if (!(plasma_frequency > 0.0) || !std::isfinite(plasma_frequency))
      throw DomainError("Drude plasma frequency must be positive");
    if (!(damping >= 0.0) || !std::isfinite(damping))
      throw DomainError("Drude damping must be non-negative");
    return PermittivityModel(MaterialKind::Drude, plasma_frequency, damping,
                             0.0);
  }

  /// Frequency-independent permittivity. eps = 1 is accepted and describes a
  /// vacuum sphere (no scattering at all).
  static PermittivityModel constant_dielectric(double eps) {
    if (!(eps >= 1.0) || !std::isfinite(eps))
      throw DomainError("constant permittivity must be >= 1, got " +
                        std::to_string(eps));
    return PermittivityModel(MaterialKind::ConstantDielectric, 0.0, 0.0, eps);
  }

  MaterialKind kind() const noexcept { return kind_; }
  double plasma_frequency() const noexcept { return plasma_frequency_; }
  double damping() const noexcept { return damping_; }
  double eps_static() const noexcept { return eps_static_; }

  bool is_vacuum() const noexcept {
    return kind_ == MaterialKind::ConstantDielectric && eps_static_ == 1.0;
  }

private:
  PermittivityModel(MaterialKind kind, double wp, double gamma, double eps)
      : kind_(kind), plasma_frequency_(wp), damping_(gamma), eps_static_(eps) {}

  MaterialKind kind_;
  double plasma_frequency_;
  double damping_;
  double eps_static_;
};

/// A permittivity value, or the perfect-conductor marker |eps| = infinity.
/// Perfect conductors never carry a large finite stand-in; every consumer
/// branches to the analytic limit formulas instead.
class Permittivity {
public:
  static Permittivity infinite() { return Permittivity(true, {}); }
  static Permittivity finite(complex value) {
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
      throw DomainError("permittivity must be finite");
    return Permittivity(false, value);
  }

  bool is_infinite() const noexcept { return infinite_; }

  complex value() const {
    if (infinite_)
      throw DomainError("perfect conductor has no finite permittivity");
    return value_;
  }

private:
  Permittivity(bool infinite, complex value)
      : infinite_(infinite), value_(value) {}

  bool infinite_;
  complex value_;
};

namespace detail {

inline bool on_real_axis(complex w) { return w.imag() == 0.0; }
inline bool on_positive_imaginary_axis(complex w) {
  return w.real() == 0.0 && w.imag() > 0.0;
}

inline void check_frequency(complex w) {
  if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
    throw DomainError("frequency must be finite");
  if (!on_real_axis(w) && !on_positive_imaginary_axis(w))
    throw DomainError("frequency must lie on the real axis or the positive "
                      "imaginary axis, got " +
                      cpsphere::detail::format_complex(w));
}

} // namespace detail

inline Permittivity permittivity(const PermittivityModel &model, complex w) {
  detail::check_frequency(w);
  switch (model.kind()) {
  case MaterialKind::PerfectConductor:
    return Permittivity::infinite();
  case MaterialKind::ConstantDielectric:
    return Permittivity::finite(model.eps_static());
  case MaterialKind::Drude:
    break;
  }
  if (w == complex{})
    throw PoleError("Drude permittivity has a pole at zero frequency; use the "
                    "static (perfect-conductor) limit instead");
  const double wp2 = model.plasma_frequency() * model.plasma_frequency();
  if (detail::on_positive_imaginary_axis(w)) {
    const double xi = w.imag();
    return Permittivity::finite(1.0 + wp2 / (xi * (xi + model.damping())));
  }
  const double omega = w.real();
  return Permittivity::finite(
      1.0 - wp2 / (omega * complex(omega, model.damping())));
}

/// Principal square root; Im sqrt(eps) >= 0 whenever Im eps >= 0.
inline complex sqrt_eps(const Permittivity &eps) {
  complex value = eps.value();
  if (value.imag() == 0.0)
    value.imag(0.0); // drop a negative zero so eps = -1 maps to +i
  return std::sqrt(value);
}

inline complex sqrt_eps(const PermittivityModel &model, complex w) {
  return sqrt_eps(permittivity(model, w));
}

/// Re[i / sqrt(eps(|w|))], the small parameter of the reflectivity
/// correction. Evaluated at |w| so the result is even in w. Zero for a
/// perfect conductor.
inline double re_i_over_sqrt_eps(const PermittivityModel &model, double w) {
  if (model.kind() == MaterialKind::PerfectConductor)
    return 0.0;
  if (w == 0.0 || !std::isfinite(w))
    throw DomainError("re_i_over_sqrt_eps requires a finite non-zero frequency");
  const complex root = sqrt_eps(model, complex(std::abs(w), 0.0));
  return (complex(0.0, 1.0) / root).real();
}

} // namespace cpsphere::materials
