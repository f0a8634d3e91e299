#pragma once

#include <numbers>

// CODATA 2018 exact / recommended values, SI units.
namespace cpsphere::constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double hbar = 1.054571817e-34;        // J s
inline constexpr double electron_volt = 1.602176634e-19; // J
inline constexpr double boltzmann = 1.380649e-23;      // J / K
inline constexpr double speed_of_light = 299792458.0;  // m / s
inline constexpr double vacuum_permittivity = 8.8541878128e-12; // F / m
inline constexpr double debye = 3.33564095198152e-30;  // C m

/// Angular frequency (rad/s) of a quantum of energy given in eV.
constexpr double ev_to_angular_frequency(double energy_ev) {
  return energy_ev * electron_volt / hbar;
}

constexpr double angular_frequency_to_ev(double omega) {
  return omega * hbar / electron_volt;
}

} // namespace cpsphere::constants
