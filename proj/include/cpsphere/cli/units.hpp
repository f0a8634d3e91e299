#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cpsphere::cli {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class Dimension { Length, Energy, Temperature, DipoleSquared, Pure };

namespace detail {

struct UnitEntry {
  std::string_view suffix;
  int exp10;           // decimal prefix; negative powers divide, so 10um is exactly 1e-5
  double factor = 1.0; // non-decimal part of the conversion
};

inline double apply(const UnitEntry &u, double value) {
  const double p = std::pow(10.0, std::abs(u.exp10));
  return (u.exp10 < 0 ? value / p : value * p) * u.factor;
}

// Lengths -> metres, energies -> eV, temperatures -> K, |d|^2 -> C^2 m^2.
inline const std::vector<UnitEntry> &units_for(Dimension dim) {
  static const std::vector<UnitEntry> length{
      {"m", 0}, {"cm", -2}, {"mm", -3}, {"um", -6}, {"\xC2\xB5" "m", -6},
      {"nm", -9}, {"pm", -12}};
  static const std::vector<UnitEntry> energy{
      {"eV", 0}, {"meV", -3}, {"ueV", -6}, {"\xC2\xB5" "eV", -6}, {"keV", 3}};
  static const std::vector<UnitEntry> temperature{{"K", 0}, {"mK", -3}};
  // 1 D = 3.33564095198152e-30 C m
  static const std::vector<UnitEntry> dipole{
      {"C2m2", 0}, {"D2", -60, 3.33564095198152 * 3.33564095198152}};
  static const std::vector<UnitEntry> pure{{"", 0}};
  switch (dim) {
  case Dimension::Length:
    return length;
  case Dimension::Energy:
    return energy;
  case Dimension::Temperature:
    return temperature;
  case Dimension::DipoleSquared:
    return dipole;
  case Dimension::Pure:
    break;
  }
  return pure;
}

inline const char *dimension_name(Dimension dim) {
  switch (dim) {
  case Dimension::Length:
    return "length (m, cm, mm, um, nm, pm)";
  case Dimension::Energy:
    return "energy (eV, meV, ueV, keV)";
  case Dimension::Temperature:
    return "temperature (K, mK)";
  case Dimension::DipoleSquared:
    return "squared dipole (C2m2, D2)";
  case Dimension::Pure:
    break;
  }
  return "plain number";
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

/// Leading floating-point literal and the remainder of the string.
inline std::pair<double, std::string_view> split_number(std::string_view text) {
  double value = 0.0;
  const auto *first = text.data();
  const auto *last = text.data() + text.size();
  if (first != last && *first == '+')
    ++first;
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc{})
    throw ConfigError("expected a number, got '" + std::string(text) + "'");
  return {value, trim(std::string_view(res.ptr, last - res.ptr))};
}

} // namespace detail

/// Parses "10um", "-1.5 meV", "300K" into SI-ish base units (m, eV, K, C^2 m^2).
/// Dimensional quantities must carry a unit.
inline double parse_quantity(std::string_view text, Dimension dim) {
  text = detail::trim(text);
  if (text.empty())
    throw ConfigError("empty value");
  const auto [value, suffix] = detail::split_number(text);
  for (const auto &u : detail::units_for(dim))
    if (suffix == u.suffix)
      return detail::apply(u, value);
  if (suffix.empty())
    throw ConfigError("missing unit in '" + std::string(text) + "', expected " +
                      detail::dimension_name(dim));
  throw ConfigError("unknown unit '" + std::string(suffix) + "' in '" +
                    std::string(text) + "', expected " +
                    detail::dimension_name(dim));
}

/// Comma-separated list of quantities of the same dimension.
inline std::vector<double> parse_quantity_list(std::string_view text, Dimension dim) {
  std::vector<double> out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(parse_quantity(text.substr(0, comma), dim));
    if (comma == std::string_view::npos)
      break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

} // namespace cpsphere::cli
