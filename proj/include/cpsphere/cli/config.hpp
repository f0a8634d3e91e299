#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cpsphere/cli/units.hpp"
#include "cpsphere/constants.hpp"
#include "cpsphere/errors.hpp"
#include "cpsphere/materials.hpp"

namespace cpsphere::cli {

enum class Command { Compute, Sweep, Compare, Fig2, Fig3, Fig5 };
enum class SweepVar { T, r, R, x };
enum class RunMethod {
  Exact,
  ZeroTemperature,
  Invariant,
  ClosedForm,
  Spectroscopic,
  Dielectric,
  Compare
};

struct SweepSpec {
  SweepVar var = SweepVar::T;
  double from = 0.0;
  double to = 0.0;
  int points = 0;
  bool log = false;
};

struct RunConfig {
  Command command = Command::Compute;
  double R = 0.0; // m
  double r = 0.0; // m
  materials::PermittivityModel material =
      materials::PermittivityModel::perfect_conductor();
  std::vector<double> transition_ev; // signed, eV; empty when x is used
  std::optional<double> x;
  int direction = 1;
  std::optional<double> d2; // C^2 m^2; absent means reduced output
  double temperature = 0.0; // K, ignored when sweeping T
  std::optional<SweepSpec> sweep;
  RunMethod method = RunMethod::Exact;
  double tol = 1e-8;
  std::string out;
  std::string plot;
  int workers = 1;
};

/// One raw `key = value` setting and where it came from, for diagnostics.
struct Setting {
  std::string value;
  std::string origin;
};

using SettingMap = std::map<std::string, Setting>;

inline const std::vector<std::string> &known_keys() {
  static const std::vector<std::string> keys{
      "R",    "r",         "material", "omega_p", "gamma", "eps",    "transition_energy",
      "x",    "direction", "d2",       "temperature", "var", "from", "to",
      "points", "log",     "method",   "tol",     "out",   "plot",   "workers"};
  return keys;
}

inline std::string normalize_key(std::string_view key) {
  std::string k(detail::trim(key));
  std::replace(k.begin(), k.end(), '-', '_');
  return k;
}

inline bool is_known_key(const std::string &key) {
  const auto &keys = known_keys();
  return std::find(keys.begin(), keys.end(), key) != keys.end();
}

/// Parses `key = value` lines. Blank lines and `#` comments are skipped.
inline SettingMap parse_config_text(std::string_view text, const std::string &source) {
  SettingMap out;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string origin = source + ":" + std::to_string(number);
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos)
      view = view.substr(0, hash);
    view = detail::trim(view);
    if (view.empty())
      continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(origin + ": expected 'key = value', got '" +
                        std::string(view) + "'");
    const std::string key = normalize_key(view.substr(0, eq));
    if (!is_known_key(key))
      throw ConfigError(origin + ": unknown key '" + key + "'");
    const std::string value(detail::trim(view.substr(eq + 1)));
    if (value.empty())
      throw ConfigError(origin + ": key '" + key + "' has no value");
    out[key] = {value, origin};
  }
  return out;
}

inline SettingMap read_config_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path);
}

/// Later layers win: typically preset < file < flags.
inline SettingMap merge_settings(std::initializer_list<const SettingMap *> layers) {
  SettingMap out;
  for (const auto *layer : layers)
    for (const auto &[k, v] : *layer)
      out[k] = v;
  return out;
}

inline std::optional<Command> parse_command(std::string_view name) {
  if (name == "compute")
    return Command::Compute;
  if (name == "sweep")
    return Command::Sweep;
  if (name == "compare")
    return Command::Compare;
  if (name == "fig2")
    return Command::Fig2;
  if (name == "fig3")
    return Command::Fig3;
  if (name == "fig5")
    return Command::Fig5;
  return std::nullopt;
}

inline bool is_preset(Command c) {
  return c == Command::Fig2 || c == Command::Fig3 || c == Command::Fig5;
}

/// Geometry, material and sweep of the figure presets. The transition
/// set (x = 0.1, 0.01, 0.001, upward) is fixed by the runner.
inline SettingMap preset_settings(Command c) {
  SettingMap s;
  auto set = [&](const char *k, const char *v) { s[k] = {v, "preset"}; };
  set("var", "T");
  set("from", "0K");
  set("to", "600K");
  set("points", "61");
  set("d2", "1D2");
  switch (c) {
  case Command::Fig2:
    set("R", "10um");
    set("r", "20um");
    set("material", "drude");
    set("omega_p", "9eV");
    set("gamma", "35meV");
    break;
  case Command::Fig3:
    set("R", "1um");
    set("r", "2um");
    set("material", "drude");
    set("omega_p", "9eV");
    set("gamma", "35meV");
    break;
  case Command::Fig5:
    set("R", "10um");
    set("r", "20um");
    set("material", "dielectric");
    set("eps", "6");
    break;
  default:
    break;
  }
  return s;
}

namespace detail {

class SettingReader {
public:
  explicit SettingReader(const SettingMap &settings) : settings_(settings) {}

  bool has(const std::string &key) const { return settings_.count(key) != 0; }

  const Setting &get(const std::string &key) const { return settings_.at(key); }

  template <class F> auto parse(const std::string &key, F &&f) const {
    const auto &s = get(key);
    try {
      return f(s.value);
    } catch (const ConfigError &e) {
      throw ConfigError(s.origin + ": key '" + key + "': " + e.what());
    }
  }

  double quantity(const std::string &key, Dimension dim) const {
    return parse(key, [&](const std::string &v) { return parse_quantity(v, dim); });
  }

  [[noreturn]] void fail(const std::string &key, const std::string &msg) const {
    const auto it = settings_.find(key);
    const std::string where = it == settings_.end() ? "" : it->second.origin + ": ";
    throw ConfigError(where + "key '" + key + "': " + msg);
  }

private:
  const SettingMap &settings_;
};

inline bool parse_bool(const std::string &v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on")
    return true;
  if (v == "false" || v == "0" || v == "no" || v == "off")
    return false;
  throw ConfigError("expected true/false, got '" + v + "'");
}

inline int parse_int(const std::string &v) {
  int out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
    throw ConfigError("expected an integer, got '" + v + "'");
  return out;
}

inline RunMethod parse_method(const std::string &v) {
  if (v == "exact")
    return RunMethod::Exact;
  if (v == "zero-t")
    return RunMethod::ZeroTemperature;
  if (v == "invariant")
    return RunMethod::Invariant;
  if (v == "closed-form")
    return RunMethod::ClosedForm;
  if (v == "spectroscopic")
    return RunMethod::Spectroscopic;
  if (v == "dielectric")
    return RunMethod::Dielectric;
  if (v == "compare")
    return RunMethod::Compare;
  throw ConfigError("unknown method '" + v +
                    "' (exact, zero-t, invariant, closed-form, spectroscopic, "
                    "dielectric, compare)");
}

inline SweepVar parse_var(const std::string &v) {
  if (v == "T")
    return SweepVar::T;
  if (v == "r")
    return SweepVar::r;
  if (v == "R")
    return SweepVar::R;
  if (v == "x")
    return SweepVar::x;
  throw ConfigError("unknown sweep variable '" + v + "' (T, r, R, x)");
}

inline Dimension var_dimension(SweepVar v) {
  switch (v) {
  case SweepVar::T:
    return Dimension::Temperature;
  case SweepVar::r:
  case SweepVar::R:
    return Dimension::Length;
  case SweepVar::x:
    break;
  }
  return Dimension::Pure;
}

inline std::string join(const std::vector<std::string> &items) {
  std::string out;
  for (const auto &s : items)
    out += (out.empty() ? "" : ", ") + s;
  return out;
}

} // namespace detail

/// Validates merged settings into a RunConfig. Missing required keys are
/// reported together.
inline RunConfig build_config(Command command, const SettingMap &settings,
                              int default_workers = 1) {
  const detail::SettingReader in(settings);
  RunConfig cfg;
  cfg.command = command;
  cfg.workers = default_workers;

  if (in.has("method"))
    cfg.method = in.parse("method", detail::parse_method);
  if (command == Command::Compare || is_preset(command))
    cfg.method = RunMethod::Compare;

  const bool wants_sweep = command == Command::Sweep || is_preset(command) ||
                           (command == Command::Compare && in.has("var"));
  const std::optional<SweepVar> var =
      in.has("var") ? std::optional(in.parse("var", detail::parse_var)) : std::nullopt;

  std::vector<std::string> missing;
  auto require = [&](const char *key) {
    if (!in.has(key))
      missing.emplace_back(key);
  };
  if (var != SweepVar::R)
    require("R");
  if (var != SweepVar::r)
    require("r");
  require("material");
  if (wants_sweep) {
    require("var");
    require("from");
    require("to");
    require("points");
  }
  if (var != SweepVar::T)
    require("temperature");
  if (!is_preset(command) && var != SweepVar::x && !in.has("transition_energy") &&
      !in.has("x"))
    missing.emplace_back("transition_energy (or x)");
  if (in.has("material")) {
    const auto &m = in.get("material").value;
    if (m == "drude") {
      require("omega_p");
      require("gamma");
    } else if (m == "dielectric") {
      require("eps");
    }
  }
  if (!missing.empty()) {
    std::string method_name = "this run";
    if (in.has("method"))
      method_name = "method " + in.get("method").value;
    throw ConfigError("missing required keys for " + method_name + ": " +
                      detail::join(missing));
  }

  if (!wants_sweep)
    for (const char *key : {"var", "from", "to", "points", "log"})
      if (in.has(key))
        in.fail(key, "a single-point run takes no sweep settings; use the sweep "
                     "command");

  if (var != SweepVar::R)
    cfg.R = in.quantity("R", Dimension::Length);
  if (var != SweepVar::r)
    cfg.r = in.quantity("r", Dimension::Length);
  if (var != SweepVar::R && !(cfg.R > 0.0))
    in.fail("R", "sphere radius must be positive");
  if (var != SweepVar::R && var != SweepVar::r && !(cfg.R < cfg.r))
    in.fail("R", "sphere radius must be smaller than the distance r (R < r)");

  const auto &material = in.get("material").value;
  auto only_for = [&](const char *key, const char *kind) {
    if (in.has(key))
      in.fail(key, std::string("only applies to material = ") + kind);
  };
  try {
    if (material == "pc") {
      only_for("omega_p", "drude");
      only_for("gamma", "drude");
      only_for("eps", "dielectric");
      cfg.material = materials::PermittivityModel::perfect_conductor();
    } else if (material == "drude") {
      only_for("eps", "dielectric");
      const double wp = in.quantity("omega_p", Dimension::Energy);
      const double g = in.quantity("gamma", Dimension::Energy);
      if (!(wp > 0.0))
        in.fail("omega_p", "plasma frequency must be positive");
      if (!(g >= 0.0))
        in.fail("gamma", "damping must be >= 0");
      cfg.material = materials::PermittivityModel::drude(
          constants::ev_to_angular_frequency(wp), constants::ev_to_angular_frequency(g));
    } else if (material == "dielectric") {
      only_for("omega_p", "drude");
      only_for("gamma", "drude");
      const double e = in.quantity("eps", Dimension::Pure);
      if (!(e >= 1.0))
        in.fail("eps", "permittivity must be >= 1");
      cfg.material = materials::PermittivityModel::constant_dielectric(e);
    } else {
      in.fail("material", "unknown material '" + material + "' (pc, drude, dielectric)");
    }
  } catch (const DomainError &e) {
    in.fail("material", e.what());
  }

  if (is_preset(command) && in.has("transition_energy"))
    in.fail("transition_energy", "figure presets fix the transitions; use x to pick one");
  if (in.has("transition_energy") && in.has("x"))
    in.fail("x", "give either transition_energy or x, not both");
  if (var == SweepVar::x && (in.has("transition_energy") || in.has("x")))
    in.fail("var", "sweeping x defines the transition; drop transition_energy and x");
  if (in.has("transition_energy")) {
    cfg.transition_ev = in.parse("transition_energy", [](const std::string &v) {
      return parse_quantity_list(v, Dimension::Energy);
    });
    for (double e : cfg.transition_ev)
      if (e == 0.0 || !std::isfinite(e))
        in.fail("transition_energy", "transition energies must be non-zero");
  }
  if (in.has("x")) {
    cfg.x = in.quantity("x", Dimension::Pure);
    if (!(*cfg.x > 0.0))
      in.fail("x", "retardation parameter must be positive");
  }
  if (in.has("direction")) {
    const auto &d = in.get("direction").value;
    if (d == "up")
      cfg.direction = 1;
    else if (d == "down")
      cfg.direction = -1;
    else
      in.fail("direction", "expected up or down");
    if (in.has("transition_energy"))
      in.fail("direction", "the sign of transition_energy sets the direction");
  }

  if (in.has("d2")) {
    cfg.d2 = in.quantity("d2", Dimension::DipoleSquared);
    if (!(*cfg.d2 > 0.0))
      in.fail("d2", "squared dipole moment must be positive");
  }
  if (var != SweepVar::T) {
    cfg.temperature = in.quantity("temperature", Dimension::Temperature);
    if (!(cfg.temperature >= 0.0))
      in.fail("temperature", "temperature must be >= 0");
  } else if (in.has("temperature")) {
    in.fail("temperature", "temperature is the swept variable");
  }

  if (wants_sweep) {
    SweepSpec sw;
    sw.var = *var;
    const Dimension dim = detail::var_dimension(sw.var);
    sw.from = in.quantity("from", dim);
    sw.to = in.quantity("to", dim);
    sw.points = in.parse("points", detail::parse_int);
    if (in.has("log"))
      sw.log = in.parse("log", detail::parse_bool);
    if (sw.points < 2)
      in.fail("points", "a sweep needs at least 2 points");
    if (!(sw.from < sw.to))
      in.fail("from", "sweep needs from < to");
    if (sw.log && !(sw.from > 0.0))
      in.fail("log", "a logarithmic sweep needs from > 0");
    if (sw.var == SweepVar::T && !(sw.from >= 0.0))
      in.fail("from", "temperature must be >= 0");
    if ((sw.var == SweepVar::r || sw.var == SweepVar::R || sw.var == SweepVar::x) &&
        !(sw.from > 0.0))
      in.fail("from", "swept quantity must be positive");
    if (sw.var == SweepVar::r && !(cfg.R < sw.from))
      in.fail("from", "every swept r must exceed R (R < r)");
    if (sw.var == SweepVar::R && !(sw.to < cfg.r))
      in.fail("to", "every swept R must stay below r (R < r)");
    cfg.sweep = sw;
  }

  if (in.has("tol")) {
    cfg.tol = in.quantity("tol", Dimension::Pure);
    if (!(cfg.tol >= 1e-12 && cfg.tol <= 1e-3))
      in.fail("tol", "tolerance must lie in [1e-12, 1e-3]");
  }
  if (in.has("out"))
    cfg.out = in.get("out").value;
  if (in.has("plot"))
    cfg.plot = in.get("plot").value;
  if (!cfg.plot.empty() && !wants_sweep)
    in.fail("plot", "plotting needs a sweep");
  if (in.has("workers")) {
    cfg.workers = in.parse("workers", detail::parse_int);
    if (cfg.workers < 1)
      in.fail("workers", "need at least one worker");
  }

  const bool metal = cfg.material.kind() != materials::MaterialKind::ConstantDielectric;
  if (cfg.method == RunMethod::ClosedForm && !metal)
    in.fail("method", "closed-form needs material pc or drude; use method = "
                      "dielectric for a dielectric sphere");
  if (cfg.method == RunMethod::Dielectric && metal)
    in.fail("method", "dielectric needs material = dielectric");
  return cfg;
}

/// CP_SPHERE_WORKERS, if set and valid, else 1.
inline int default_workers_from_env() {
  const char *env = std::getenv("CP_SPHERE_WORKERS");
  if (env == nullptr)
    return 1;
  try {
    const int n = detail::parse_int(env);
    if (n < 1)
      throw ConfigError("must be >= 1");
    return n;
  } catch (const ConfigError &e) {
    throw ConfigError(std::string("CP_SPHERE_WORKERS: ") + e.what());
  }
}

} // namespace cpsphere::cli
