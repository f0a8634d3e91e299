// cp-sphere: Casimir-Polder potential of a particle outside a sphere.
//
//   cp-sphere compute --config run.cfg --temperature 300K
//   cp-sphere sweep --config run.cfg --var T --from 0K --to 600K --points 61
//   cp-sphere fig2 --out fig2.csv --plot fig2.svg

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cpsphere/cli/config.hpp"
#include "cpsphere/cli/runner.hpp"

namespace {

using namespace cpsphere::cli;

struct FlagSpec {
  const char *flag;
  const char *key;
  const char *help;
};

const std::vector<FlagSpec> &flag_specs() {
  static const std::vector<FlagSpec> specs{
      {"--R", "R", "sphere radius, e.g. 10um"},
      {"--r", "r", "particle distance from the sphere centre, e.g. 20um"},
      {"--material", "material", "pc, drude or dielectric"},
      {"--omega-p", "omega_p", "Drude plasma frequency as an energy, e.g. 9eV"},
      {"--gamma", "gamma", "Drude damping as an energy, e.g. 35meV"},
      {"--eps", "eps", "static permittivity of a dielectric sphere"},
      {"--transition-energy", "transition_energy",
       "signed transition energies, comma separated, e.g. 1meV,-2meV"},
      {"--x", "x", "retardation parameter r|w|/c instead of an energy"},
      {"--direction", "direction", "up or down (with --x)"},
      {"--d2", "d2", "squared dipole moment, e.g. 1D2 or 1e-58C2m2"},
      {"--temperature", "temperature", "temperature, e.g. 300K"},
      {"--var", "var", "swept variable: T, r, R or x"},
      {"--from", "from", "sweep start (with units of --var)"},
      {"--to", "to", "sweep end"},
      {"--points", "points", "number of sweep points"},
      {"--method", "method",
       "exact, zero-t, invariant, closed-form, spectroscopic, dielectric, compare"},
      {"--tol", "tol", "relative tolerance in [1e-12, 1e-3]"},
      {"--out", "out", "CSV output path (default stdout)"},
      {"--plot", "plot", "SVG output path"},
      {"--workers", "workers", "worker threads (default $CP_SPHERE_WORKERS or 1)"},
  };
  return specs;
}

struct SubcommandState {
  std::string config;
  std::map<std::string, std::string> values;
  bool log = false;
};

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Casimir-Polder potential of a particle outside a sphere"};
  app.require_subcommand(1);

  const std::vector<std::pair<const char *, const char *>> commands{
      {"compute", "single-point potential"},
      {"sweep", "potential along a parameter sweep"},
      {"compare", "exact result against the closed forms"},
      {"fig2", "gold sphere, R = 10 um, r = 20 um, T = 0..600 K"},
      {"fig3", "gold sphere, R = 1 um, r = 2 um, T = 0..600 K"},
      {"fig5", "dielectric sphere, eps = 6, R = 10 um, r = 20 um, T = 0..600 K"}};

  std::map<std::string, SubcommandState> state;
  for (const auto &[name, help] : commands) {
    auto *sub = app.add_subcommand(name, help);
    auto &st = state[name];
    sub->add_option("--config", st.config, "key = value configuration file");
    for (const auto &spec : flag_specs())
      sub->add_option(spec.flag, st.values[spec.key], spec.help);
    sub->add_flag("--log", st.log, "logarithmic sweep spacing");
  }

  CLI11_PARSE(app, argc, argv);

  const auto *chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  auto &st = state[name];
  const Command command = *parse_command(name);

  try {
    SettingMap flags;
    for (const auto &spec : flag_specs())
      if (chosen->count(spec.flag) > 0)
        flags[spec.key] = {st.values[spec.key], std::string("flag ") + spec.flag};
    if (st.log)
      flags["log"] = {"true", "flag --log"};

    const SettingMap preset = is_preset(command) ? preset_settings(command) : SettingMap{};
    const SettingMap file = st.config.empty() ? SettingMap{} : read_config_file(st.config);
    const SettingMap merged = merge_settings({&preset, &file, &flags});
    const RunConfig cfg = build_config(command, merged, default_workers_from_env());
    return run(cfg, std::cout, std::cerr);
  } catch (...) {
    return exit_code_for(std::current_exception(), std::cerr);
  }
}
