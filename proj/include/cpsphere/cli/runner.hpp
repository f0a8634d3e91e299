#pragma once

#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <iostream>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "cpsphere/cli/config.hpp"
#include "cpsphere/cli/csv.hpp"
#include "cpsphere/cli/svg.hpp"
#include "cpsphere/constants.hpp"
#include "cpsphere/errors.hpp"
#include "cpsphere/potential.hpp"

namespace cpsphere::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitRegime = 2;
inline constexpr int kExitConvergence = 3;

/// Squared dipole used for the J columns when none is configured (1 D^2).
inline constexpr double kDefaultDipoleSquared = constants::debye * constants::debye;

struct RowResult {
  std::vector<double> values;
  std::vector<std::string> warnings;
};

/// Evaluates `count` rows on up to `workers` threads. Results keep their
/// index order; if any row fails, the failure of the lowest index is rethrown.
inline std::vector<RowResult> evaluate_rows(std::size_t count, int workers,
                                            const std::function<RowResult(std::size_t)> &f) {
  std::vector<RowResult> results(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        results[i] = f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n = std::min<std::size_t>(std::max(workers, 1), std::max<std::size_t>(count, 1));
  if (n <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < n; ++k)
      pool.emplace_back(work);
    for (auto &t : pool)
      t.join();
  }
  for (const auto &e : errors)
    if (e)
      std::rethrow_exception(e);
  return results;
}

/// Linear or logarithmic grid with exact endpoints.
inline std::vector<double> sweep_values(const SweepSpec &sw) {
  std::vector<double> out(sw.points);
  for (int i = 0; i < sw.points; ++i) {
    const double t = static_cast<double>(i) / (sw.points - 1);
    out[i] = sw.log ? std::exp(std::log(sw.from) + t * (std::log(sw.to) - std::log(sw.from)))
                    : sw.from + t * (sw.to - sw.from);
  }
  out.front() = sw.from;
  out.back() = sw.to;
  return out;
}

namespace detail {

struct PointSpec {
  double T;
  double R;
  double r;
  std::optional<double> x;
};

inline std::vector<potential::TransitionSpec>
transitions_at(const RunConfig &cfg, const PointSpec &p) {
  const double d2 = cfg.d2.value_or(kDefaultDipoleSquared);
  std::vector<potential::TransitionSpec> out;
  if (!cfg.transition_ev.empty()) {
    for (double ev : cfg.transition_ev)
      out.push_back({d2, constants::ev_to_angular_frequency(ev)});
  } else {
    const double x = p.x ? *p.x : *cfg.x;
    out.push_back({d2, cfg.direction * x * constants::speed_of_light / p.r});
  }
  return out;
}

inline potential::Method to_method(RunMethod m) {
  switch (m) {
  case RunMethod::Exact:
    return potential::Method::Exact;
  case RunMethod::ZeroTemperature:
    return potential::Method::ZeroTemperature;
  case RunMethod::Invariant:
    return potential::Method::Invariant;
  case RunMethod::ClosedForm:
    return potential::Method::ClosedForm;
  case RunMethod::Spectroscopic:
    return potential::Method::Spectroscopic;
  case RunMethod::Dielectric:
  case RunMethod::Compare:
    break;
  }
  return potential::Method::Dielectric;
}

inline bool is_metal(const materials::PermittivityModel &m) {
  return m.kind() != materials::MaterialKind::ConstantDielectric;
}

/// T-invariant term -|d|^2 Gamma_0 / (6 eps0), summed over transitions.
inline double invariant_sum(const std::vector<potential::TransitionSpec> &trs,
                            const greens::SphereSystem &sys,
                            const materials::PermittivityModel &model) {
  const double g0 = greens::gamma_static(sys, potential::detail::static_permittivity(model));
  double total = 0.0;
  for (const auto &tr : trs)
    total += -tr.d2 * g0 / (6.0 * constants::vacuum_permittivity);
  return total;
}

/// Closed-form column of a comparison; NaN plus a warning outside its regime.
inline double closed_or_nan(const std::function<double()> &f, const std::string &where,
                            std::vector<std::string> &warnings) {
  try {
    return f();
  } catch (const RegimeError &e) {
    warnings.push_back(where + ": closed form outside its regime: " + e.what());
    return std::numeric_limits<double>::quiet_NaN();
  }
}

inline std::string describe(const PointSpec &p) {
  return "T = " + format_number(p.T) + " K, R = " + format_number(p.R) +
         " m, r = " + format_number(p.r) + " m";
}

inline std::vector<PointSpec> points_of(const RunConfig &cfg) {
  PointSpec base{cfg.temperature, cfg.R, cfg.r, std::nullopt};
  if (!cfg.sweep)
    return {base};
  std::vector<PointSpec> out;
  for (double v : sweep_values(*cfg.sweep)) {
    PointSpec p = base;
    switch (cfg.sweep->var) {
    case SweepVar::T: p.T = v; break;
    case SweepVar::r: p.r = v; break;
    case SweepVar::R: p.R = v; break;
    case SweepVar::x: p.x = v; break;
    }
    out.push_back(p);
  }
  return out;
}

inline double scale_of(const RunConfig &cfg, const greens::SphereSystem &sys) {
  const double r = sys.distance();
  return 24.0 * constants::pi * constants::vacuum_permittivity * r * r * r /
         cfg.d2.value_or(kDefaultDipoleSquared);
}

inline std::vector<std::string> energy_columns(const RunConfig &cfg,
                                               std::initializer_list<const char *> names) {
  std::vector<std::string> out;
  for (const char *n : names)
    out.push_back(std::string(n) + (cfg.d2 ? "_J" : "_reduced"));
  return out;
}

inline Table generic_table(const RunConfig &cfg, std::vector<std::string> &warnings) {
  const auto points = points_of(cfg);
  const bool compare = cfg.method == RunMethod::Compare;
  Table table;
  table.columns = {"T_K", "R_m", "r_m", "x"};
  if (compare) {
    for (auto &c : energy_columns(cfg, {"U_exact", "U_closed", "U0"}))
      table.columns.push_back(c);
    for (const char *c : {"ratio_exact_closed", "ratio_exact_U0", "reldiff_closed", "reldiff_U0"})
      table.columns.push_back(c);
  } else if (cfg.d2) {
    table.columns.push_back("U_J");
    table.columns.push_back("U_reduced");
  } else {
    table.columns.push_back("U_reduced");
  }

  auto row = [&](std::size_t i) {
    const PointSpec &p = points[i];
    RowResult out;
    const greens::SphereSystem sys(p.R, p.r);
    const potential::ThermalState state{p.T};
    const auto trs = transitions_at(cfg, p);
    const double x = sys.retardation(trs.front().omega);
    const double scale = scale_of(cfg, sys);
    const double unit = cfg.d2 ? 1.0 : scale;
    out.values = {p.T, p.R, p.r, x};
    if (compare) {
      const double exact = potential::aggregate_transitions(
          trs, sys, cfg.material, state, potential::Method::Exact, cfg.tol);
      const auto closed_method = is_metal(cfg.material) ? potential::Method::ClosedForm
                                                        : potential::Method::Dielectric;
      const double closed = closed_or_nan(
          [&] {
            return potential::aggregate_transitions(trs, sys, cfg.material, state,
                                                    closed_method, cfg.tol);
          },
          describe(p), out.warnings);
      const double u0 = invariant_sum(trs, sys, cfg.material);
      out.values.insert(out.values.end(),
                        {exact * unit, closed * unit, u0 * unit, exact / closed, exact / u0,
                         (closed - exact) / std::abs(exact), (u0 - exact) / std::abs(exact)});
      return out;
    }
    double u = 0.0;
    if (cfg.method == RunMethod::Spectroscopic) {
      for (const auto &tr : trs) {
        const auto res = potential::u_spectroscopic(tr, sys, cfg.material, state, cfg.tol);
        u += res.energy;
        if (res.regime_warning)
          out.warnings.push_back(describe(p) + ": " + *res.regime_warning);
      }
    } else {
      u = potential::aggregate_transitions(trs, sys, cfg.material, state,
                                           to_method(cfg.method), cfg.tol);
    }
    if (cfg.d2)
      out.values.push_back(u);
    out.values.push_back(u * scale);
    return out;
  };

  for (auto &r : evaluate_rows(points.size(), cfg.workers, row)) {
    table.rows.push_back(std::move(r.values));
    for (auto &w : r.warnings)
      warnings.push_back(std::move(w));
  }
  return table;
}

inline const std::vector<double> &preset_x_values() {
  static const std::vector<double> xs{0.1, 0.01, 0.001};
  return xs;
}

/// Temperature sweeps at x = 0.1, 0.01, 0.001 for the figure presets.
inline Table preset_table(const RunConfig &cfg, std::vector<std::string> &warnings) {
  const bool dielectric = cfg.command == Command::Fig5;
  const auto temps = sweep_values(*cfg.sweep);
  const std::vector<double> xs = cfg.x ? std::vector<double>{*cfg.x} : preset_x_values();
  Table table;
  if (dielectric)
    table.columns = {"T_K", "x", "U_exact_J", "U_series_J", "U_series_nocorr_J",
                     "ratio_exact_series", "ratio_exact_nocorr"};
  else
    table.columns = {"T_K", "x", "U_exact_J", "U_closed_J", "U0_J",
                     "ratio_exact_closed", "ratio_exact_U0"};

  const greens::SphereSystem sys(cfg.R, cfg.r);
  const double d2 = cfg.d2.value_or(kDefaultDipoleSquared);
  auto row = [&](std::size_t i) {
    const double x = xs[i / temps.size()];
    const double T = temps[i % temps.size()];
    const potential::TransitionSpec tr{d2, cfg.direction * x * constants::speed_of_light / cfg.r};
    const potential::ThermalState state{T};
    const std::string where = "T = " + format_number(T) + " K, x = " + format_number(x);
    RowResult out;
    const double exact = potential::u_exact(tr, sys, cfg.material, state, cfg.tol).total;
    double a = 0.0, b = 0.0;
    if (dielectric) {
      const double eps = cfg.material.eps_static();
      a = closed_or_nan([&] { return potential::u_approx_dielectric(tr, sys, eps, state, cfg.tol); },
                        where, out.warnings);
      b = closed_or_nan(
          [&] {
            return potential::u_approx_dielectric(tr, sys, eps, state, cfg.tol,
                                                  potential::DielectricCorrection::Omitted);
          },
          where, out.warnings);
    } else {
      a = closed_or_nan([&] { return potential::u_approx_metal(tr, sys, cfg.material, state).total; },
                        where, out.warnings);
      b = potential::u_invariant(tr, sys);
    }
    out.values = {T, x, exact, a, b, exact / a, exact / b};
    return out;
  };

  for (auto &r : evaluate_rows(xs.size() * temps.size(), cfg.workers, row)) {
    table.rows.push_back(std::move(r.values));
    for (auto &w : r.warnings)
      warnings.push_back(std::move(w));
  }
  return table;
}

inline const char *var_label(SweepVar v) {
  switch (v) {
  case SweepVar::T: return "T (K)";
  case SweepVar::r: return "r (m)";
  case SweepVar::R: return "R (m)";
  case SweepVar::x: return "x = r|w|/c";
  }
  return "";
}

inline std::size_t column_index(const Table &t, const std::string &name) {
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    if (t.columns[i] == name)
      return i;
  throw std::logic_error("no column " + name);
}

inline std::size_t var_column(SweepVar v) {
  switch (v) {
  case SweepVar::T: return 0;
  case SweepVar::R: return 1;
  case SweepVar::r: return 2;
  case SweepVar::x: return 3;
  }
  return 0;
}

} // namespace detail

/// The table a configuration produces, plus any per-row warnings.
inline Table compute_table(const RunConfig &cfg, std::vector<std::string> &warnings) {
  if (is_preset(cfg.command))
    return detail::preset_table(cfg, warnings);
  return detail::generic_table(cfg, warnings);
}

inline Chart make_chart(const RunConfig &cfg, const Table &table) {
  Chart chart;
  chart.log_x = cfg.sweep && cfg.sweep->log;
  if (is_preset(cfg.command)) {
    const bool dielectric = cfg.command == Command::Fig5;
    chart.title = cfg.command == Command::Fig2   ? "gold sphere, R = 10 um, r = 20 um"
                  : cfg.command == Command::Fig3 ? "gold sphere, R = 1 um, r = 2 um"
                                                 : "dielectric sphere, eps = 6, R = 10 um, r = 20 um";
    chart.x_label = "T (K)";
    chart.y_label = "U / U_approx";
    const char *names[2][2] = {{"ratio_exact_closed", "ratio_exact_U0"},
                               {"ratio_exact_series", "ratio_exact_nocorr"}};
    const char *labels[2][2] = {{"closed form", "U0"}, {"series", "series, no correction"}};
    for (int k = 0; k < 2; ++k) {
      const std::size_t col = detail::column_index(table, names[dielectric][k]);
      std::vector<Series> by_x;
      for (const auto &row : table.rows) {
        const std::string label = std::string(labels[dielectric][k]) + ", x = " +
                                  detail::fmt(row[1]);
        if (by_x.empty() || by_x.back().label != label)
          by_x.push_back({label, {}, {}});
        by_x.back().xs.push_back(row[0]);
        by_x.back().ys.push_back(row[col]);
      }
      for (auto &s : by_x)
        chart.series.push_back(std::move(s));
    }
    return chart;
  }
  const SweepVar var = cfg.sweep ? cfg.sweep->var : SweepVar::T;
  chart.x_label = detail::var_label(var);
  const std::size_t xcol = detail::var_column(var);
  auto add = [&](const std::string &name) {
    Series s{name, {}, {}};
    const std::size_t col = detail::column_index(table, name);
    for (const auto &row : table.rows) {
      s.xs.push_back(row[xcol]);
      s.ys.push_back(row[col]);
    }
    chart.series.push_back(std::move(s));
  };
  if (cfg.method == RunMethod::Compare) {
    chart.title = "exact vs approximations";
    chart.y_label = "U_exact / U_approx";
    add("ratio_exact_closed");
    add("ratio_exact_U0");
  } else {
    chart.title = "Casimir-Polder potential";
    chart.y_label = "U 24 pi eps0 r^3 / |d|^2";
    add("U_reduced");
  }
  return chart;
}

inline int exit_code_for(const std::exception_ptr &e, std::ostream &err) {
  try {
    std::rethrow_exception(e);
  } catch (const RegimeError &ex) {
    err << "cp-sphere: regime error: " << ex.what() << '\n';
    return kExitRegime;
  } catch (const ConvergenceError &ex) {
    err << "cp-sphere: convergence failure: " << ex.what() << '\n';
    return kExitConvergence;
  } catch (const ConsistencyError &ex) {
    err << "cp-sphere: consistency check failed: " << ex.what() << '\n';
    return kExitConvergence;
  } catch (const OverflowError &ex) {
    err << "cp-sphere: overflow: " << ex.what() << '\n';
    return kExitConvergence;
  } catch (const ConfigError &ex) {
    err << "cp-sphere: configuration error: " << ex.what() << '\n';
    return kExitConfig;
  } catch (const std::exception &ex) {
    err << "cp-sphere: error: " << ex.what() << '\n';
    return kExitConfig;
  }
}

/// Computes, writes the CSV (to cfg.out or `out`) and the optional SVG, and
/// reports warnings on `err`. Returns the process exit status.
inline int run(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
  try {
    std::vector<std::string> warnings;
    const Table table = compute_table(cfg, warnings);
    for (const auto &w : warnings)
      err << "cp-sphere: warning: " << w << '\n';
    if (cfg.out.empty())
      write_csv(out, table);
    else
      emit_csv(table, cfg.out);
    if (!cfg.plot.empty())
      write_svg(make_chart(cfg, table), cfg.plot);
    return kExitOk;
  } catch (...) {
    return exit_code_for(std::current_exception(), err);
  }
}

} // namespace cpsphere::cli
