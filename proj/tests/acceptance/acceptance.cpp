// Acceptance checks. One PASS/FAIL line per criterion with the measured
// quantity, its tolerance and the runtime against its budget. The exit
// status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "cpsphere/greens.hpp"
#include "cpsphere/mie.hpp"
#include "cpsphere/potential.hpp"
#include "cpsphere/scaling.hpp"

using namespace cpsphere;
using namespace cpsphere::potential;
using complex = std::complex<double>;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char *format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

constexpr double kD2 = constants::debye * constants::debye;
constexpr double kTol = 1e-10;

PermittivityModel gold() {
  return PermittivityModel::drude(constants::ev_to_angular_frequency(9.0),
                                  constants::ev_to_angular_frequency(0.035));
}

const SphereSystem kSys(10e-6, 20e-6);

TransitionSpec at_x(double x, int sign = 1) {
  return {kD2, sign * x * constants::speed_of_light / kSys.distance()};
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

Outcome series_equivalence() {
  double worst = 0.0;
  for (double phi : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) {
    worst = std::max({worst, rel(scaling::series_f(phi), scaling::scaling_f(phi)),
                      rel(scaling::series_g_ret(phi), scaling::scaling_g_ret(phi)),
                      rel(scaling::series_g_refl(phi), scaling::scaling_g_refl(phi))});
  }
  return {worst < 1e-10, fmt("max relative difference %.2e (tol 1e-10)", worst)};
}

Outcome pc_temperature_invariance() {
  const auto pc = PermittivityModel::perfect_conductor();
  const double target = -scaling::scaling_f(0.5);
  double worst = 0.0;
  for (double T : {0.0, 4.0, 77.0, 300.0, 600.0})
    worst = std::max(worst, rel(u_exact(at_x(1e-4), kSys, pc, {T}, kTol).reduced, target));
  return {worst <= 1e-3, fmt("max |U/(-f(0.5)) - 1| = %.2e over T = 0..600 K (tol 1e-3)", worst)};
}

Outcome gold_closed_form() {
  const auto g = gold();
  std::string detail;
  bool pass = true;
  for (double x : {0.1, 0.01, 0.001}) {
    const double exact = u_exact(at_x(x), kSys, g, {300.0}, kTol).total;
    const double closed = u_approx_metal(at_x(x), kSys, g, {300.0}).total;
    const double err = rel(closed, exact);
    pass = pass && err < 0.01;
    detail += fmt("x=%g: %.3f%%  ", x, 100.0 * err);
  }
  return {pass, detail + "(tol 1%)"};
}

Outcome invariant_term_error() {
  const auto g = gold();
  const double u0 = u_invariant(at_x(0.1), kSys);
  const double warm = rel(u0, u_exact(at_x(0.1), kSys, g, {300.0}, kTol).total);
  const double cold = rel(u0, u_exact(at_x(0.1), kSys, g, {0.0}, kTol).total);
  double grid_max = 0.0, grid_at = 0.0;
  for (double T = 0.0; T <= 600.0; T += 50.0) {
    const double dev = rel(u0, u_exact(at_x(0.1), kSys, g, {T}, kTol).total);
    if (dev > grid_max) {
      grid_max = dev;
      grid_at = T;
    }
  }
  const bool pass = warm >= 0.05 && warm <= 0.12 && cold <= 0.06;
  return {pass, fmt("300 K: %.2f%% (want 5..12%%), 0 K: %.2f%% (want <= 6%%); max over T = "
                    "0..600 K step 50: %.2f%% at %.0f K",
                    100.0 * warm, 100.0 * cold, 100.0 * grid_max, grid_at)};
}

Outcome downward_sign_flip() {
  const auto g = gold();
  const double u0 = u_invariant(at_x(0.1), kSys);
  const double up = u_exact(at_x(0.1), kSys, g, {300.0}, kTol).total - u0;
  const double down = u_exact(at_x(0.1, -1), kSys, g, {300.0}, kTol).total - u0;
  return {up * down < 0.0,
          fmt("U - U0: up %.3e, down %.3e (reduced)", reduced(up, at_x(0.1), kSys),
              reduced(down, at_x(0.1), kSys))};
}

Outcome quadratic_retardation() {
  const auto pc = PermittivityModel::perfect_conductor();
  const double g0 = greens::gamma_static(kSys, materials::Permittivity::infinite());
  const double xs[] = {0.05, 0.02, 0.01};
  double ratio[3];
  for (int k = 0; k < 3; ++k) {
    const double w = xs[k] * constants::speed_of_light / kSys.distance();
    const double gw = greens::gamma_trace(kSys, w, pc, 1e-12).value.real();
    ratio[k] = (gw - g0) / greens::delta_gamma_ret(kSys, xs[k]);
  }
  // ratio(x) = 1 + c x^2 + O(x^4): eliminate c from each adjacent pair.
  auto extrapolate = [&](int a, int b) {
    const double a2 = xs[a] * xs[a], b2 = xs[b] * xs[b];
    return (ratio[b] * a2 - ratio[a] * b2) / (a2 - b2);
  };
  const double fine = extrapolate(1, 2), coarse = extrapolate(0, 1);
  const bool pass = std::abs(fine - 1.0) <= 1e-3 && std::abs(coarse - 1.0) <= 1e-3;
  return {pass, fmt("ratios %.6f %.6f %.6f, extrapolated %.8f / %.8f (tol 1 +- 1e-3)", ratio[0],
                    ratio[1], ratio[2], coarse, fine)};
}

Outcome dielectric_series() {
  const auto d = PermittivityModel::constant_dielectric(6.0);
  double worst = 0.0;
  for (double T : {0.0, 100.0, 300.0, 600.0}) {
    const double exact = u_exact(at_x(0.01), kSys, d, {T}, kTol).total;
    worst = std::max(worst, rel(u_approx_dielectric(at_x(0.01), kSys, 6.0, {T}, 1e-12), exact));
  }
  return {worst < 0.01, fmt("max error %.3f%% over T = 0..600 K (tol 1%%)", 100.0 * worst)};
}

Outcome limit_ordering() {
  using mie::Polarization;
  const double z = 1e-4, eps = 1e4;
  double te_worst = 0.0, tm_worst = 0.0;
  for (int l = 1; l <= 10; ++l) {
    // TE: the non-retarded coefficient carries eps z^2 relative to the PC one.
    const complex nonret =
        mie::refl_nonret(l, z, materials::Permittivity::finite(eps), Polarization::TE);
    const complex pc = mie::refl_pc(l, z, Polarization::TE);
    const double predicted = -(eps - 1.0) * z * z / ((2.0 * l + 3.0) * (2.0 * l + 1.0));
    te_worst = std::max(te_worst, std::abs((nonret / pc).real() / predicted - 1.0));
    // TM: eps -> inf after z -> 0 versus the PC coefficient at small z.
    const complex tm_nonret =
        mie::refl_nonret(l, z, materials::Permittivity::finite(1e8), Polarization::TM);
    const complex tm_pc = mie::refl_pc(l, z, Polarization::TM);
    tm_worst = std::max(tm_worst, std::abs(tm_nonret - tm_pc) / std::abs(tm_pc));
  }
  return {te_worst <= 0.05 && tm_worst <= 1e-6,
          fmt("TE ratio vs -(eps-1)z^2/((2l+3)(2l+1)): %.2e (tol 5%%), TM orderings: %.2e "
              "(tol 1e-6), l = 1..10",
              te_worst, tm_worst)};
}

Outcome scaling_ratios() {
  const double small = scaling::scaling_g_ret(0.01) / scaling::scaling_f(0.01);
  double min_ratio = INFINITY, at = 0.0;
  for (int k = 11; k < 990; ++k) {
    const double phi = k * 1e-3;
    const double r = scaling::scaling_g_refl(phi) / scaling::scaling_g_ret(phi);
    if (r < min_ratio) {
      min_ratio = r;
      at = phi;
    }
  }
  const bool first = std::abs(small - 1.0 / 3.0) <= 1e-3;
  const bool second = min_ratio >= 10.0;
  return {first && second,
          fmt("g_ret/f(0.01) = %.6f (1/3 +- 1e-3: %s); min g_refl/g_ret = %.4f at phi = %.3f "
              "(want >= 10: %s)",
              small, first ? "ok" : "no", min_ratio, at, second ? "ok" : "no")};
}

Outcome cross_path() {
  const auto g = gold();
  const double zero = u_zero_temperature(at_x(0.1), kSys, g, kTol);
  const double cold = u_exact(at_x(0.1), kSys, g, {0.5}, kTol).total;
  const double agree = rel(cold, zero);

  const double xs[] = {0.1, 0.05, 0.02};
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::string residuals;
  for (double x : xs) {
    const double s = u_spectroscopic(at_x(x), kSys, g, {300.0}, 1e-12).energy;
    const double c = u_approx_metal(at_x(x), kSys, g, {300.0}).total;
    const double res = std::abs(reduced(s - c, at_x(x), kSys));
    residuals += fmt("%.2e ", res);
    const double lx = std::log(x), ly = std::log(res);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = 3.0;
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const bool pass = agree <= 1e-3 && std::abs(slope - 3.0) <= 0.5;
  return {pass, fmt("T=0 vs 0.5 K: %.2e (tol 1e-3); residuals %slog-log slope %.3f (3 +- 0.5)",
                    agree, residuals.c_str(), slope)};
}

struct Criterion {
  int id;
  const char *name;
  double budget_s;
  std::function<Outcome()> run;
};

} // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "series and closed forms agree", 1.0, series_equivalence},
      {2, "non-retarded PC potential is T-invariant", 10.0, pc_temperature_invariance},
      {3, "gold closed form within 1%", 30.0, gold_closed_form},
      {4, "T-invariant term error bounds", 30.0, invariant_term_error},
      {5, "downward transition flips U - U0", 30.0, downward_sign_flip},
      {6, "retardation correction is quadratic", 5.0, quadratic_retardation},
      {7, "dielectric series within 1%", 30.0, dielectric_series},
      {8, "limit ordering of Mie coefficients", 1.0, limit_ordering},
      {9, "scaling-function ratios", 1.0, scaling_ratios},
      {10, "cross-path consistency", 60.0, cross_path},
  };
  int failures = 0;
  for (const auto &c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception &e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = out.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("%s %2d %s: %s [%.3f s, budget %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id,
                c.name, out.detail.c_str(), secs, c.budget_s, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures;
}
