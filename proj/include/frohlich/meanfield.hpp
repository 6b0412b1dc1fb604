#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "frohlich/kernels.hpp"
#include "frohlich/ode.hpp"
#include "frohlich/params.hpp"
#include "frohlich/series.hpp"

namespace frohlich::meanfield {

struct MeanFieldState {
  std::vector<double> n;  ///< occupations of modes 0..D (n[0] is the lowest mode)
  double time_ns = 0.0;

  double n0() const { return n.front(); }
};

enum class Branch { below_threshold, above_threshold };
std::string_view to_string(Branch b) noexcept;

struct SteadyStateReport {
  double n0_mean = 0.0;
  double condensate_fraction = 0.0;
  Branch branch = Branch::below_threshold;
  int iterations = 0;
  std::string_view method;
};

/// Second-moment closure of the lowest-mode rate equation.
enum class Closure {
  factorized,  ///< <n0^2> ~ <n0>^2
  exact,       ///< caller supplies <n0^2>
};
Closure parse_closure(std::string_view label);

/// Relaxation of the total phonon number, dN/dt = (D+1)(r + phi nbar) - phi N,
/// integrated numerically on `t_grid`.
TimeSeries total_number_evolution(const ModelParams& p, double N0, std::span<const double> t_grid,
                                  const ode::Options& opts = {});

/// Closed form of the same law, used as a check.
double total_number_closed_form(const ModelParams& p, double N0, double t_ns);

/// d<n0>/dt = a (r - rc) <n0> - chi <n0^2> + b (r + phi nbar), in GHz.
double n0_rate_rhs(const ModelParams& p, double n0, Closure closure = Closure::factorized,
                   std::optional<double> second_moment = std::nullopt);

/// Non-negative root of the factorized rate equation.
SteadyStateReport meanfield_steady_n0(const ModelParams& p);

/// <n0> = [r + phi nbar + chi (nbar+1) Ne] / [phi - chi (Ne - D nbar)].
/// Throws DomainError when Ne reaches the bound phi/chi + D nbar.
double formal_n0_from_Ne(const ModelParams& p, double Ne);

/// Coefficients of the decorrelated multimode equations for `p`. Throws
/// UsageError for a linear spectrum at zero bath temperature.
kernels::MultimodeCoefficients multimode_coefficients(const ModelParams& p);

/// d<n_l>/dt for l = 0..D.
std::vector<double> froehlich_multimode_rhs(const ModelParams& p, const MeanFieldState& state);

/// Thermal occupations n_l = nbar_{omega_l}.
MeanFieldState thermal_state(const ModelParams& p);

struct RelaxOptions {
  double rhs_tolerance = 1e-8;  ///< GHz; see `relax_to_steady_state`
  double t_max_ns = 1e4;
  // tighter than the trajectory default: explicit steps at the stability
  // limit leave an rhs noise floor proportional to rtol
  ode::Options ode{.rtol = 1e-12, .atol = 1e-12};
};

struct RelaxResult {
  MeanFieldState state;
  double max_abs_rhs = 0.0;
  double tolerance_used = 0.0;
  std::size_t steps = 0;
};

/// Integrates the multimode equations from `initial` until max|rhs| drops
/// below the tolerance. The tolerance is floored at 1e-15 times the largest
/// absolute sum of rate terms in any row, below which rounding dominates.
RelaxResult relax_to_steady_state(const ModelParams& p, MeanFieldState initial,
                                  const RelaxOptions& opts = {});

/// Multimode trajectory sampled on `t_grid`; `keep_modes` stores n_1..n_D.
TimeSeries evolve_multimode(const ModelParams& p, MeanFieldState initial,
                            std::span<const double> t_grid, bool keep_modes,
                            const ode::Options& opts = {});

struct CriticalScan {
  double exponent = 0.0;  ///< log-log slope of n0 - n0(rc) against r - rc
  double F0 = 0.0;        ///< n0 at rc
  double F1 = 0.0;        ///< slope of the linear fit
  double intercept = 0.0;
  double residual = 0.0;  ///< rms residual of the linear fit
  std::vector<double> r;
  std::vector<double> n0;
};

/// Fits <n0> ~ F0 + F1 (r - rc) over the upper half of [r_lo, r_hi].
CriticalScan critical_exponent_scan(const ModelParams& p, double r_lo, double r_hi,
                                    int points = 41);

}  // namespace frohlich::meanfield
