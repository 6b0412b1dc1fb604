#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "frohlich/ode.hpp"
#include "frohlich/params.hpp"
#include "frohlich/series.hpp"

namespace frohlich::masterq {

/// Single-mode population generator on 0..n_max.
///   up[n]   = (n+1) [r + phi nbar + chi (nbar+1)(N - n)]
///   down[n] = n [r + phi (nbar+1) + chi nbar (N - n + D)]
/// Both are clamped at zero; up[n_max] is zero (reflecting top).
struct BirthDeathGenerator {
  std::vector<double> up;
  std::vector<double> down;
  int n_max = 0;

  std::size_t size() const { return up.size(); }
  ode::Tridiagonal tridiagonal() const;
};

/// ceil(N) + ceil(6 sqrt(N)), but never past the state where the up-rate
/// vanishes, and never below the support of the analytic distribution.
int default_truncation(const ModelParams& p);

BirthDeathGenerator build_generator(const ModelParams& p, std::optional<int> n_max = std::nullopt);

/// Null vector of the generator by dense LU (Eigen); meant for small chains.
std::vector<double> stationary_vector(const BirthDeathGenerator& gen);

/// L-infinity norm of G P.
double stationarity_residual(const BirthDeathGenerator& gen, std::span<const double> probs);

enum class Integrator { dopri5, trbdf2 };
Integrator parse_integrator(std::string_view label);

struct PopulationOptions {
  Integrator integrator = Integrator::dopri5;
  ode::Options ode;
  int trbdf2_substeps = 20;  ///< fixed steps per output interval
};

struct PopulationTrajectory {
  TimeSeries series;                      ///< t_ns and n0 (= <n0>)
  std::vector<double> second_moment;      ///< <n0^2> per sample
  std::vector<double> probability_sum;    ///< sum P per sample
  std::vector<double> moment_residual;    ///< relative residual of the first-moment law
  std::vector<double> final_probs;
  double max_norm_error = 0.0;            ///< max |sum P - 1| over accepted steps
  double max_boundary_mass = 0.0;         ///< max P(n_max) over samples
};

/// Integrates dP/dt = G P from P0 (which must sum to 1 within 1e-9) on t_grid.
PopulationTrajectory evolve_population(const ModelParams& p, const BirthDeathGenerator& gen,
                                       std::vector<double> P0, std::span<const double> t_grid,
                                       const PopulationOptions& opts = {});

/// |d<n>/dt - [a (r - rc) <n> - chi <n^2> + b (r + phi nbar)]| relative to the
/// largest term.
double moment_identity_residual(const ModelParams& p, double mean, double second_moment,
                                double dmean_dt);

struct CoherenceCoefficients {
  double gamma = 0.0;
  double c = 0.0;
  double d = 0.0;
};

/// gamma_n, c_n, d_n at (real) occupation n0 >= 0.
CoherenceCoefficients coherence_coefficients(const ModelParams& p, double n0);

/// First superdiagonal rho_{n,n+1}, n = 0..size-1, in the frame rotating at omega_0.
struct CoherenceState {
  std::vector<double> amps;
  double time_ns = 0.0;
};

/// Profile with c_n rho_n = d_{n+1} rho_{n+1}, normalized to unit sum.
CoherenceState detailed_balance_coherence(const ModelParams& p);

struct CoherenceResult {
  TimeSeries series;          ///< t_ns and coherence = sum |rho_{n,n+1}|
  double gamma_fit = 0.0;     ///< GHz; NaN when the trajectory is identically zero
  double gamma_reference = 0.0;  ///< gamma at the distribution mean
};

/// TR-BDF2 integration of the coherence recurrence. UsageError when `initial`
/// violates detailed balance by more than 1e-6 relative.
CoherenceResult evolve_coherence(const ModelParams& p, const CoherenceState& initial,
                                 std::span<const double> t_grid, int substeps = 8);

/// Default window [0, 2/gamma] with `samples` points.
std::vector<double> coherence_window(const ModelParams& p, int samples = 200);

enum class OccupationSource { meanfield, distribution };
std::string_view to_string(OccupationSource s) noexcept;
OccupationSource parse_occupation_source(std::string_view label);

struct LinewidthReport {
  double gamma_full = 0.0;    ///< GHz
  double gamma_approx = 0.0;  ///< (r + phi (nbar + 1/2)) / (4 <n0>)
  double lifetime_ns = 0.0;   ///< 1 / gamma_full
  double coherence_length_m = 0.0;
  double n0_used = 0.0;
  OccupationSource source = OccupationSource::meanfield;
};

LinewidthReport linewidth(const ModelParams& p, double sound_speed_m_s = 1500.0,
                          OccupationSource source = OccupationSource::meanfield);

}  // namespace frohlich::masterq
