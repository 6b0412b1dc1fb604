#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "frohlich/params.hpp"

namespace frohlich::distribution {

enum class Provenance { analytic_recursion, closed_form, ode_steady, ssa_histogram };
std::string_view to_string(Provenance p) noexcept;

/// Probability of n0 = 0..n_max for the lowest mode.
struct PhononDistribution {
  std::vector<double> probs;
  int n_max = 0;
  Provenance provenance = Provenance::analytic_recursion;
  double tail_mass_bound = 0.0;  ///< bound on the probability beyond n_max
};

struct StatisticsReport {
  double mean = 0.0;
  double second_moment = 0.0;
  double variance = 0.0;
  double mandel_q = 0.0;
  double condensate_fraction = 0.0;
  double n_cr = 0.0;  ///< N + 1 - phi/chi - nbar D; -inf when chi == 0
  double peak = 0.0;  ///< (X - Y) / chi, where the ratio P(n)/P(n-1) crosses 1
};

/// Detailed-balance distribution from the ratio recursion
///   P(n) / P(n-1) = (X - alpha n) / (Y - beta n)
/// accumulated in log space. The support starts at ceil(N) and is extended
/// while the geometric tail bound exceeds 1e-14 and the up-rate is positive.
PhononDistribution steady_distribution(const ModelParams& p);

/// Wraps a non-negative vector, normalizing it.
PhononDistribution from_weights(std::vector<double> weights, Provenance provenance);

/// log(P(n0)/P(0)) from the log-gamma closed form. DomainError when beta == 0.
double closed_form_log_ratio(const ModelParams& p, int n0);
double closed_form_ratio(const ModelParams& p, int n0);

StatisticsReport statistics(const PhononDistribution& dist, const DerivedRates& rates);

/// Mean and second moment from the first two moment identities of the
/// recursion, written with the P(0) and P(n_max) boundary terms.
struct BoundaryMoments {
  double mean = 0.0;
  double second_moment = 0.0;
};
BoundaryMoments boundary_moments(const ModelParams& p, const PhononDistribution& dist);

/// Far-above-threshold limit with P(0) -> 0.
struct AsymptoticStatistics {
  double mean = 0.0;          ///< (X - Y - alpha) / (alpha - beta)
  double mandel_q = 0.0;      ///< Y / (X - Y - alpha) - alpha / (alpha - beta)
  double mandel_q_explicit = 0.0;  ///< same quantity written in r, phi, chi, D, nbar
  double eta = 0.0;           ///< condensate fraction
};
AsymptoticStatistics asymptotic_statistics(const ModelParams& p);

/// r >= (nbar+1)(2 phi/chi + nbar D) / (D/phi - 1/chi). DomainError when
/// chi D <= phi (no sub-Poissonian regime).
double sub_poissonian_threshold_closed_form(const ModelParams& p);

/// Root of Q(r) = 0 for the full distribution, by bisection on [r_lo, r_hi].
double sub_poissonian_threshold_numeric(const ModelParams& p, double r_lo, double r_hi,
                                        double tolerance_ghz = 0.05);

/// Half the L1 distance; the shorter vector is padded with zeros.
double total_variation(std::span<const double> a, std::span<const double> b);

}  // namespace frohlich::distribution
