#include "frohlich/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "frohlich/error.hpp"

namespace frohlich::distribution {

std::string_view to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::analytic_recursion: return "analytic-recursion";
    case Provenance::closed_form: return "closed-form";
    case Provenance::ode_steady: return "ode-steady";
    case Provenance::ssa_histogram: return "ssa-histogram";
  }
  return "unknown";
}

namespace {

constexpr double kTailTarget = 1e-14;

double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

}  // namespace

PhononDistribution steady_distribution(const ModelParams& p) {
  const DerivedRates d = derive_rates(p);
  const int n_floor = static_cast<int>(std::ceil(d.N));

  std::vector<double> logp{0.0};
  double lse = 0.0;
  double tail = 0.0;
  for (int n = 1;; ++n) {
    const double num = d.X - d.alpha * n;
    if (num <= 0.0) {  // n >= X/alpha: the chain cannot climb further
      tail = 0.0;
      break;
    }
    const double ratio = num / (d.Y - d.beta * n);
    if (n > n_floor) {
      // bound for stopping at n - 1: ratios decrease, so the tail is geometric at most
      const double pm = std::exp(logp.back() - lse);
      tail = ratio < 1.0 ? pm * ratio / (1.0 - ratio) : std::numeric_limits<double>::infinity();
      if (tail < kTailTarget) break;
    }
    logp.push_back(logp.back() + std::log(ratio));
    lse = log_add(lse, logp.back());
  }

  PhononDistribution dist;
  dist.probs.resize(logp.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logp.size(); ++i) sum += dist.probs[i] = std::exp(logp[i] - lse);
  for (double& v : dist.probs) v /= sum;
  dist.n_max = static_cast<int>(logp.size()) - 1;
  dist.provenance = Provenance::analytic_recursion;
  dist.tail_mass_bound = tail;
  return dist;
}

PhononDistribution from_weights(std::vector<double> weights, Provenance provenance) {
  if (weights.empty()) throw UsageError("distribution needs at least one entry");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw UsageError("weights must be finite and >= 0");
    sum += w;
  }
  if (sum <= 0.0) throw UsageError("weights sum to zero");
  for (double& w : weights) w /= sum;
  PhononDistribution dist;
  dist.probs = std::move(weights);
  dist.n_max = static_cast<int>(dist.probs.size()) - 1;
  dist.provenance = provenance;
  return dist;
}

double closed_form_log_ratio(const ModelParams& p, int n0) {
  const DerivedRates d = derive_rates(p);
  if (d.beta <= 0.0)
    throw DomainError("closed form divides by beta; use steady_distribution for nbar = 0");
  if (n0 < 0) throw UsageError("n0 must be >= 0");
  const double xa = d.X / d.alpha;
  const double yb = d.Y / d.beta;
  if (!(xa - n0 > 0.0)) throw DomainError("n0 lies beyond the support X/alpha");
  return n0 * std::log(d.alpha / d.beta) + std::lgamma(xa) + std::lgamma(yb - n0) -
         std::lgamma(xa - n0) - std::lgamma(yb);
}

double closed_form_ratio(const ModelParams& p, int n0) {
  return std::exp(closed_form_log_ratio(p, n0));
}

StatisticsReport statistics(const PhononDistribution& dist, const DerivedRates& rates) {
  StatisticsReport s;
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t n = 0; n < dist.probs.size(); ++n) {
    const double x = static_cast<double>(n);
    m1 += x * dist.probs[n];
    m2 += x * x * dist.probs[n];
  }
  double var = 0.0;
  for (std::size_t n = 0; n < dist.probs.size(); ++n) {
    const double e = static_cast<double>(n) - m1;
    var += e * e * dist.probs[n];
  }
  s.mean = m1;
  s.second_moment = m2;
  s.variance = var;
  s.mandel_q = m1 > 0.0 ? var / m1 - 1.0 : 0.0;
  s.condensate_fraction = rates.N > 0.0 ? m1 / rates.N : 0.0;
  if (rates.alpha > rates.beta) {
    const double chi = rates.alpha - rates.beta;
    // X - Y - alpha = chi (N - nbar D) - phi
    s.n_cr = (rates.X - rates.Y - rates.alpha) / chi + 1.0;
    s.peak = (rates.X - rates.Y) / chi;
  } else {
    s.n_cr = -std::numeric_limits<double>::infinity();
    s.peak = -std::numeric_limits<double>::infinity();
  }
  return s;
}

BoundaryMoments boundary_moments(const ModelParams& p, const PhononDistribution& dist) {
  const DerivedRates d = derive_rates(p);
  if (!(d.alpha > d.beta)) throw DomainError("moment identities need chi > 0");
  const double M = dist.n_max;
  const double P0 = dist.probs.front();
  const double PM = dist.probs.back();
  const double ab = d.alpha - d.beta;
  BoundaryMoments m;
  m.mean = (d.X - d.alpha - d.Y * (1.0 - P0) - PM * (d.X - d.alpha * (M + 1.0))) / ab;
  m.second_moment = ((d.X - d.Y - 2.0 * d.alpha) * m.mean + d.X - d.alpha -
                     (M + 1.0) * PM * (d.X - d.alpha * (M + 1.0))) /
                    ab;
  return m;
}

AsymptoticStatistics asymptotic_statistics(const ModelParams& p) {
  const DerivedRates d = derive_rates(p);
  if (!(d.alpha > d.beta)) throw DomainError("asymptotic statistics need alpha > beta (chi > 0)");
  const double ab = d.alpha - d.beta;
  const double excess = d.X - d.Y - d.alpha;
  AsymptoticStatistics a;
  a.mean = excess / ab;
  a.mandel_q = d.Y / excess - d.alpha / ab;
  const double D1 = p.D + 1.0;
  const double pump = p.r + p.phi * p.nbar;
  const double loss = p.phi + p.chi * p.nbar * p.D;
  a.eta = 1.0 - p.phi * loss / (p.chi * D1 * pump);
  a.mandel_q_explicit = (pump * (p.phi - p.chi * D1) + p.phi * (p.nbar + 2.0) * loss) /
                        (p.chi * D1 * p.r + p.phi * (p.chi * p.nbar - p.phi));
  return a;
}

double sub_poissonian_threshold_closed_form(const ModelParams& p) {
  p.validate();
  if (p.chi == 0.0 || p.chi * p.D <= p.phi)
    throw DomainError("no sub-Poissonian threshold: requires chi D > phi");
  const double denom = p.D / p.phi - 1.0 / p.chi;
  return (p.nbar + 1.0) * (2.0 * p.phi / p.chi + p.nbar * p.D) / denom;
}

double sub_poissonian_threshold_numeric(const ModelParams& p, double r_lo, double r_hi,
                                        double tolerance_ghz) {
  if (p.chi == 0.0 || p.chi * p.D <= p.phi)
    throw DomainError("no sub-Poissonian threshold: requires chi D > phi");
  if (!(r_lo >= 0.0 && r_hi > r_lo && tolerance_ghz > 0.0))
    throw UsageError("threshold bracket must satisfy 0 <= r_lo < r_hi");
  ModelParams q = p;
  auto mandel = [&](double r) {
    q.r = r;
    return statistics(steady_distribution(q), derive_rates(q)).mandel_q;
  };
  if (!(mandel(r_lo) > 0.0 && mandel(r_hi) < 0.0))
    throw UsageError("bracket does not contain a sign change of Q(r)");
  double lo = r_lo, hi = r_hi;
  while (hi - lo > tolerance_ghz) {
    const double mid = 0.5 * (lo + hi);
    (mandel(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double total_variation(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = std::max(a.size(), b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = i < a.size() ? a[i] : 0.0;
    const double y = i < b.size() ? b[i] : 0.0;
    s += std::abs(x - y);
  }
  return 0.5 * s;
}

}  // namespace frohlich::distribution
