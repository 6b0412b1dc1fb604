#include "frohlich/masterq.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "frohlich/distribution.hpp"
#include "frohlich/error.hpp"
#include "frohlich/fit.hpp"
#include "frohlich/kernels.hpp"
#include "frohlich/meanfield.hpp"

namespace frohlich::masterq {

ode::Tridiagonal BirthDeathGenerator::tridiagonal() const {
  const std::size_t n = size();
  ode::Tridiagonal A;
  A.lower.assign(n, 0.0);
  A.diag.assign(n, 0.0);
  A.upper.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double out_up = k + 1 < n ? up[k] : 0.0;
    const double out_down = k > 0 ? down[k] : 0.0;
    A.diag[k] = -(out_up + out_down);
    if (k > 0) A.lower[k] = up[k - 1];
    if (k + 1 < n) A.upper[k] = down[k + 1];
  }
  return A;
}

int default_truncation(const ModelParams& p) {
  const DerivedRates d = derive_rates(p);
  double n = std::ceil(d.N) + std::ceil(6.0 * std::sqrt(d.N));
  if (d.alpha > 0.0) n = std::min(n, std::ceil(d.X / d.alpha) - 1.0);
  const int analytic = distribution::steady_distribution(p).n_max;
  return std::max(static_cast<int>(n), analytic);
}

BirthDeathGenerator build_generator(const ModelParams& p, std::optional<int> n_max) {
  const DerivedRates d = derive_rates(p);
  BirthDeathGenerator g;
  g.n_max = n_max ? *n_max : default_truncation(p);
  if (g.n_max < 1) throw UsageError("generator truncation must be >= 1");
  const std::size_t n = static_cast<std::size_t>(g.n_max) + 1;
  g.up.resize(n);
  g.down.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double x = static_cast<double>(k);
    const double up = (x + 1.0) * (p.r + p.phi * p.nbar + p.chi * (p.nbar + 1.0) * (d.N - x));
    const double down = x * (p.r + p.phi * (p.nbar + 1.0) + p.chi * p.nbar * (d.N - x + p.D));
    g.up[k] = std::max(up, 0.0);
    g.down[k] = std::max(down, 0.0);
  }
  g.up.back() = 0.0;
  return g;
}

std::vector<double> stationary_vector(const BirthDeathGenerator& gen) {
  const auto n = static_cast<Eigen::Index>(gen.size());
  if (n > 5000) throw UsageError("dense null-space solve is limited to 5000 states");
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double out_up = k + 1 < n ? gen.up[k] : 0.0;
    const double out_down = k > 0 ? gen.down[k] : 0.0;
    Q(k, k) = -(out_up + out_down);
    if (k + 1 < n) Q(k + 1, k) = out_up;
    if (k > 0) Q(k - 1, k) = out_down;
  }
  // replace one balance equation by the normalization
  Q.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(n - 1) = 1.0;
  const Eigen::VectorXd x = Q.partialPivLu().solve(rhs);
  return {x.data(), x.data() + n};
}

double stationarity_residual(const BirthDeathGenerator& gen, std::span<const double> probs) {
  if (probs.size() != gen.size()) throw UsageError("probability vector does not match generator");
  std::vector<double> out(probs.size());
  kernels::birth_death_apply_serial(gen.up, gen.down, probs, out);
  double worst = 0.0;
  for (double v : out) worst = std::max(worst, std::abs(v));
  return worst;
}

Integrator parse_integrator(std::string_view label) {
  if (label == "dopri5") return Integrator::dopri5;
  if (label == "trbdf2") return Integrator::trbdf2;
  throw UsageError("unknown integrator '" + std::string(label) + "' (expected dopri5|trbdf2)");
}

double moment_identity_residual(const ModelParams& p, double mean, double second_moment,
                                double dmean_dt) {
  const DerivedRates d = derive_rates(p);
  const double t1 = d.gain * mean;
  const double t2 = p.chi * second_moment;
  const double t3 = d.b * (p.r + p.phi * p.nbar);
  const double scale = std::max({std::abs(t1), std::abs(t2), std::abs(t3), std::abs(dmean_dt)});
  return std::abs(dmean_dt - (t1 - t2 + t3)) / scale;
}

PopulationTrajectory evolve_population(const ModelParams& p, const BirthDeathGenerator& gen,
                                       std::vector<double> P0, std::span<const double> t_grid,
                                       const PopulationOptions& opts) {
  if (P0.size() != gen.size()) throw UsageError("P0 size does not match the generator");
  double total = 0.0;
  for (double v : P0) {
    if (!(v >= 0.0)) throw UsageError("P0 entries must be >= 0");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) throw UsageError("P0 is not normalized");
  check_time_grid(t_grid);

  PopulationTrajectory out;
  std::vector<double> flow(P0.size());
  auto record = [&](double t, const std::vector<double>& P) {
    double s = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t k = 0; k < P.size(); ++k) {
      const double x = static_cast<double>(k);
      s += P[k];
      m1 += x * P[k];
      m2 += x * x * P[k];
    }
    kernels::birth_death_apply_parallel(gen.up, gen.down, P, flow);
    double dm = 0.0;
    for (std::size_t k = 0; k < P.size(); ++k) dm += static_cast<double>(k) * flow[k];
    out.series.t_ns.push_back(t);
    out.series.n0.push_back(m1);
    out.second_moment.push_back(m2);
    out.probability_sum.push_back(s);
    out.moment_residual.push_back(moment_identity_residual(p, m1, m2, dm));
    out.max_boundary_mass = std::max(out.max_boundary_mass, P.back());
    out.max_norm_error = std::max(out.max_norm_error, std::abs(s - 1.0));
  };
  auto norm_check = [&](std::span<const double> P) {
    double s = 0.0;
    for (double v : P) s += v;
    out.max_norm_error = std::max(out.max_norm_error, std::abs(s - 1.0));
  };

  std::vector<double> P = std::move(P0);
  double t = 0.0;
  if (opts.integrator == Integrator::dopri5) {
    ode::Dopri5 solver(
        [&](double, std::span<const double> y, std::span<double> dy) {
          kernels::birth_death_apply_parallel(gen.up, gen.down, y, dy);
        },
        opts.ode);
    for (double tk : t_grid) {
      if (tk > t)
        solver.advance(t, P, tk, [&](double, std::span<const double> y, std::span<const double>) {
          norm_check(y);
        });
      record(tk, P);
    }
  } else {
    if (opts.trbdf2_substeps < 1) throw UsageError("trbdf2_substeps must be >= 1");
    const ode::Tridiagonal A = gen.tridiagonal();
    ode::TridiagTrBdf2<double> stepper(A);
    for (double tk : t_grid) {
      if (tk > t) {
        const double h = (tk - t) / opts.trbdf2_substeps;
        for (int s = 0; s < opts.trbdf2_substeps; ++s) {
          stepper.step(P, h);
          norm_check(P);
        }
        t = tk;
      }
      record(tk, P);
    }
  }
  out.final_probs = std::move(P);
  return out;
}

CoherenceCoefficients coherence_coefficients(const ModelParams& p, double n0) {
  if (!(n0 >= 0.0)) throw UsageError("n0 must be >= 0");
  const double N = derive_rates(p).N;
  const double A = p.r + p.phi * (p.nbar + 1.0) + p.chi * p.nbar * (N - n0 + p.D);
  const double B = p.r + p.phi * p.nbar + p.chi * (p.nbar + 1.0) * (N - n0);
  const double s0 = std::sqrt(n0 * (n0 + 1.0));
  const double s1 = std::sqrt((n0 + 1.0) * (n0 + 2.0));
  CoherenceCoefficients c;
  c.gamma = A / (4.0 * (s0 + n0) + 2.0) + B / (4.0 * (s1 + n0) + 6.0);
  c.c = s1 * B;
  c.d = s0 * A;
  return c;
}

CoherenceState detailed_balance_coherence(const ModelParams& p) {
  // prod_{m<=n} c_{m-1}/d_m collapses to the population ratio (X - alpha m)/(Y - beta m)
  CoherenceState s;
  s.amps = distribution::steady_distribution(p).probs;
  return s;
}

std::vector<double> coherence_window(const ModelParams& p, int samples) {
  if (samples < 2) throw UsageError("coherence window needs at least 2 samples");
  const auto dist = distribution::steady_distribution(p);
  const double mean = distribution::statistics(dist, derive_rates(p)).mean;
  const double gamma = coherence_coefficients(p, mean).gamma;
  std::vector<double> grid(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) grid[i] = 2.0 / gamma * i / (samples - 1);
  return grid;
}

CoherenceResult evolve_coherence(const ModelParams& p, const CoherenceState& initial,
                                 std::span<const double> t_grid, int substeps) {
  const std::size_t n = initial.amps.size();
  if (n == 0) throw UsageError("coherence state is empty");
  if (substeps < 1) throw UsageError("substeps must be >= 1");
  check_time_grid(t_grid);

  std::vector<double> gamma(n), c(n), d(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto co = coherence_coefficients(p, static_cast<double>(k));
    gamma[k] = co.gamma;
    c[k] = std::max(co.c, 0.0);
    d[k] = std::max(co.d, 0.0);
  }
  c[n - 1] = 0.0;

  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double lhs = c[k] * initial.amps[k];
    const double rhs = d[k + 1] * initial.amps[k + 1];
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    if (scale > 1e-300 && std::abs(lhs - rhs) > 1e-6 * scale)
      throw UsageError("initial coherence violates detailed balance at n = " + std::to_string(k));
  }

  ode::Tridiagonal A;
  A.lower.assign(n, 0.0);
  A.diag.assign(n, 0.0);
  A.upper.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    A.diag[k] = -(gamma[k] + c[k] + d[k]);
    if (k > 0) A.lower[k] = c[k - 1];
    if (k + 1 < n) A.upper[k] = d[k + 1];
  }

  CoherenceResult res;
  const auto dist = distribution::steady_distribution(p);
  res.gamma_reference =
      coherence_coefficients(p, distribution::statistics(dist, derive_rates(p)).mean).gamma;

  ode::TridiagTrBdf2<double> stepper(A);
  std::vector<double> rho = initial.amps;
  double t = 0.0;
  auto magnitude = [&] {
    double s = 0.0;
    for (double v : rho) s += std::abs(v);
    return s;
  };
  for (double tk : t_grid) {
    if (tk > t) {
      const double h = (tk - t) / substeps;
      for (int s = 0; s < substeps; ++s) stepper.step(rho, h);
      t = tk;
    }
    res.series.t_ns.push_back(tk);
    res.series.coherence.push_back(magnitude());
  }

  // the decay ansatz is asymptotic: drop the first 5% of samples
  const std::size_t skip = static_cast<std::size_t>(std::ceil(0.05 * t_grid.size()));
  std::vector<double> x, y;
  for (std::size_t i = skip; i < res.series.size(); ++i) {
    if (res.series.coherence[i] > 0.0) {
      x.push_back(res.series.t_ns[i]);
      y.push_back(std::log(res.series.coherence[i]));
    }
  }
  res.gamma_fit = x.size() >= 2 ? -least_squares(x, y).slope
                                : std::numeric_limits<double>::quiet_NaN();
  return res;
}

std::string_view to_string(OccupationSource s) noexcept {
  return s == OccupationSource::meanfield ? "meanfield" : "distribution";
}

OccupationSource parse_occupation_source(std::string_view label) {
  if (label == "meanfield") return OccupationSource::meanfield;
  if (label == "distribution") return OccupationSource::distribution;
  throw UsageError("unknown n0 source '" + std::string(label) + "' (expected meanfield|distribution)");
}

LinewidthReport linewidth(const ModelParams& p, double sound_speed_m_s, OccupationSource source) {
  if (!(sound_speed_m_s > 0.0)) throw UsageError("sound speed must be > 0");
  LinewidthReport rep;
  rep.source = source;
  rep.n0_used = source == OccupationSource::meanfield
                    ? meanfield::meanfield_steady_n0(p).n0_mean
                    : distribution::statistics(distribution::steady_distribution(p),
                                               derive_rates(p))
                          .mean;
  if (!(rep.n0_used > 0.0)) throw DomainError("linewidth is undefined for <n0> = 0");
  rep.gamma_full = coherence_coefficients(p, rep.n0_used).gamma;
  rep.gamma_approx = (p.r + p.phi * (p.nbar + 0.5)) / (4.0 * rep.n0_used);
  rep.lifetime_ns = 1.0 / rep.gamma_full;
  rep.coherence_length_m = sound_speed_m_s / (rep.gamma_full * 1e9);
  return rep;
}

}  // namespace frohlich::masterq
