#include "frohlich/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "frohlich/error.hpp"
#include "frohlich/fit.hpp"

namespace frohlich::meanfield {

std::string_view to_string(Branch b) noexcept {
  return b == Branch::above_threshold ? "above-threshold" : "below-threshold";
}

Closure parse_closure(std::string_view label) {
  if (label == "factorized") return Closure::factorized;
  if (label == "exact") return Closure::exact;
  throw UsageError("unknown closure '" + std::string(label) + "' (expected factorized|exact)");
}

double total_number_closed_form(const ModelParams& p, double N0, double t_ns) {
  const double N_inf = derive_rates(p).N;
  return N_inf + (N0 - N_inf) * std::exp(-p.phi * t_ns);
}

TimeSeries total_number_evolution(const ModelParams& p, double N0, std::span<const double> t_grid,
                                  const ode::Options& opts) {
  p.validate();
  if (!(N0 >= 0.0)) throw UsageError("initial total number must be >= 0");
  check_time_grid(t_grid);
  const double source = (p.D + 1.0) * (p.r + p.phi * p.nbar);
  ode::Dopri5 solver(
      [&](double, std::span<const double> y, std::span<double> dy) {
        dy[0] = source - p.phi * y[0];
      },
      opts);
  TimeSeries out;
  ode::State y{N0};
  double t = 0.0;
  for (double tk : t_grid) {
    if (tk > t) solver.advance(t, y, tk);
    out.t_ns.push_back(tk);
    out.total.push_back(y[0]);
  }
  return out;
}

double n0_rate_rhs(const ModelParams& p, double n0, Closure closure,
                   std::optional<double> second_moment) {
  if (!(n0 >= 0.0)) throw UsageError("n0 must be >= 0");
  const DerivedRates d = derive_rates(p);
  double m2 = n0 * n0;
  if (closure == Closure::exact) {
    if (!second_moment) throw UsageError("exact closure needs the second moment");
    m2 = *second_moment;
  }
  return d.gain * n0 - p.chi * m2 + d.b * (p.r + p.phi * p.nbar);
}

SteadyStateReport meanfield_steady_n0(const ModelParams& p) {
  const DerivedRates d = derive_rates(p);
  const double G = d.gain;
  const double C = d.b * (p.r + p.phi * p.nbar);
  double n0 = 0.0;
  if (p.chi == 0.0) {
    n0 = C / -G;  // G == -phi < 0
  } else {
    const double disc = std::sqrt(G * G + 4.0 * p.chi * C);
    // choose the form without cancellation
    n0 = G >= 0.0 ? (G + disc) / (2.0 * p.chi) : (disc > -G ? 2.0 * C / (disc - G) : 0.0);
  }
  SteadyStateReport rep;
  rep.n0_mean = n0;
  rep.condensate_fraction = d.N > 0.0 ? n0 / d.N : 0.0;
  rep.branch = p.r > d.rc ? Branch::above_threshold : Branch::below_threshold;
  rep.method = "quadratic-root";
  return rep;
}

double formal_n0_from_Ne(const ModelParams& p, double Ne) {
  p.validate();
  if (!(Ne >= 0.0)) throw UsageError("Ne must be >= 0");
  const double denom = p.phi - p.chi * (Ne - p.D * p.nbar);
  if (denom <= 0.0)
    throw DomainError("Ne reaches the upper bound phi/chi + D nbar; <n0> has no positive solution");
  return (p.r + p.phi * p.nbar + p.chi * (p.nbar + 1.0) * Ne) / denom;
}

kernels::MultimodeCoefficients multimode_coefficients(const ModelParams& p) {
  p.validate();
  kernels::MultimodeCoefficients c;
  const std::size_t m = static_cast<std::size_t>(p.D) + 1;
  c.r = p.r;
  c.phi = p.phi;
  if (p.spectrum.kind == SpectrumKind::flat) {
    c.nbar_mode.assign(m, p.nbar);
    c.boltz.assign(m, 1.0);
    c.gain_above = p.chi * (p.nbar + 1.0);
    c.loss_above = p.chi * p.nbar;
    c.gain_below = p.chi * p.nbar;
    c.loss_below = p.chi * (p.nbar + 1.0);
    return c;
  }
  const double T = bath_temperature(p);
  if (!(T > 0.0))
    throw UsageError("linear spectrum needs a positive bath temperature (nbar > 0 or temperature_k)");
  const auto f = mode_frequencies(p);
  const double scale = constants::planck_h * 1e12 / (constants::boltzmann_k * T);
  c.nbar_mode.resize(m);
  c.boltz.resize(m);
  for (std::size_t l = 0; l < m; ++l) {
    const double x = scale * f[l];
    c.nbar_mode[l] = 1.0 / std::expm1(x);
    c.boltz[l] = std::exp(x - scale * f[0]);
  }
  c.gain_above = c.loss_above = p.chi * (p.nbar + 1.0);
  c.gain_below = c.loss_below = p.chi * p.nbar;
  return c;
}

std::vector<double> froehlich_multimode_rhs(const ModelParams& p, const MeanFieldState& state) {
  const auto c = multimode_coefficients(p);
  if (state.n.size() != c.modes()) throw UsageError("state size does not match D+1");
  std::vector<double> out(c.modes());
  kernels::multimode_rhs_parallel(c, state.n, out);
  return out;
}

MeanFieldState thermal_state(const ModelParams& p) {
  MeanFieldState s;
  s.n = multimode_coefficients(p).nbar_mode;
  return s;
}

namespace {

// largest absolute sum of the individual terms of any row; rounding in the
// rhs cannot go much below an ulp of this
double rate_scale(const kernels::MultimodeCoefficients& c, std::span<const double> n) {
  double worst = 0.0;
  for (std::size_t l = 0; l < n.size(); ++l) {
    const double nb = c.nbar_mode[l];
    double s = c.r + c.phi * (nb * (n[l] + 1.0) + (nb + 1.0) * n[l]);
    for (std::size_t j = 0; j < n.size(); ++j) {
      if (j == l) continue;
      const bool above = j > l;
      const double ratio = c.boltz[l] / c.boltz[j];
      s += (above ? c.gain_above : c.gain_below) * n[j] * (n[l] + 1.0) +
           (above ? c.loss_above : c.loss_below) * ratio * (n[j] + 1.0) * n[l];
    }
    worst = std::max(worst, s);
  }
  return worst;
}

}  // namespace

RelaxResult relax_to_steady_state(const ModelParams& p, MeanFieldState initial,
                                  const RelaxOptions& opts) {
  const auto c = multimode_coefficients(p);
  if (initial.n.size() != c.modes()) throw UsageError("state size does not match D+1");
  ode::Dopri5 solver(
      [&](double, std::span<const double> y, std::span<double> dy) {
        kernels::multimode_rhs_parallel(c, y, dy);
      },
      opts.ode);
  RelaxResult res;
  double t = initial.time_ns;
  ode::State y = std::move(initial.n);
  const double chunk = 0.05 / p.phi;
  for (;;) {
    solver.advance(t, y, t + chunk);
    for (double& v : y) v = std::max(v, 0.0);
    const auto d = solver.last_derivative();
    double worst = 0.0;
    for (double v : d) worst = std::max(worst, std::abs(v));
    res.max_abs_rhs = worst;
    res.tolerance_used = std::max(opts.rhs_tolerance, 1e-15 * rate_scale(c, y));
    if (worst < res.tolerance_used) break;
    if (t >= opts.t_max_ns)
      throw DomainError("multimode relaxation did not reach the rhs tolerance");
  }
  res.steps = solver.stats().accepted;
  res.state.n = std::move(y);
  res.state.time_ns = t;
  return res;
}

TimeSeries evolve_multimode(const ModelParams& p, MeanFieldState initial,
                            std::span<const double> t_grid, bool keep_modes,
                            const ode::Options& opts) {
  const auto c = multimode_coefficients(p);
  if (initial.n.size() != c.modes()) throw UsageError("state size does not match D+1");
  check_time_grid(t_grid);
  ode::Dopri5 solver(
      [&](double, std::span<const double> y, std::span<double> dy) {
        kernels::multimode_rhs_parallel(c, y, dy);
      },
      opts);
  TimeSeries out;
  double t = 0.0;
  ode::State y = std::move(initial.n);
  for (double tk : t_grid) {
    if (tk > t) solver.advance(t, y, tk);
    out.t_ns.push_back(tk);
    out.n0.push_back(y[0]);
    out.total.push_back(std::accumulate(y.begin(), y.end(), 0.0));
    if (keep_modes) out.modes.emplace_back(y.begin() + 1, y.end());
  }
  return out;
}

CriticalScan critical_exponent_scan(const ModelParams& p, double r_lo, double r_hi, int points) {
  const DerivedRates d0 = derive_rates(p);
  if (p.chi == 0.0) throw DomainError("no condensation threshold without two-phonon redistribution");
  if (!(r_lo <= d0.rc && d0.rc < r_hi))
    throw UsageError("pump window must straddle the threshold rc");
  if (points < 8) throw UsageError("critical scan needs at least 8 points");

  ModelParams q = p;
  q.r = d0.rc;
  CriticalScan scan;
  scan.F0 = meanfield_steady_n0(q).n0_mean;
  std::vector<double> x, y, lx, ly;
  const double upper_start = d0.rc + 0.5 * (r_hi - d0.rc);
  for (int i = 0; i < points; ++i) {
    q.r = r_lo + (r_hi - r_lo) * i / (points - 1);
    const double n0 = meanfield_steady_n0(q).n0_mean;
    scan.r.push_back(q.r);
    scan.n0.push_back(n0);
    if (q.r >= upper_start && q.r > d0.rc) {
      x.push_back(q.r - d0.rc);
      y.push_back(n0 - scan.F0);
      if (n0 > scan.F0) {
        lx.push_back(std::log(q.r - d0.rc));
        ly.push_back(std::log(n0 - scan.F0));
      }
    }
  }
  if (x.size() < 2 || lx.size() < 2) throw UsageError("pump window too narrow above rc");
  const auto lin = least_squares(x, y);
  scan.F1 = lin.slope;
  scan.intercept = lin.intercept;
  scan.residual = lin.rms;
  scan.exponent = least_squares(lx, ly).slope;
  return scan;
}

}  // namespace frohlich::meanfield
