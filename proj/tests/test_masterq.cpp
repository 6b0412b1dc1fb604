#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "frohlich/distribution.hpp"
#include "frohlich/error.hpp"
#include "frohlich/masterq.hpp"
#include "oracles.hpp"

using namespace frohlich;

namespace {

double linf(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
    const double x = i < a.size() ? a[i] : 0.0, y = i < b.size() ? b[i] : 0.0;
    m = std::max(m, std::abs(x - y));
  }
  return m;
}

}  // namespace

TEST(MasterEq, GeneratorRates) {
  const auto p = preset("bsa-280");
  const auto g = masterq::build_generator(p);
  EXPECT_NEAR(g.up[0], oracle::up_rate_at_zero_r220, 0.01);
  EXPECT_DOUBLE_EQ(g.down[0], 0.0);
  EXPECT_DOUBLE_EQ(g.up.back(), 0.0);
  // redistribution gain vanishes once n0 = N
  const int N = static_cast<int>(derive_rates(p).N);
  EXPECT_NEAR(g.up[N], (N + 1.0) * (p.r + p.phi * p.nbar), 1e-6);
}

TEST(MasterEq, GeneratorOnePhononPart) {
  auto p = oracle::small_instance();
  p.chi = 0.0;
  const auto g = masterq::build_generator(p, 40);
  for (int n = 0; n < 40; ++n) {
    EXPECT_DOUBLE_EQ(g.up[n], (p.r + p.phi * p.nbar) * (n + 1));
    EXPECT_DOUBLE_EQ(g.down[n], (p.r + p.phi * (p.nbar + 1)) * n);
  }
}

TEST(MasterEq, NullSpaceMatchesRecursion) {
  const auto p = oracle::small_instance();
  const auto d = distribution::steady_distribution(p);
  const auto g = masterq::build_generator(p, d.n_max);
  const auto v = masterq::stationary_vector(g);
  EXPECT_LT(linf(v, d.probs), 1e-12);
  EXPECT_LT(masterq::stationarity_residual(g, d.probs), 1e-10);
}

TEST(MasterEq, TruncationCoversSupport) {
  const auto p = oracle::small_instance();
  EXPECT_GE(masterq::default_truncation(p), distribution::steady_distribution(p).n_max);
  const auto q = preset("bsa-280");
  EXPECT_GE(masterq::default_truncation(q), static_cast<int>(std::ceil(derive_rates(q).N)));
}

TEST(MasterEq, PopulationRelaxesToStationary) {
  const auto p = oracle::small_instance();
  const auto d = distribution::steady_distribution(p);
  const auto g = masterq::build_generator(p);
  std::vector<double> P0(g.size(), 0.0);
  P0[0] = 1.0;
  const std::vector<double> grid{0.0, 1.0, 5.0, 20.0, 60.0};
  masterq::PopulationOptions opts;
  opts.ode.rtol = 1e-11;
  opts.ode.atol = 1e-14;
  const auto tr = masterq::evolve_population(p, g, P0, grid, opts);
  EXPECT_LT(linf(tr.final_probs, d.probs), 1e-8);
  EXPECT_LT(tr.max_norm_error, 1e-9);
  for (double r : tr.moment_residual) EXPECT_LT(r, 1e-6);
}

TEST(MasterEq, StationaryStartStaysPut) {
  const auto p = oracle::small_instance();
  const auto d = distribution::steady_distribution(p);
  const auto g = masterq::build_generator(p, d.n_max);
  for (auto integ : {masterq::Integrator::dopri5, masterq::Integrator::trbdf2}) {
    masterq::PopulationOptions opts;
    opts.integrator = integ;
    const auto tr = masterq::evolve_population(p, g, d.probs, std::vector<double>{0.0, 3.0}, opts);
    EXPECT_LT(linf(tr.final_probs, d.probs), 1e-9);
  }
}

TEST(MasterEq, PopulationInputChecks) {
  const auto p = oracle::small_instance();
  const auto g = masterq::build_generator(p);
  std::vector<double> P0(g.size(), 0.0);
  P0[0] = 0.5;
  EXPECT_THROW(masterq::evolve_population(p, g, P0, std::vector<double>{1.0}), UsageError);
  EXPECT_THROW(masterq::evolve_population(p, g, std::vector<double>{1.0}, std::vector<double>{1.0}),
               UsageError);
  EXPECT_THROW(masterq::parse_integrator("euler"), UsageError);
}

TEST(MasterEq, StiffTrajectoryKeepsMomentLaw) {
  auto p = preset("bsa-280");
  p.r = 100.0;
  const auto g = masterq::build_generator(p);
  std::vector<double> P0(g.size(), 0.0);
  P0[0] = 1.0;
  masterq::PopulationOptions opts;
  opts.integrator = masterq::Integrator::trbdf2;
  const auto tr = masterq::evolve_population(p, g, P0, std::vector<double>{0.0, 0.01, 0.1, 1.0}, opts);
  for (double r : tr.moment_residual) EXPECT_LT(r, 1e-6);
  EXPECT_LT(tr.max_norm_error, 1e-9);
  EXPECT_LT(tr.max_boundary_mass, 1e-9);
}

TEST(MasterEq, CoherenceCoefficients) {
  auto p = preset("bsa-280");
  p.r = 100.0;
  const auto c = masterq::coherence_coefficients(p, 3280.0);
  EXPECT_NEAR(c.gamma, oracle::gamma_at_3280_r100, 1e-12);
  EXPECT_DOUBLE_EQ(masterq::coherence_coefficients(p, 0.0).d, 0.0);
  EXPECT_THROW(masterq::coherence_coefficients(p, -1.0), UsageError);
}

TEST(MasterEq, CoherenceWithoutRedistributionAtLargeOccupation) {
  auto p = preset("bsa-280");
  p.chi = 0.0;
  p.r = 40.0;
  const double n0 = 1e6;
  const double lead = (2.0 * p.r + p.phi * (2.0 * p.nbar + 1.0)) / (8.0 * n0);
  EXPECT_NEAR(masterq::coherence_coefficients(p, n0).gamma, lead, 1e-5 * lead);
}

TEST(MasterEq, LinewidthFromMeanField) {
  auto p = preset("bsa-280");
  p.r = 100.0;
  const auto hi = masterq::linewidth(p);
  EXPECT_NEAR(hi.gamma_full, oracle::gamma_mf_r100, 1e-9);
  EXPECT_NEAR(hi.coherence_length_m, oracle::ell_c_r100, 1e-15);
  EXPECT_NEAR(hi.lifetime_ns, 1.0 / oracle::gamma_mf_r100, 1e-8);
  EXPECT_NEAR(hi.gamma_approx, (p.r + p.phi * (p.nbar + 0.5)) / (4.0 * oracle::mf_n0_r100), 1e-12);
  p.r = 0.0;
  const auto lo = masterq::linewidth(p);
  EXPECT_NEAR(lo.gamma_full, oracle::gamma_mf_r0, 1e-9);
  EXPECT_NEAR(lo.coherence_length_m, oracle::ell_c_r0, 1e-15);
  EXPECT_NEAR(hi.lifetime_ns / lo.lifetime_ns, oracle::lifetime_ratio, 1e-7);
  EXPECT_THROW(masterq::linewidth(p, 0.0), UsageError);
}

TEST(MasterEq, LinewidthApproxLimit) {
  auto p = preset("bsa-280");
  p.chi = 0.0;
  p.r = 1e4;
  const auto lw = masterq::linewidth(p);
  EXPECT_NEAR(lw.n0_used, (p.r + p.phi * p.nbar) / p.phi, 1e-9);
  EXPECT_NEAR(lw.gamma_approx, p.r / (4.0 * lw.n0_used), 0.02 * lw.gamma_approx);
}

TEST(MasterEq, CoherenceFitAboveThreshold) {
  auto p = preset("bsa-280");
  p.r = 100.0;
  const auto grid = masterq::coherence_window(p, 120);
  const auto res = masterq::evolve_coherence(p, masterq::detailed_balance_coherence(p), grid);
  EXPECT_NEAR(res.gamma_fit, res.gamma_reference, 0.1 * res.gamma_reference);
  // magnitude does not grow after the first samples
  for (std::size_t i = 7; i < res.series.size(); ++i)
    ASSERT_LE(res.series.coherence[i], res.series.coherence[i - 1] * (1.0 + 1e-12)) << i;
}

TEST(MasterEq, ZeroCoherenceStaysZero) {
  const auto p = oracle::small_instance();
  masterq::CoherenceState s{std::vector<double>(20, 0.0), 0.0};
  const auto res = masterq::evolve_coherence(p, s, std::vector<double>{0.0, 1.0, 2.0});
  for (double v : res.series.coherence) EXPECT_EQ(v, 0.0);
  EXPECT_TRUE(std::isnan(res.gamma_fit));
}

TEST(MasterEq, IsolatedCoherencePureDecay) {
  ModelParams p;
  p.phi = 6.0;
  p.D = 10;
  p.f0_thz = 0.314;
  masterq::CoherenceState s{std::vector<double>(5, 0.0), 0.0};
  s.amps[0] = 1.0;
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(0.05 * i);
  const auto res = masterq::evolve_coherence(p, s, grid, 200);
  const double g0 = masterq::coherence_coefficients(p, 0.0).gamma;
  for (std::size_t i = 0; i < grid.size(); ++i)
    EXPECT_NEAR(res.series.coherence[i], std::exp(-g0 * grid[i]), 1e-5);
  EXPECT_NEAR(res.gamma_fit, g0, 1e-4 * g0);
}

TEST(MasterEq, CoherenceRejectsBrokenBalance) {
  const auto p = oracle::small_instance();
  auto s = masterq::detailed_balance_coherence(p);
  s.amps[3] *= 1.01;
  EXPECT_THROW(masterq::evolve_coherence(p, s, std::vector<double>{0.0, 1.0}), UsageError);
}

TEST(MasterEq, OccupationSourceLabels) {
  EXPECT_EQ(masterq::parse_occupation_source("distribution"), masterq::OccupationSource::distribution);
  EXPECT_EQ(masterq::to_string(masterq::OccupationSource::meanfield), "meanfield");
  EXPECT_THROW(masterq::parse_occupation_source("guess"), UsageError);
}
