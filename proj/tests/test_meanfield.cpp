#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "frohlich/error.hpp"
#include "frohlich/meanfield.hpp"
#include "oracles.hpp"

using namespace frohlich;

TEST(MeanField, TotalNumberFollowsClosedForm) {
  const auto p = preset("bsa-280");
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(0.1 * i);
  const auto ts = meanfield::total_number_evolution(p, 0.0, grid);
  ASSERT_EQ(ts.size(), grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    EXPECT_NEAR(ts.total[i], meanfield::total_number_closed_form(p, 0.0, grid[i]),
                1e-8 * derive_rates(p).N);
}

TEST(MeanField, TotalNumberRejectsBadGrid) {
  const auto p = preset("bsa-280");
  const std::vector<double> bad{0.0, 1.0, 1.0};
  EXPECT_THROW(meanfield::total_number_evolution(p, 0.0, bad), UsageError);
  EXPECT_THROW(meanfield::total_number_evolution(p, -1.0, std::vector<double>{1.0}), UsageError);
}

TEST(MeanField, SteadyRootMatchesOracle) {
  auto p = preset("bsa-280");
  p.r = 100.0;
  const auto rep = meanfield::meanfield_steady_n0(p);
  EXPECT_NEAR(rep.n0_mean, oracle::mf_n0_r100, 1e-9 * oracle::mf_n0_r100);
  EXPECT_EQ(rep.branch, meanfield::Branch::above_threshold);
  EXPECT_NEAR(meanfield::n0_rate_rhs(p, rep.n0_mean), 0.0, 1e-6);
  p.r = 0.0;
  const auto below = meanfield::meanfield_steady_n0(p);
  EXPECT_NEAR(below.n0_mean, oracle::mf_n0_r0, 1e-9 * oracle::mf_n0_r0);
  EXPECT_EQ(below.branch, meanfield::Branch::below_threshold);
}

TEST(MeanField, NoRedistributionGivesThermalLaw) {
  auto p = preset("bsa-280");
  p.chi = 0.0;
  p.r = 30.0;
  EXPECT_NEAR(meanfield::meanfield_steady_n0(p).n0_mean, (p.r + p.phi * p.nbar) / p.phi, 1e-12);
}

TEST(MeanField, ExactClosureNeedsSecondMoment) {
  const auto p = preset("bsa-280");
  EXPECT_THROW(meanfield::n0_rate_rhs(p, 10.0, meanfield::Closure::exact), UsageError);
  EXPECT_DOUBLE_EQ(meanfield::n0_rate_rhs(p, 10.0, meanfield::Closure::exact, 100.0),
                   meanfield::n0_rate_rhs(p, 10.0));
  EXPECT_THROW(meanfield::parse_closure("mystery"), UsageError);
}

TEST(MeanField, FormalSolutionBound) {
  const auto p = preset("bsa-280");
  const double bound = p.phi / p.chi + p.D * p.nbar;
  EXPECT_GT(meanfield::formal_n0_from_Ne(p, 0.5 * bound), 0.0);
  EXPECT_THROW(meanfield::formal_n0_from_Ne(p, bound), DomainError);
}

TEST(MeanField, FlatRelaxationConservesTotalAndReachesRoot) {
  auto p = preset("bsa-280");
  p.r = 100.0;
  const auto res = meanfield::relax_to_steady_state(p, meanfield::thermal_state(p));
  const double total = std::accumulate(res.state.n.begin(), res.state.n.end(), 0.0);
  EXPECT_NEAR(total, derive_rates(p).N, 1e-6 * derive_rates(p).N);
  // flat-bath multimode fixed point coincides with the factorized root
  EXPECT_NEAR(res.state.n0(), oracle::mf_n0_r100, 1e-6 * oracle::mf_n0_r100);
  EXPECT_LE(res.max_abs_rhs, res.tolerance_used);
}

TEST(MeanField, MultimodeRhsSumsToTotalNumberLaw) {
  auto p = preset("bsa-280");
  auto s = meanfield::thermal_state(p);
  for (std::size_t l = 0; l < s.n.size(); ++l) s.n[l] += 3.0 * l;
  const auto d = meanfield::froehlich_multimode_rhs(p, s);
  const double N = std::accumulate(s.n.begin(), s.n.end(), 0.0);
  const double dN = std::accumulate(d.begin(), d.end(), 0.0);
  EXPECT_NEAR(dN, (p.D + 1.0) * (p.r + p.phi * p.nbar) - p.phi * N, 1e-8 * N);
}

TEST(MeanField, LinearSpectrumNeedsTemperature) {
  auto p = preset("bsa-280");
  p.nbar = 0.0;
  p.spectrum = {SpectrumKind::linear, p.f0_thz, 1.0};
  EXPECT_THROW(meanfield::multimode_coefficients(p), UsageError);
}

TEST(MeanField, EvolveMultimodeKeepsModes) {
  auto p = preset("bsa-280");
  p.D = 20;
  const std::vector<double> grid{0.0, 0.5, 1.0};
  const auto ts = meanfield::evolve_multimode(p, meanfield::thermal_state(p), grid, true);
  ASSERT_EQ(ts.modes.size(), 3u);
  EXPECT_EQ(ts.modes[0].size(), 20u);
  for (std::size_t i = 0; i < grid.size(); ++i)
    EXPECT_NEAR(ts.total[i], meanfield::total_number_closed_form(p, (p.D + 1) * p.nbar, grid[i]),
                1e-7 * ts.total[i]);
}

TEST(MeanField, CriticalExponentIsOne) {
  const auto p = preset("bsa-280");
  const double rc = derive_rates(p).rc;
  const auto scan = meanfield::critical_exponent_scan(p, 0.5 * rc, 1.2 * rc);
  EXPECT_NEAR(scan.exponent, 1.0, 0.1);
  EXPECT_GT(scan.F1, 0.0);
}

TEST(MeanField, CriticalScanErrors) {
  auto p = preset("bsa-280");
  const double rc = derive_rates(p).rc;
  EXPECT_THROW(meanfield::critical_exponent_scan(p, 1.1 * rc, 1.2 * rc), UsageError);
  p.chi = 0.0;
  EXPECT_THROW(meanfield::critical_exponent_scan(p, 0.0, 10.0), DomainError);
}
