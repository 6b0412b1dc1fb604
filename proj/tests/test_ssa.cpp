#include <gtest/gtest.h>
#include <omp.h>

#include <cmath>
#include <numeric>

#include "frohlich/distribution.hpp"
#include "frohlich/error.hpp"
#include "frohlich/ssa.hpp"
#include "oracles.hpp"

using namespace frohlich;

namespace {

ssa::JumpConfig sampling(const ModelParams& p, double samples, int trajectories = 4) {
  ssa::JumpConfig cfg;
  cfg.seed = 2024;
  cfg.n_trajectories = trajectories;
  cfg.t_sample_ns = samples / trajectories / p.phi;
  return cfg;
}

ModelParams multimode_instance(double r) {
  ModelParams p;
  p.r = r;
  p.phi = 6.0;
  p.chi = 1.0;
  p.D = 20;
  p.f0_thz = 0.314;
  p.nbar = 0.5;
  return p;
}

}  // namespace

TEST(SSA, UniformUsesTop53Bits) {
  std::mt19937_64 a(5), b(5);
  const double u = ssa::uniform53(a);
  EXPECT_DOUBLE_EQ(u, static_cast<double>(b() >> 11) / 9007199254740992.0);
  EXPECT_GE(u, 0.0);
  EXPECT_LT(u, 1.0);
}

TEST(SSA, SubstreamsDiffer) {
  auto a = ssa::trajectory_engine(1, 0), b = ssa::trajectory_engine(1, 1);
  EXPECT_NE(a(), b());
  auto c = ssa::trajectory_engine(1, 0);
  auto d = ssa::trajectory_engine(1, 0);
  EXPECT_EQ(c(), d());
}

TEST(SSA, SingleModeHistogramMatchesDistribution) {
  const auto p = oracle::small_instance();
  const auto res = ssa::simulate_single_mode(p, sampling(p, 1e5));
  EXPECT_GE(res.sample_count(), 100000u);
  const auto d = distribution::steady_distribution(p);
  EXPECT_LT(distribution::total_variation(res.normalized_histogram(), d.probs), 0.02);
  const auto m = ssa::mandel_from_samples(res);
  EXPECT_NEAR(m.mean, oracle::small_mean, 5.0 * m.mean_se + 0.02);
  EXPECT_NEAR(m.mandel_q, oracle::small_mandel, 5.0 * m.q_se + 0.02);
  EXPECT_EQ(res.rng_algorithm, ssa::kRngLabel);
}

TEST(SSA, SingleModeSubPoissonian) {
  auto p = multimode_instance(60.0);
  const auto res = ssa::simulate_single_mode(p, sampling(p, 1e5));
  const auto m = ssa::mandel_from_samples(res);
  const double q = distribution::statistics(distribution::steady_distribution(p), derive_rates(p)).mandel_q;
  ASSERT_LT(q, 0.0);
  EXPECT_NEAR(m.mandel_q, q, 5.0 * m.q_se + 0.02);
  EXPECT_LT(m.mandel_q + 3.0 * m.q_se, 0.0);
}

TEST(SSA, ReproducibleAcrossThreadCounts) {
  const auto p = oracle::small_instance();
  const auto cfg = sampling(p, 2e4);
  omp_set_num_threads(1);
  const auto a = ssa::simulate_single_mode(p, cfg);
  omp_set_num_threads(3);
  const auto b = ssa::simulate_single_mode(p, cfg);
  EXPECT_EQ(a.histogram, b.histogram);
  EXPECT_EQ(a.n0_samples, b.n0_samples);
  auto other = cfg;
  other.seed = cfg.seed + 1;
  EXPECT_NE(ssa::simulate_single_mode(p, other).histogram, a.histogram);
}

TEST(SSA, MultimodeReproducibleAcrossThreadCounts) {
  const auto p = multimode_instance(20.0);
  auto cfg = sampling(p, 2000);
  omp_set_num_threads(1);
  const auto a = ssa::simulate_multimode(p, cfg);
  omp_set_num_threads(4);
  const auto b = ssa::simulate_multimode(p, cfg);
  EXPECT_EQ(a.histogram, b.histogram);
  EXPECT_EQ(a.occupation_means, b.occupation_means);
}

TEST(SSA, RedistributionConservesTotalNumber) {
  const auto p = preset("bsa-280");
  ssa::JumpConfig cfg;
  cfg.t_burn_ns = 0.0;
  cfg.t_sample_ns = 10.0;
  cfg.one_phonon = false;
  cfg.max_jumps = 1'000'000;
  const auto res = ssa::simulate_multimode(p, cfg);
  EXPECT_EQ(res.jumps.two_phonon, 1'000'000u);
  EXPECT_EQ(res.jumps.one_phonon, 0u);
  EXPECT_EQ(res.conservation_violations, 0u);
  ASSERT_FALSE(res.total_number_samples.empty());
  for (double v : res.total_number_samples) EXPECT_EQ(v, res.total_number_samples.front());
  EXPECT_EQ(res.channel_count, 201u * 200u);
}

TEST(SSA, MultimodeTotalNumberIsNegativeBinomialChain) {
  // total N alone is a birth-death chain: births (r + phi nbar)(N + D + 1),
  // deaths (r + phi (nbar + 1)) N; mean (D+1)(r/phi + nbar), variance mean (r + phi (nbar+1)) / phi
  const auto p = multimode_instance(40.0);
  auto cfg = sampling(p, 1e4, 2);
  cfg.stride_ns = 0.2 / p.phi;
  const auto res = ssa::simulate_multimode(p, cfg);
  const auto& s = res.total_number_samples;
  const double mean = std::accumulate(s.begin(), s.end(), 0.0) / s.size();
  double var = 0.0;
  for (double v : s) var += (v - mean) * (v - mean);
  var /= s.size() - 1;
  const double N = derive_rates(p).N;
  const double var_ref = N * (p.r + p.phi * (p.nbar + 1.0)) / p.phi;
  EXPECT_NEAR(mean, N, 0.02 * N);
  EXPECT_NEAR(var, var_ref, 0.15 * var_ref);
  const double occ = std::accumulate(res.occupation_means.begin(), res.occupation_means.end(), 0.0);
  EXPECT_NEAR(occ, N, 0.02 * N);
}

TEST(SSA, MultimodeRejectsLinearSpectrum) {
  auto p = multimode_instance(10.0);
  p.nbar = 1.0;
  p.spectrum = {SpectrumKind::linear, p.f0_thz, 1.0};
  EXPECT_THROW(ssa::simulate_multimode(p, sampling(p, 100)), UsageError);
}

TEST(SSA, ConfigValidation) {
  ssa::JumpConfig cfg;
  EXPECT_THROW(cfg.validate(), UsageError);  // no sampling window
  cfg.t_sample_ns = 1.0;
  cfg.n_trajectories = 0;
  EXPECT_THROW(cfg.validate(), UsageError);
  cfg.n_trajectories = 1;
  cfg.stride_ns = 0.0;
  EXPECT_THROW(cfg.validate(), UsageError);
}

TEST(SSA, MandelEstimator) {
  std::vector<std::int64_t> constant(2000, 7);
  const auto m = ssa::mandel_from_samples(constant);
  EXPECT_DOUBLE_EQ(m.mean, 7.0);
  EXPECT_DOUBLE_EQ(m.mandel_q, -1.0);
  EXPECT_NEAR(m.q_se, 0.0, 1e-12);
  std::vector<std::int64_t> alternating(2000);
  for (std::size_t i = 0; i < alternating.size(); ++i) alternating[i] = i % 2 ? 4 : 0;
  // mean 2, variance 4 (population)
  EXPECT_NEAR(ssa::mandel_from_samples(alternating).mandel_q, 1.0, 1e-3);
  EXPECT_THROW(ssa::mandel_from_samples(std::vector<std::int64_t>(999, 1)), UsageError);
}
