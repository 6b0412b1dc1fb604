#include <gtest/gtest.h>
#include <omp.h>

#include <cstring>
#include <random>

#include "frohlich/kernels.hpp"
#include "frohlich/meanfield.hpp"

using namespace frohlich;

namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed, double scale) {
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> u(0.0, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = u(eng);
  return v;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST(Kernels, BirthDeathParallelMatchesSerialBitwise) {
  const std::size_t n = 20000;
  const auto up = random_vector(n, 1, 1e4), down = random_vector(n, 2, 1e4);
  const auto p = random_vector(n, 3, 1.0);
  std::vector<double> a(n), b(n);
  kernels::birth_death_apply_serial(up, down, p, a);
  for (int threads : {1, 2, 4}) {
    omp_set_num_threads(threads);
    kernels::birth_death_apply_parallel(up, down, p, b);
    EXPECT_TRUE(bitwise_equal(a, b)) << threads;
  }
}

TEST(Kernels, BirthDeathConservesProbability) {
  const std::size_t n = 500;
  const auto up = random_vector(n, 4, 10.0), down = random_vector(n, 5, 10.0);
  const auto p = random_vector(n, 6, 1.0);
  std::vector<double> d(n);
  kernels::birth_death_apply_serial(up, down, p, d);
  double s = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    s += d[k];
    scale += std::abs(d[k]);
  }
  EXPECT_LT(std::abs(s), 1e-12 * scale);
}

TEST(Kernels, BirthDeathEdgesIgnoreOutOfRangeRates) {
  // up[n-1] and down[0] must not leak probability
  std::vector<double> up{1.0, 2.0, 5.0}, down{7.0, 3.0, 4.0}, p{0.2, 0.3, 0.5}, d(3);
  kernels::birth_death_apply_serial(up, down, p, d);
  EXPECT_DOUBLE_EQ(d[0], -1.0 * 0.2 + 3.0 * 0.3);
  EXPECT_DOUBLE_EQ(d[1], 1.0 * 0.2 - (2.0 + 3.0) * 0.3 + 4.0 * 0.5);
  EXPECT_DOUBLE_EQ(d[2], 2.0 * 0.3 - 4.0 * 0.5);
}

TEST(Kernels, MultimodeParallelMatchesSerialBitwise) {
  auto p = preset("bsa-280");
  p.spectrum = {SpectrumKind::linear, p.f0_thz, 1.0};
  for (auto kind : {SpectrumKind::flat, SpectrumKind::linear}) {
    p.spectrum.kind = kind;
    const auto c = meanfield::multimode_coefficients(p);
    const auto n = random_vector(c.modes(), 7, 100.0);
    std::vector<double> a(c.modes()), b(c.modes());
    kernels::multimode_rhs_serial(c, n, a);
    for (int threads : {1, 3}) {
      omp_set_num_threads(threads);
      kernels::multimode_rhs_parallel(c, n, b);
      EXPECT_TRUE(bitwise_equal(a, b));
    }
  }
}

TEST(Kernels, MultimodeFlatRedistributionConservesTotal) {
  auto p = preset("bsa-280");
  auto c = meanfield::multimode_coefficients(p);
  c.r = 0.0;
  c.phi = 0.0;
  const auto n = random_vector(c.modes(), 8, 50.0);
  std::vector<double> d(c.modes());
  kernels::multimode_rhs_serial(c, n, d);
  double s = 0.0, scale = 0.0;
  for (double v : d) {
    s += v;
    scale += std::abs(v);
  }
  EXPECT_LT(std::abs(s), 1e-12 * scale);
}

TEST(Kernels, LorentzianParallelMatchesSerialBitwise) {
  std::vector<kernels::Lorentzian> lines;
  for (int j = 0; j < 200; ++j) lines.push_back({0.3 + 0.003 * j, 0.5 + 0.1 * j, 1.0 + j});
  const auto grid = random_vector(5000, 9, 1.2);
  std::vector<double> a(grid.size()), b(grid.size());
  kernels::lorentzian_sum_serial(lines, 1e-3, grid, a);
  omp_set_num_threads(2);
  kernels::lorentzian_sum_parallel(lines, 1e-3, grid, b);
  EXPECT_TRUE(bitwise_equal(a, b));
}

TEST(Kernels, LorentzianPeakValue) {
  std::vector<kernels::Lorentzian> lines{{1.0, 2.0, 3.0}};
  std::vector<double> grid{1.0, 1.002}, out(2);
  kernels::lorentzian_sum_serial(lines, 1e-3, grid, out);
  EXPECT_DOUBLE_EQ(out[0], 3.0 / 2.0);
  EXPECT_NEAR(out[1], 3.0 * 2.0 / (4.0 + 4.0), 1e-9);
}
