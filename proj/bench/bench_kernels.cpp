// Serial reference vs OpenMP variants of the hot loops.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "frohlich/kernels.hpp"
#include "frohlich/meanfield.hpp"
#include "frohlich/params.hpp"

using namespace frohlich;

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed, double scale) {
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> u(0.0, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = u(eng);
  return v;
}

template <auto Kernel>
void birth_death(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto up = noise(n, 1, 1e4), down = noise(n, 2, 1e4), p = noise(n, 3, 1.0);
  std::vector<double> out(n);
  for (auto _ : state) {
    Kernel(up, down, p, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

template <auto Kernel>
void multimode(benchmark::State& state) {
  auto p = preset("bsa-280");
  p.D = static_cast<int>(state.range(0));
  const auto c = meanfield::multimode_coefficients(p);
  const auto n = noise(c.modes(), 4, 100.0);
  std::vector<double> out(c.modes());
  for (auto _ : state) {
    Kernel(c, n, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c.modes() * c.modes()));
}

template <auto Kernel>
void lorentzian(benchmark::State& state) {
  std::vector<kernels::Lorentzian> lines;
  for (int j = 0; j <= 200; ++j) lines.push_back({0.314 + 0.686 * j / 200.0, 0.3 + j, 1.0});
  const auto grid = noise(static_cast<std::size_t>(state.range(0)), 5, 1.2);
  std::vector<double> out(grid.size());
  for (auto _ : state) {
    Kernel(lines, 1e-3, grid, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.size() * lines.size()));
}

}  // namespace

BENCHMARK(birth_death<kernels::birth_death_apply_serial>)->Name("birth_death/serial")->Arg(10000)->Arg(100000);
BENCHMARK(birth_death<kernels::birth_death_apply_parallel>)->Name("birth_death/omp")->Arg(10000)->Arg(100000);
BENCHMARK(multimode<kernels::multimode_rhs_serial>)->Name("multimode_rhs/serial")->Arg(200)->Arg(1000);
BENCHMARK(multimode<kernels::multimode_rhs_parallel>)->Name("multimode_rhs/omp")->Arg(200)->Arg(1000);
BENCHMARK(lorentzian<kernels::lorentzian_sum_serial>)->Name("lorentzian/serial")->Arg(10000);
BENCHMARK(lorentzian<kernels::lorentzian_sum_parallel>)->Name("lorentzian/omp")->Arg(10000);

BENCHMARK_MAIN();
