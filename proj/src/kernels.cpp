#include "frohlich/kernels.hpp"

#include <cstddef>

namespace frohlich::kernels {

namespace {

inline double birth_death_row(std::span<const double> up, std::span<const double> down,
                              std::span<const double> p, std::size_t k) {
  const std::size_t n = p.size();
  const double out_up = k + 1 < n ? up[k] : 0.0;
  const double out_down = k > 0 ? down[k] : 0.0;
  double v = -(out_up + out_down) * p[k];
  if (k > 0) v += up[k - 1] * p[k - 1];
  if (k + 1 < n) v += down[k + 1] * p[k + 1];
  return v;
}

inline double multimode_row(const MultimodeCoefficients& c, std::span<const double> n,
                            std::size_t l) {
  const std::size_t m = n.size();
  const double nl = n[l];
  const double nb = c.nbar_mode[l];
  double two = 0.0;
  for (std::size_t j = 0; j < l; ++j) {
    const double ratio = c.boltz[l] / c.boltz[j];
    two += c.gain_below * n[j] * (nl + 1.0) - c.loss_below * ratio * (n[j] + 1.0) * nl;
  }
  for (std::size_t j = l + 1; j < m; ++j) {
    const double ratio = c.boltz[l] / c.boltz[j];
    two += c.gain_above * n[j] * (nl + 1.0) - c.loss_above * ratio * (n[j] + 1.0) * nl;
  }
  return c.r + c.phi * (nb * (nl + 1.0) - (nb + 1.0) * nl) + two;
}

inline double lorentzian_point(std::span<const Lorentzian> lines, double width_unit, double x) {
  double s = 0.0;
  for (const auto& line : lines) {
    const double delta = (line.center - x) / width_unit;
    const double g = line.half_width;
    s += line.weight * g / (delta * delta + g * g);
  }
  return s;
}

}  // namespace

void birth_death_apply_serial(std::span<const double> up, std::span<const double> down,
                              std::span<const double> p, std::span<double> dpdt) {
  for (std::size_t k = 0; k < p.size(); ++k) dpdt[k] = birth_death_row(up, down, p, k);
}

void birth_death_apply_parallel(std::span<const double> up, std::span<const double> down,
                                std::span<const double> p, std::span<double> dpdt) {
  const auto n = static_cast<std::ptrdiff_t>(p.size());
#pragma omp parallel for schedule(static) if (n > 4096)
  for (std::ptrdiff_t k = 0; k < n; ++k)
    dpdt[k] = birth_death_row(up, down, p, static_cast<std::size_t>(k));
}

void multimode_rhs_serial(const MultimodeCoefficients& c, std::span<const double> n,
                          std::span<double> dndt) {
  for (std::size_t l = 0; l < n.size(); ++l) dndt[l] = multimode_row(c, n, l);
}

void multimode_rhs_parallel(const MultimodeCoefficients& c, std::span<const double> n,
                            std::span<double> dndt) {
  const auto m = static_cast<std::ptrdiff_t>(n.size());
#pragma omp parallel for schedule(static) if (m > 64)
  for (std::ptrdiff_t l = 0; l < m; ++l)
    dndt[l] = multimode_row(c, n, static_cast<std::size_t>(l));
}

void lorentzian_sum_serial(std::span<const Lorentzian> lines, double width_unit,
                           std::span<const double> grid, std::span<double> out) {
  for (std::size_t i = 0; i < grid.size(); ++i)
    out[i] = lorentzian_point(lines, width_unit, grid[i]);
}

void lorentzian_sum_parallel(std::span<const Lorentzian> lines, double width_unit,
                             std::span<const double> grid, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(static) if (n > 1024)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    out[i] = lorentzian_point(lines, width_unit, grid[static_cast<std::size_t>(i)]);
}

}  // namespace frohlich::kernels
