#pragma once

// Hot loops, each in a serial reference form and an OpenMP form. The parallel
// variants partition the output index only, so every output element is
// accumulated in the same order as in the serial reference and the results
// are bitwise identical.

#include <span>
#include <vector>

namespace frohlich::kernels {

/// dP/dt of a birth-death chain on 0..n-1.
///   up[k]   rate k -> k+1 (up[n-1] is treated as zero)
///   down[k] rate k -> k-1 (down[0] is treated as zero)
void birth_death_apply_serial(std::span<const double> up, std::span<const double> down,
                              std::span<const double> p, std::span<double> dpdt);
void birth_death_apply_parallel(std::span<const double> up, std::span<const double> down,
                                std::span<const double> p, std::span<double> dpdt);

/// Coefficients of the decorrelated multimode rate equations.
///
/// For mode l and partner j the two-phonon contribution is
///   gain(l,j) n_j (n_l + 1) - loss(l,j) (n_j + 1) n_l
/// with, for j > l:  gain = gain_above,  loss = loss_above * boltz[l] / boltz[j]
///      for j < l:  gain = gain_below,  loss = loss_below * boltz[l] / boltz[j]
/// and the one-phonon part r + phi (nbar_l (n_l + 1) - (nbar_l + 1) n_l).
struct MultimodeCoefficients {
  double r = 0.0;
  double phi = 0.0;
  std::vector<double> nbar_mode;  ///< per-mode bath occupation
  std::vector<double> boltz;      ///< exp(h f_l / k T); all ones for the flat spectrum
  double gain_above = 0.0, loss_above = 0.0;
  double gain_below = 0.0, loss_below = 0.0;

  std::size_t modes() const { return nbar_mode.size(); }
};

void multimode_rhs_serial(const MultimodeCoefficients& c, std::span<const double> n,
                          std::span<double> dndt);
void multimode_rhs_parallel(const MultimodeCoefficients& c, std::span<const double> n,
                            std::span<double> dndt);

struct Lorentzian {
  double center = 0.0;      ///< same unit as the grid
  double half_width = 0.0;  ///< in units of `width_unit` * grid unit
  double weight = 0.0;
};

/// out[i] = sum_j w_j g_j / (((x_j - x_i) / width_unit)^2 + g_j^2), i.e. the
/// detuning is expressed in the unit of the half-widths.
void lorentzian_sum_serial(std::span<const Lorentzian> lines, double width_unit,
                           std::span<const double> grid, std::span<double> out);
void lorentzian_sum_parallel(std::span<const Lorentzian> lines, double width_unit,
                             std::span<const double> grid, std::span<double> out);

}  // namespace frohlich::kernels
