#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "frohlich/meanfield.hpp"
#include "frohlich/params.hpp"

namespace frohlich::spectra {

struct SpectrumLine {
  double center_thz = 0.0;
  double half_width_ghz = 0.0;
  double weight = 0.0;  ///< <n_j> |mu_j|^2
};

struct Spectrum {
  std::vector<double> frequencies_thz;
  std::vector<double> intensities;
  std::vector<SpectrumLine> lines;
};

/// Kinetics used for the line weights.
enum class OccupationModel {
  flat,       ///< flat-bath equations; the spectrum supplies only the centers
  boltzmann,  ///< decorrelated equations with mode-resolved Boltzmann factors
};
OccupationModel parse_occupation_model(std::string_view label);
std::string_view to_string(OccupationModel m) noexcept;

struct LineOptions {
  OccupationModel occupations = OccupationModel::flat;
  std::vector<double> dipoles;  ///< |mu_j| per mode; empty means all ones
  meanfield::RelaxOptions relax;
};

/// One line per mode of a linear spectrum. Occupations come from relaxing the
/// chosen multimode equations from the thermal state; widths evaluate the gamma
/// formula at each mode's own occupation.
std::vector<SpectrumLine> build_lines(const ModelParams& p, const LineOptions& opts = {});

struct SampleOptions {
  double scale = 1.0;             ///< overall prefactor
  bool frequency_factor = false;  ///< multiply by f / f_ref, f_ref the lowest center
};

/// I(f) = scale * sum_j w_j g_j / (delta_j^2 + g_j^2), delta_j = (f_j - f) in GHz.
/// The grid must increase strictly and cover every center +- 10 half-widths.
Spectrum sample_spectrum(std::span<const SpectrumLine> lines, std::span<const double> grid_thz,
                         const SampleOptions& opts = {});

/// Uniform background grid plus dense points within +-12 half-widths of
/// each line.
std::vector<double> adaptive_grid(std::span<const SpectrumLine> lines, int background = 2000,
                                  int per_line = 401);

}  // namespace frohlich::spectra
