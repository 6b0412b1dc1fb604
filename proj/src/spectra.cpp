#include "frohlich/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "frohlich/error.hpp"
#include "frohlich/kernels.hpp"
#include "frohlich/masterq.hpp"

namespace frohlich::spectra {

namespace {
constexpr double kGhzInThz = 1e-3;
}

OccupationModel parse_occupation_model(std::string_view label) {
  if (label == "flat") return OccupationModel::flat;
  if (label == "boltzmann") return OccupationModel::boltzmann;
  throw UsageError("unknown occupation model '" + std::string(label) + "' (expected flat|boltzmann)");
}

std::string_view to_string(OccupationModel m) noexcept {
  return m == OccupationModel::flat ? "flat" : "boltzmann";
}

std::vector<SpectrumLine> build_lines(const ModelParams& p, const LineOptions& opts) {
  if (p.spectrum.kind != SpectrumKind::linear)
    throw UsageError("spectrum lines need distinct centers: use spectrum_kind = linear");
  const std::size_t m = static_cast<std::size_t>(p.D) + 1;
  if (!opts.dipoles.empty() && opts.dipoles.size() != m)
    throw UsageError("dipoles must list one value per mode (D+1)");
  ModelParams kinetic = p;
  if (opts.occupations == OccupationModel::flat) kinetic.spectrum.kind = SpectrumKind::flat;
  const auto steady =
      meanfield::relax_to_steady_state(kinetic, meanfield::thermal_state(kinetic), opts.relax);
  const auto f = mode_frequencies(p);
  std::vector<SpectrumLine> lines(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double nj = steady.state.n[j];
    const double mu = opts.dipoles.empty() ? 1.0 : opts.dipoles[j];
    lines[j].center_thz = f[j];
    lines[j].half_width_ghz = masterq::coherence_coefficients(p, nj).gamma;
    lines[j].weight = nj * mu * mu;
  }
  return lines;
}

Spectrum sample_spectrum(std::span<const SpectrumLine> lines, std::span<const double> grid_thz,
                         const SampleOptions& opts) {
  if (lines.empty()) throw UsageError("no spectrum lines");
  if (grid_thz.size() < 2) throw UsageError("spectrum grid needs at least 2 points");
  for (std::size_t i = 1; i < grid_thz.size(); ++i)
    if (!(grid_thz[i] > grid_thz[i - 1])) throw UsageError("spectrum grid must be strictly increasing");
  double f_ref = lines.front().center_thz;
  for (const auto& l : lines) {
    if (!(l.half_width_ghz > 0.0) || !(l.weight >= 0.0))
      throw UsageError("lines need half_width > 0 and weight >= 0");
    const double reach = 10.0 * l.half_width_ghz * kGhzInThz;
    if (grid_thz.front() > l.center_thz - reach || grid_thz.back() < l.center_thz + reach)
      throw UsageError("grid does not cover every line center +- 10 half-widths");
    f_ref = std::min(f_ref, l.center_thz);
  }

  std::vector<kernels::Lorentzian> k(lines.size());
  for (std::size_t j = 0; j < lines.size(); ++j)
    k[j] = {lines[j].center_thz, lines[j].half_width_ghz, lines[j].weight};
  Spectrum s;
  s.frequencies_thz.assign(grid_thz.begin(), grid_thz.end());
  s.intensities.resize(grid_thz.size());
  kernels::lorentzian_sum_parallel(k, kGhzInThz, grid_thz, s.intensities);
  for (std::size_t i = 0; i < s.intensities.size(); ++i) {
    s.intensities[i] *= opts.scale;
    if (opts.frequency_factor) s.intensities[i] *= grid_thz[i] / f_ref;
  }
  s.lines.assign(lines.begin(), lines.end());
  return s;
}

std::vector<double> adaptive_grid(std::span<const SpectrumLine> lines, int background,
                                  int per_line) {
  if (lines.empty()) throw UsageError("no spectrum lines");
  if (background < 2 || per_line < 3) throw UsageError("grid sizes too small");
  double lo = lines.front().center_thz, hi = lo;
  for (const auto& l : lines) {
    const double reach = 12.0 * l.half_width_ghz * kGhzInThz;
    lo = std::min(lo, l.center_thz - reach);
    hi = std::max(hi, l.center_thz + reach);
  }
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(background + per_line * static_cast<int>(lines.size())));
  for (int i = 0; i < background; ++i) grid.push_back(lo + (hi - lo) * i / (background - 1));
  for (const auto& l : lines) {
    const double reach = 12.0 * l.half_width_ghz * kGhzInThz;
    for (int i = 0; i < per_line; ++i)
      grid.push_back(l.center_thz - reach + 2.0 * reach * i / (per_line - 1));
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [](double a, double b) { return std::abs(b - a) <= 1e-15 * std::abs(a); }),
             grid.end());
  return grid;
}

}  // namespace frohlich::spectra
