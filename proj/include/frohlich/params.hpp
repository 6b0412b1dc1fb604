#pragma once

#include <optional>
#include <string_view>
#include <vector>

namespace frohlich {

// Units used throughout: rates in GHz (1/ns), frequencies in THz (ordinary
// frequency, not angular), time in ns.

namespace constants {
inline constexpr double planck_h = 6.62607015e-34;   // J s
inline constexpr double boltzmann_k = 1.380649e-23;  // J/K
}  // namespace constants

enum class SpectrumKind {
  flat,    // every bath Planck factor replaced by nbar
  linear,  // evenly spaced mode frequencies between omega_min and omega_max
};

std::string_view to_string(SpectrumKind kind) noexcept;
SpectrumKind parse_spectrum_kind(std::string_view text);

struct ModeSpectrum {
  SpectrumKind kind = SpectrumKind::flat;
  double omega_min_thz = 0.0;
  double omega_max_thz = 0.0;
};

/// Physical inputs of the driven-dissipative multimode model.
struct ModelParams {
  double r = 0.0;      ///< pump rate (GHz)
  double phi = 0.0;    ///< one-phonon dissipation rate (GHz)
  double chi = 0.0;    ///< two-phonon redistribution rate (GHz)
  int D = 1;           ///< number of excited modes; D+1 modes in total
  double f0_thz = 0.0; ///< lowest mode frequency
  double nbar = 0.0;   ///< bath occupation at f0
  /// Bath temperature, when the occupation was derived from one.
  std::optional<double> temperature_k;
  ModeSpectrum spectrum;

  /// Throws RangeError when an invariant is violated.
  void validate() const;
};

/// Rate constants every other module consumes.
struct DerivedRates {
  double N = 0.0;    ///< stationary total phonon number
  double Nr = 0.0;   ///< pump contribution (D+1) r / phi
  double Nth = 0.0;  ///< thermal contribution (D+1) nbar
  double rc = 0.0;   ///< condensation threshold; +inf when chi == 0
  double X = 0.0;    ///< gain intercept of the detailed-balance ratio
  double Y = 0.0;    ///< loss intercept
  double alpha = 0.0;
  double beta = 0.0;
  double a = 0.0;    ///< laser-equation gain scale (D+1) chi / phi
  double b = 0.0;    ///< laser-equation seeding factor
  double gain = 0.0; ///< a (r - rc), evaluated without the rc pole: chi (Nr - 1) - phi

  bool has_threshold() const noexcept { return alpha > beta; }
};

/// Bose-Einstein occupation 1/(exp(h f / k T) - 1). Throws DomainError for
/// non-positive inputs.
double planck_occupation(double frequency_thz, double temperature_k);

/// Temperature at which planck_occupation(frequency, T) == nbar.
double temperature_for_occupation(double frequency_thz, double nbar);

/// Bath temperature used for mode-resolved Boltzmann factors.
double bath_temperature(const ModelParams& p);

DerivedRates derive_rates(const ModelParams& p);

/// Mode frequencies f_0..f_D. For the flat spectrum every entry is f0.
std::vector<double> mode_frequencies(const ModelParams& p);

/// Named parameter sets: "bsa-280", "bsa-34", "lysozyme".
ModelParams preset(std::string_view name);
std::vector<std::string_view> preset_names();

}  // namespace frohlich
