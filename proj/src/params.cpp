#include "frohlich/params.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "frohlich/error.hpp"

namespace frohlich {

std::string_view category_name(ErrorCategory c) noexcept {
  switch (c) {
    case ErrorCategory::usage: return "usage-error";
    case ErrorCategory::domain: return "domain-error";
    case ErrorCategory::config: return "config-error";
    case ErrorCategory::missing_parameter: return "missing-parameter";
    case ErrorCategory::range: return "range-error";
    case ErrorCategory::io: return "io-error";
  }
  return "unknown";
}

std::string_view to_string(SpectrumKind kind) noexcept {
  return kind == SpectrumKind::flat ? "flat" : "linear";
}

SpectrumKind parse_spectrum_kind(std::string_view text) {
  if (text == "flat" || text == "flat-approximation") return SpectrumKind::flat;
  if (text == "linear") return SpectrumKind::linear;
  throw UsageError("unknown spectrum kind '" + std::string(text) + "' (expected flat|linear)");
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw RangeError(what);
}

}  // namespace

void ModelParams::validate() const {
  require(std::isfinite(r) && r >= 0.0, "r_ghz must be >= 0");
  require(std::isfinite(phi) && phi > 0.0, "phi_ghz must be > 0");
  require(std::isfinite(chi) && chi >= 0.0, "chi_ghz must be >= 0");
  require(D >= 1, "D must be >= 1");
  require(std::isfinite(f0_thz) && f0_thz > 0.0, "f0_thz must be > 0");
  require(std::isfinite(nbar) && nbar >= 0.0, "nbar must be >= 0");
  if (temperature_k) require(*temperature_k > 0.0, "temperature_k must be > 0");
  if (spectrum.kind == SpectrumKind::linear) {
    require(std::abs(spectrum.omega_min_thz - f0_thz) <= 1e-12 * f0_thz,
            "spectrum omega_min must equal f0_thz");
    require(spectrum.omega_max_thz >= spectrum.omega_min_thz,
            "fmax_thz must be >= f0_thz");
  }
}

double planck_occupation(double frequency_thz, double temperature_k) {
  if (!(frequency_thz > 0.0) || !(temperature_k > 0.0))
    throw DomainError("planck_occupation needs positive frequency and temperature");
  const double x = constants::planck_h * frequency_thz * 1e12 /
                   (constants::boltzmann_k * temperature_k);
  return 1.0 / std::expm1(x);
}

double temperature_for_occupation(double frequency_thz, double nbar) {
  if (!(frequency_thz > 0.0) || !(nbar > 0.0))
    throw DomainError("temperature_for_occupation needs positive frequency and occupation");
  const double hf_over_k = constants::planck_h * frequency_thz * 1e12 / constants::boltzmann_k;
  return hf_over_k / std::log1p(1.0 / nbar);
}

double bath_temperature(const ModelParams& p) {
  if (p.temperature_k) return *p.temperature_k;
  if (p.nbar <= 0.0) return 0.0;
  return temperature_for_occupation(p.f0_thz, p.nbar);
}

DerivedRates derive_rates(const ModelParams& p) {
  p.validate();
  DerivedRates d;
  const double modes = p.D + 1.0;
  d.Nr = modes * p.r / p.phi;
  d.Nth = modes * p.nbar;
  d.N = d.Nr + d.Nth;
  d.rc = p.chi > 0.0 ? p.phi / modes * (1.0 + p.phi / p.chi)
                     : std::numeric_limits<double>::infinity();
  d.alpha = p.chi * (p.nbar + 1.0);
  d.beta = p.chi * p.nbar;
  d.X = p.r + p.phi * p.nbar + d.alpha * (d.N + 1.0);
  d.Y = p.r + p.phi * (p.nbar + 1.0) + d.beta * (d.N + p.D);
  d.a = modes * p.chi / p.phi;
  d.b = 1.0 + modes * (p.nbar + 1.0) * p.chi / p.phi;
  d.gain = p.chi * (d.Nr - 1.0) - p.phi;
  return d;
}

std::vector<double> mode_frequencies(const ModelParams& p) {
  std::vector<double> f(static_cast<std::size_t>(p.D) + 1, p.f0_thz);
  if (p.spectrum.kind == SpectrumKind::linear) {
    const double step = (p.spectrum.omega_max_thz - p.spectrum.omega_min_thz) / p.D;
    for (int l = 0; l <= p.D; ++l) f[l] = p.spectrum.omega_min_thz + l * step;
  }
  return f;
}

ModelParams preset(std::string_view name) {
  ModelParams p;
  p.phi = 6.0;
  p.chi = 0.07;
  p.D = 200;
  p.f0_thz = 0.314;
  p.spectrum = {SpectrumKind::flat, p.f0_thz, 1.0};
  if (name == "bsa-280") {
    p.r = 220.0;
    p.nbar = 16.0;
  } else if (name == "bsa-34") {
    p.r = 105.0;
    p.nbar = 1.5;
  } else if (name == "lysozyme") {
    p.r = 16.0;
    p.phi = 1.0;
    p.f0_thz = 0.4;
    p.temperature_k = 280.0;
    p.nbar = planck_occupation(p.f0_thz, *p.temperature_k);
    p.spectrum = {SpectrumKind::flat, p.f0_thz, 1.2};
  } else {
    throw UsageError("unknown preset '" + std::string(name) + "'");
  }
  return p;
}

std::vector<std::string_view> preset_names() { return {"bsa-280", "bsa-34", "lysozyme"}; }

}  // namespace frohlich
