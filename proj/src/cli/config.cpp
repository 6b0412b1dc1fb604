#include "frohlich/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "frohlich/error.hpp"

namespace frohlich::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool known_key(std::string_view key) {
  return std::find(kParamKeys.begin(), kParamKeys.end(), key) != kParamKeys.end();
}

std::string round_trip(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double parse_double(std::string_view key, std::string_view text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v))
    throw ConfigError("value of '" + std::string(key) + "' is not a number: '" + std::string(text) + "'");
  return v;
}

long long parse_integer(std::string_view key, std::string_view text) {
  long long v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end)
    throw ConfigError("value of '" + std::string(key) + "' is not an integer: '" + std::string(text) + "'");
  return v;
}

KeyValues parse_config_text(std::string_view text, std::string_view source) {
  KeyValues kv;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto where = std::string(source) + ":" + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected key=value");
    const auto key = std::string(trim(line.substr(0, eq)));
    const auto value = std::string(trim(line.substr(eq + 1)));
    if (!known_key(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    if (value.empty()) throw ConfigError(where + ": empty value for '" + key + "'");
    if (!kv.emplace(key, value).second) throw ConfigError(where + ": repeated key '" + key + "'");
  }
  return kv;
}

KeyValues read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string());
}

KeyValues describe(const ModelParams& p) {
  KeyValues kv;
  kv["r_ghz"] = round_trip(p.r);
  kv["phi_ghz"] = round_trip(p.phi);
  kv["chi_ghz"] = round_trip(p.chi);
  kv["D"] = std::to_string(p.D);
  kv["f0_thz"] = round_trip(p.f0_thz);
  if (p.temperature_k)
    kv["temperature_k"] = round_trip(*p.temperature_k);
  else
    kv["nbar"] = round_trip(p.nbar);
  kv["spectrum_kind"] = std::string(to_string(p.spectrum.kind));
  kv["fmax_thz"] = round_trip(p.spectrum.omega_max_thz);
  return kv;
}

KeyValues preset_values(std::string_view name) { return describe(preset(name)); }

KeyValues merge_layers(std::initializer_list<const KeyValues*> layers) {
  KeyValues out;
  for (const KeyValues* layer : layers) {
    if (!layer) continue;
    const bool has_nbar = layer->count("nbar") > 0;
    const bool has_t = layer->count("temperature_k") > 0;
    if (has_nbar && has_t) throw ConfigError("set either nbar or temperature_k, not both");
    if (has_nbar) out.erase("temperature_k");
    if (has_t) out.erase("nbar");
    for (const auto& [k, v] : *layer) out[k] = v;
  }
  return out;
}

ModelParams to_params(const KeyValues& kv) {
  auto get = [&](std::string_view key) -> const std::string& {
    const auto it = kv.find(std::string(key));
    if (it == kv.end()) throw MissingParameterError("missing parameter '" + std::string(key) + "'");
    return it->second;
  };
  ModelParams p;
  p.r = parse_double("r_ghz", get("r_ghz"));
  p.phi = parse_double("phi_ghz", get("phi_ghz"));
  p.chi = parse_double("chi_ghz", get("chi_ghz"));
  const long long D = parse_integer("D", get("D"));
  if (D < 1 || D > 1'000'000) throw RangeError("D must lie in [1, 1000000]");
  p.D = static_cast<int>(D);
  p.f0_thz = parse_double("f0_thz", get("f0_thz"));
  if (kv.count("temperature_k")) {
    p.temperature_k = parse_double("temperature_k", kv.at("temperature_k"));
    if (!(*p.temperature_k > 0.0)) throw RangeError("temperature_k must be > 0");
    if (!(p.f0_thz > 0.0)) throw RangeError("f0_thz must be > 0");
    p.nbar = planck_occupation(p.f0_thz, *p.temperature_k);
  } else if (kv.count("nbar")) {
    p.nbar = parse_double("nbar", kv.at("nbar"));
  } else {
    throw MissingParameterError("missing parameter 'nbar' (or 'temperature_k')");
  }
  try {
    p.spectrum.kind = parse_spectrum_kind(kv.count("spectrum_kind") ? kv.at("spectrum_kind") : "flat");
  } catch (const UsageError& e) {
    throw ConfigError(e.what());
  }
  p.spectrum.omega_min_thz = p.f0_thz;
  if (p.spectrum.kind == SpectrumKind::linear)
    p.spectrum.omega_max_thz = parse_double("fmax_thz", get("fmax_thz"));
  else
    p.spectrum.omega_max_thz =
        kv.count("fmax_thz") ? parse_double("fmax_thz", kv.at("fmax_thz")) : p.f0_thz;
  p.validate();
  return p;
}

}  // namespace frohlich::cli
