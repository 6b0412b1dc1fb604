#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "frohlich/params.hpp"

namespace frohlich::cli {

/// Parameter keys accepted in config files and as --key flags.
inline constexpr std::array<std::string_view, 9> kParamKeys = {
    "r_ghz", "phi_ghz", "chi_ghz", "D", "f0_thz", "nbar", "temperature_k", "spectrum_kind",
    "fmax_thz"};

using KeyValues = std::map<std::string, std::string>;

/// key=value lines; '#' starts a comment. Unknown keys, malformed lines and
/// repeated keys are config errors.
KeyValues parse_config_text(std::string_view text, std::string_view source = "<config>");
KeyValues read_config_file(const std::filesystem::path& path);

/// Preset as key/values (temperature_k instead of nbar when the preset pins T).
KeyValues preset_values(std::string_view name);

/// Layers are applied in order (later wins). Setting nbar in a layer drops a
/// temperature_k from earlier layers and vice versa; one layer may not set both.
KeyValues merge_layers(std::initializer_list<const KeyValues*> layers);

/// Full parameter set; MissingParameterError names the first absent key.
ModelParams to_params(const KeyValues& kv);

/// Resolved values at round-trip precision, suitable for replay.
KeyValues describe(const ModelParams& p);

double parse_double(std::string_view key, std::string_view text);
long long parse_integer(std::string_view key, std::string_view text);

}  // namespace frohlich::cli
