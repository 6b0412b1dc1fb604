#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace frohlich::cli {

using json = nlohmann::ordered_json;

/// %.12g; NaN and infinities as "nan", "inf", "-inf".
std::string format_number(double v);

/// Value rounded to 12 significant digits, or null when not finite.
json number(double v);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::string to_csv() const;  ///< header row, comma separated, LF endings
  json to_json() const;        ///< {"columns": [...], "rows": [[...], ...]}
};

/// Writes `content` to dir/name, creating dir. Throws IoError.
void write_file(const std::filesystem::path& dir, const std::string& name,
                const std::string& content);

}  // namespace frohlich::cli
