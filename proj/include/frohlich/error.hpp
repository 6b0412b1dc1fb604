#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace frohlich {

/// Machine-readable failure class. The CLI maps each to a distinct exit code.
enum class ErrorCategory {
  usage,             // caller passed something the operation does not accept
  domain,            // mathematically undefined for these inputs
  config,            // malformed or unknown configuration entry
  missing_parameter, // a required parameter was never set
  range,             // parameter outside its physical range
  io,
};

std::string_view category_name(ErrorCategory c) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

struct UsageError : Error {
  explicit UsageError(const std::string& what) : Error(ErrorCategory::usage, what) {}
};

struct DomainError : Error {
  explicit DomainError(const std::string& what) : Error(ErrorCategory::domain, what) {}
};

struct RangeError : Error {
  explicit RangeError(const std::string& what) : Error(ErrorCategory::range, what) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::config, what) {}
};

struct MissingParameterError : Error {
  explicit MissingParameterError(const std::string& what)
      : Error(ErrorCategory::missing_parameter, what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

}  // namespace frohlich
