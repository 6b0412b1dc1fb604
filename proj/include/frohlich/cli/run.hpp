#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "frohlich/error.hpp"

namespace frohlich::cli {

/// Process exit status for each error category; 0 is success, 1 an internal error.
int exit_code(ErrorCategory c) noexcept;

/// Entry point of the `frohlich` tool. `args` excludes the program name.
/// Errors are reported on `err` as one JSON object and mapped to exit_code().
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace frohlich::cli
