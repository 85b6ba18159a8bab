#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cenn::cli {

inline constexpr const char* engine_version = "0.1.0";

/// Runs one subcommand. args excludes the program name. Writes a JSON document
/// {"manifest": …, "result": …} to `out`, error JSON to `err`.
/// Returns 0 on success, 1 when a check is violated, 2 on malformed input.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cenn::cli
