#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nhb::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_numeric = 3;
inline constexpr int exit_io = 4;

/// Environment variable naming the default output directory.
inline constexpr const char* output_dir_env = "NHB_OUTPUT_DIR";

/// Grid from "start:stop[:step]" (default step 0.1) or a single value.
/// Throws ConfigError on malformed text or a non-positive step.
std::vector<double> parse_range(const std::string& text);

/// Runs one subcommand. `args` excludes the program name. Returns the exit
/// code; diagnostics go to `err`, short summaries to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nhb::cli
