#pragma once

// Command-line front end. `run` parses argv-style arguments, dispatches to one
// subcommand and returns the process exit status:
//   0 success, 1 numerical/IO failure or failed reproduction check, 2 usage.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace upconv::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_usage = 2;

// Relative output paths are resolved against this directory when set.
inline constexpr const char* output_dir_env = "UPCONV_OUTPUT_DIR";

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::filesystem::path resolve_output(const std::string& path);

struct ReproduceOptions {
  std::uint64_t seed = 0;
  double kappa_scale = 1.0;
  std::string out;  // optional JSON bundle
};

// Runs the reference configurations, compares each result with its stored
// expected value and tolerance, and prints a pass/fail table.
// Returns true when all checks pass.
bool reproduce_reference(const ReproduceOptions& options, std::ostream& out);

}  // namespace upconv::cli
