#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ldsmdl::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kGenerationError = 3,
  kFitError = 4,
  kIoError = 5,
};

/// Environment variable that overrides --seed when set.
inline constexpr const char* kSeedEnv = "LDSMDL_SEED";

/// Runs the command line `args` (without the program name). Chosen orders and
/// tables go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Path of the manifest written next to a primary output file.
std::string manifest_path(const std::string& primary_output);

}  // namespace ldsmdl::cli
