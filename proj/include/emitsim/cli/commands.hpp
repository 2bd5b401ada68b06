#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace emitsim::cli {

enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_numeric = 3 };

struct CommandOptions {
  std::filesystem::path config;
  std::filesystem::path out;
  int threads = 1;
  /// Eigendecomposition cache directory; falls back to EMITSIM_CACHE_DIR.
  std::optional<std::filesystem::path> cache;
};

/// Runs experiment `name` ("exact1d", "box3d", "kicks", "two-atom"): reads
/// the config, writes CSVs and manifest.json into options.out and returns an
/// exit code. Diagnostics go to `log`, errors to `err`.
int run_command(const std::string& name, const CommandOptions& options, std::ostream& log,
                std::ostream& err);

} // namespace emitsim::cli
