#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "vibecheck/core.hpp"

namespace vibecheck::cli {

enum ExitCode : int {
  kOk = 0,
  kOtherError = 1,
  kConfigError = 2,
  kDataError = 3,
  kProviderError = 4,
  kQualityError = 5,
};

/// Sets one configuration entry. Keys use the flag spelling ("batch-size",
/// "judges") or the field spelling ("batch", "judge_models"). Throws
/// ConfigError for unknown keys and malformed values.
void set_config(RunConfig& config, std::string_view key, std::string_view value);

/// Applies a key=value file. Blank lines and lines starting with '#' are
/// skipped.
void apply_config_text(RunConfig& config, std::string_view text);
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

/// Reads fixed vibes for `score`: one "Name: Low: ...; High: ..." per line.
std::vector<Vibe> load_vibes(const std::filesystem::path& path);

/// Maps an exception to the process exit code.
int exit_code_for(const std::exception& e) noexcept;

/// Entry point for the vibecheck executable. argv[0] is the program name.
int run_command(int argc, const char* const* argv);
int run_command(const std::vector<std::string>& args);

}  // namespace vibecheck::cli
