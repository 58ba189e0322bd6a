#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "sisde/cli/config.hpp"

namespace sisde::cli {

enum ExitCode : int {
  kOk = 0,
  kCompareFailed = 1,
  kConfigError = 2,
  kAssumptionViolation = 3,
  kNumericalFailure = 4,
};

struct RunFlags {
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  std::optional<std::filesystem::path> out;
};

/// Names accepted by run_subcommand.
bool known_subcommand(std::string_view name);

/// Runs one subcommand and writes its artifacts plus manifest.cfg into the
/// output directory. Returns the exit code; errors are mapped, never thrown.
/// Only compare writes to `out`; diagnostics go to `err`.
int run_subcommand(std::string_view name, const std::string& config_text, const RunFlags& flags,
                   std::ostream& out, std::ostream& err);

}  // namespace sisde::cli
