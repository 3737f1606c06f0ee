#pragma once

#include <string>
#include <utility>
#include <vector>

#include "loopmaps/config.hpp"

namespace loopmaps {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

struct CommandResult {
  /// {"command", "schema", "status", "passed", "setup", "checks", "info"} or, after a
  /// numerical failure, {"command", "schema", "status": "error", "error": {"type", "message"}}.
  io::Json report;
  /// File name and contents, written by the caller only once the command has finished.
  std::vector<std::pair<std::string, std::string>> files;
  int exit_code = kExitOk;
};

/// Runs one of run, uniton, gauss, dress, complete, verify. Field exports are
/// produced only when want_fields is set. ConfigError propagates; every other
/// library error is turned into an error report with kExitNumerical. A finished
/// command whose checks miss their thresholds also exits with kExitNumerical.
CommandResult run_command(const std::string& command, const ExperimentConfig& cfg, bool want_fields);

/// Report text: two-space indented JSON with sorted keys and a trailing newline.
std::string report_text(const io::Json& report);

}  // namespace loopmaps
