#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qcsim/config.hpp"

namespace qcsim {

/// Process exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitIo = 1,
  kExitConfig = 2,
  kExitGate = 3,
  kExitNumerical = 4,
};

struct RunOptions {
  bool override_gate = false;
  std::vector<std::pair<std::string, std::string>> overrides;  ///< `--set key=value`
  std::optional<std::filesystem::path> out_dir;                 ///< replaces output.directory
};

/// Environment variable naming the root for relative output directories.
inline constexpr const char* kOutputRootEnv = "QCSIM_OUTPUT_ROOT";

std::filesystem::path resolve_output_dir(const std::string& directory);

/// Gate for a configured run: theorem hypotheses, or energy admissibility
/// when run.gate = energy (the gyro smallness condition applies in both).
GateReport evaluate_gate(const RunConfig& cfg, const Grid& grid, const FieldState& s0);

/// Runs a parsed configuration and writes the output bundle into out_dir.
/// `log` receives a human-readable progress summary.
int simulate(const RunConfig& cfg, const std::filesystem::path& out_dir, bool override_gate, std::ostream& log);

int simulate_file(const std::filesystem::path& config_path, const RunOptions& opts, std::ostream& log);
int validate_file(const std::filesystem::path& config_path, const RunOptions& opts, std::ostream& log);

const std::vector<std::string>& scenario_names();
/// Preset configuration text; std::nullopt for an unknown name.
std::optional<std::string> scenario_config_text(const std::string& name);
int run_scenario(const std::string& name, const RunOptions& opts, std::ostream& log);

}  // namespace qcsim
