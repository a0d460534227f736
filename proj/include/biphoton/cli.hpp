#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "biphoton/config.hpp"

namespace biphoton::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

// Files (name relative to the output directory, content) plus the text summary.
struct ScenarioOutput {
  std::vector<std::pair<std::string, std::string>> files;
  std::string summary;
};

// The experiments behind each subcommand. Pure: nothing touches the filesystem.
ScenarioOutput g2_curves(const ScenarioConfig& cfg);
ScenarioOutput plate_surface(const ScenarioConfig& cfg);
ScenarioOutput bell_postselect(const ScenarioConfig& cfg);
ScenarioOutput drift_series(const ScenarioConfig& cfg);
ScenarioOutput histogram(const ScenarioConfig& cfg);

// Builds the config from an optional file, the seed from the environment and
// "--section.key=value" overrides (later sources win).
ScenarioConfig load_scenario(const std::optional<std::string>& config_path,
                             const std::vector<std::string>& overrides,
                             const std::optional<std::string>& env_seed);

// Command-line entry point. Returns one of the kExit* codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
        const std::optional<std::string>& env_seed);

}  // namespace biphoton::cli
