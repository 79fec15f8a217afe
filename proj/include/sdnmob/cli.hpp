#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sdnmob/config.hpp"
#include "sdnmob/metrics.hpp"

namespace sdnmob {

inline constexpr const char* kOutputDirEnv = "SDNMOB_OUT_DIR";

// --out beats $SDNMOB_OUT_DIR beats the config's output_dir.
std::string resolve_output_dir(const RunConfig& cfg, const std::optional<std::string>& flag,
                               const char* env_value);

struct RunResult {
  std::vector<MetricsTrace> traces;
  std::optional<Comparison> comparison;
  std::vector<std::filesystem::path> artifacts;
};

// Executes the configured mode(s) and writes <mode>.csv, summary.txt and, for
// Both, comparison.csv into cfg.output_dir. Throws on any failure.
RunResult execute(const RunConfig& cfg);

// `sdnmob run <config> [--mode sdn|pmip|both] [--seed N] [--out DIR]`.
// Returns the process exit status.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sdnmob
