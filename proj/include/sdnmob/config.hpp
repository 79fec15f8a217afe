#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdnmob/scenario.hpp"

namespace sdnmob {

enum class RunMode : std::uint8_t { Sdn, Pmip, Both };

std::string_view to_string(RunMode m) noexcept;
// "sdn", "pmip" or "both"; nullopt otherwise.
std::optional<RunMode> parse_run_mode(std::string_view text) noexcept;

struct RunConfig {
  TopologyConfig topology;
  std::vector<ScenarioEvent> events;
  RunMode mode = RunMode::Sdn;
  // Required for Pmip and Both.
  std::optional<TunnelConfig> tunnel;
  std::string output_dir = "out";

  bool operator==(const RunConfig&) const = default;
};

// Sectioned key = value text:
//
//   [topology]   scalar settings (seed, delays, pools, timers)
//   [zones]      zone1 = 10.1.0.0/24, dhcp_latency_ms=100, tap_filter=all
//   [events]     10.0 move zone2 / 1.0 start_echo interval_ms=20 payload_bytes=64
//                / 2.0 start_bulk total_bytes=1000000 payload_bytes=1460 / 30 stop
//   [tunnel]     encap_overhead_bytes, binding_update_delay_ms
//   [run]        mode, output_dir
//
// '#' and ';' start comments. Every check runs at load time; failures throw
// ConfigError carrying the file name and line.
RunConfig load_config(const std::string& path);
RunConfig parse_config(std::string_view text, const std::string& source_name = "<config>");

// Emits every field explicitly; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& cfg);

// Throws ConfigError (line 0) if mode needs a tunnel and none is present.
void check_run_config(const RunConfig& cfg, const std::string& source_name = "<config>");

}  // namespace sdnmob
