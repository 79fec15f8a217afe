#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sdnmob/address.hpp"
#include "sdnmob/flow_table.hpp"
#include "sdnmob/sim_time.hpp"
#include "sdnmob/tap_server.hpp"

namespace sdnmob {

enum class MobilityMode : std::uint8_t {
  Sdn,   // vpIP translation on the core router
  Pmip,  // MAG -> LMA tunneling baseline
  Plain, // no mobility support; the server sees rIPs directly
};

std::string_view to_string(MobilityMode m) noexcept;

struct LinkConfig {
  std::uint64_t bandwidth_bps = 10'000'000;
  SimDuration delay{0};

  bool operator==(const LinkConfig&) const = default;
};

struct TopologyConfig {
  std::vector<ZoneConfig> zones;
  // client <-> distribution router, one segment per zone
  LinkConfig access{10'000'000, std::chrono::milliseconds(1)};
  // distribution router <-> core router (the MAG-LMA segment in the baseline)
  LinkConfig distribution{10'000'000, std::chrono::milliseconds(2)};
  // core router <-> external server
  LinkConfig external{10'000'000, std::chrono::milliseconds(5)};
  // One way latency of every control message (TS->CCR, CCR->CR, CR->CCR).
  SimDuration control_delay = std::chrono::milliseconds(5);

  Ipv4Range vpip_pool = Ipv4Range::parse("198.51.100.0/24");
  std::uint64_t seed = 1;

  Ipv4Address server_ip = Ipv4Address(203, 0, 113, 10);
  MacAddress client_mac = MacAddress::from_u64(0xaabbcc000001ull);
  // Zone the client attaches to at t = 0; empty means the first zone.
  std::string initial_zone;

  SimDuration idle_timeout = kDefaultIdleTimeout;
  SimDuration keepalive_interval = std::chrono::seconds(300);
  double liveness_factor = 2.5;

  std::uint32_t header_bytes = 40;
  std::uint32_t send_window = 64;
  std::size_t packet_in_buffer = 64;
  SimDuration packet_in_timeout = std::chrono::seconds(2);
  SimDuration flow_sweep_interval = std::chrono::seconds(1);
  SimDuration throughput_window = std::chrono::milliseconds(100);

  SimDuration liveness_window() const {
    return SimDuration(static_cast<std::int64_t>(static_cast<double>(keepalive_interval.count()) *
                                                 liveness_factor));
  }
  std::size_t zone_index(std::string_view zone_id) const;  // throws ScenarioError
  const std::string& initial_zone_id() const;

  // Throws ScenarioError describing the first violated invariant.
  void validate() const;

  bool operator==(const TopologyConfig&) const = default;
};

// Two zones (10.1.0.0/24, 10.2.0.0/24) with every other field at its default.
TopologyConfig default_topology();

struct TunnelConfig {
  std::uint32_t encap_overhead_bytes = 40;
  // MAG <-> LMA signaling on attach (PBU out, PBA back).
  SimDuration binding_update_delay = std::chrono::milliseconds(10);

  static TunnelConfig defaults_for(const TopologyConfig& topo) {
    return TunnelConfig{40, 2 * topo.control_delay};
  }
  // A zero-overhead tunnel is a degenerate baseline the simulator accepts, but
  // configuration files must declare a real outer header.
  void validate(bool allow_zero_overhead = false) const;

  bool operator==(const TunnelConfig&) const = default;
};

struct ScenarioEvent {
  enum class Kind : std::uint8_t { MoveClient, StartEcho, StartBulkTransfer, Stop };

  SimTime at{0};
  Kind kind = Kind::Stop;
  std::string zone_id;            // MoveClient
  SimDuration interval{0};        // StartEcho
  std::uint32_t payload_len = 0;  // StartEcho, StartBulkTransfer
  std::uint64_t total_bytes = 0;  // StartBulkTransfer

  static ScenarioEvent move_client(SimTime at, std::string zone);
  static ScenarioEvent start_echo(SimTime at, SimDuration interval, std::uint32_t payload);
  static ScenarioEvent start_bulk(SimTime at, std::uint64_t total_bytes, std::uint32_t payload);
  static ScenarioEvent stop(SimTime at);

  bool operator==(const ScenarioEvent&) const = default;
};

std::string_view to_string(ScenarioEvent::Kind k) noexcept;

// Sorted times, known zones, no move into the current zone, no two moves at
// one instant, a single traffic source, echo traffic terminated by Stop.
void validate_events(const TopologyConfig& topo, const std::vector<ScenarioEvent>& events);

}  // namespace sdnmob
