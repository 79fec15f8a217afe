#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdnmob/address.hpp"
#include "sdnmob/controller.hpp"
#include "sdnmob/flow_table.hpp"
#include "sdnmob/metrics.hpp"
#include "sdnmob/scenario.hpp"
#include "sdnmob/sim_time.hpp"
#include "sdnmob/tap_server.hpp"

namespace sdnmob {

// The three-tier topology: one core router with its controller, one
// distribution router (plus tap server in SDN mode) per zone, one external
// server and a single mobile client.
//
// Sdn mode translates rIP <-> vpIP on the core router. Pmip mode replaces the
// core with an LMA and the distribution routers with MAGs that tunnel client
// traffic. Plain mode routes rIPs unchanged, so every handoff resets the
// connection.
class Network {
 public:
  explicit Network(TopologyConfig cfg, MobilityMode mode = MobilityMode::Sdn,
                   std::optional<TunnelConfig> tunnel = std::nullopt);
  ~Network();
  Network(Network&&) noexcept;
  Network& operator=(Network&&) noexcept;
  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  std::size_t zone_count() const noexcept;
  std::size_t distribution_router_count() const noexcept;
  std::size_t tap_server_count() const noexcept;
  std::size_t core_router_count() const noexcept { return 1; }
  std::size_t server_count() const noexcept { return 1; }
  MobilityMode mode() const noexcept;
  const TopologyConfig& config() const noexcept;
  const TunnelConfig* tunnel() const noexcept;

  // Validates and queues the scenario. May be called once.
  void schedule(const std::vector<ScenarioEvent>& events);
  // Runs to quiescence; periodic timers alone do not keep the run going.
  void run();
  void run_until(SimTime t);
  SimTime now() const noexcept;

  // Detaches the client now and attaches it to `zone_id`. Throws
  // ScenarioError for unknown zones and for the current zone.
  void move_client(std::string_view zone_id);

  // The client's source address; nullopt while detached or waiting for DHCP.
  std::optional<Ipv4Address> client_address() const;
  const std::string& client_zone() const;
  bool client_bound() const noexcept;
  // Connection still open on both ends.
  bool connection_alive() const noexcept;

  // Sdn mode only; nullptr otherwise.
  const MobilityService* controller() const noexcept;
  // Sdn and Plain modes; nullptr under Pmip.
  const CoreSwitch* core_switch() const noexcept;
  // Sdn mode only.
  const TapServer* tap_server(std::size_t zone_index) const;
  // Pmip mode only: the stable home address handed out by the LMA.
  std::optional<Ipv4Address> pmip_home_address() const;

  // Snapshot of the metrics so far; final once run() returns.
  MetricsTrace trace() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Validates the topology and builds it in SDN mode. Throws ScenarioError.
Network build_topology(const TopologyConfig& cfg);

MetricsTrace run_scenario(const TopologyConfig& cfg, const std::vector<ScenarioEvent>& events,
                          MobilityMode mode = MobilityMode::Sdn);
MetricsTrace run_pmip_baseline(const TopologyConfig& cfg, const std::vector<ScenarioEvent>& events,
                               const TunnelConfig& tunnel);

}  // namespace sdnmob
