#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sdnmob/address.hpp"
#include "sdnmob/flow_table.hpp"
#include "sdnmob/packet.hpp"
#include "sdnmob/random.hpp"
#include "sdnmob/sim_time.hpp"

namespace sdnmob {

// Universal client identifier; MAC-style in practice.
using Uid = MacAddress;

struct MobilityRecord {
  Uid uid;
  Ipv4Address rip;
  Ipv4Address vpip;
  SimTime last_seen{0};

  bool operator==(const MobilityRecord&) const = default;
};

// Tap server -> controller message, "<uid>#<rIP>\n" on the wire.
struct HostReport {
  Uid uid;
  Ipv4Address rip;

  std::string serialize() const;
  // Accepts the line with or without its trailing newline. Requires exactly
  // one '#', a canonical lowercase uid and a dotted-quad address.
  static HostReport parse(std::string_view line);

  bool operator==(const HostReport&) const = default;
};

// Splits a byte stream from the control socket into reports.
class HostReportDecoder {
 public:
  // Returns every complete line in `bytes` (plus any carried-over prefix).
  std::vector<HostReport> feed(std::string_view bytes);
  bool has_partial() const noexcept { return !pending_.empty(); }

 private:
  std::string pending_;
};

// The (uid, rIP, vpIP) triplets, keyed by uid.
class MobilityServiceTable {
 public:
  const MobilityRecord* find(const Uid& uid) const;
  const MobilityRecord* find_by_rip(Ipv4Address rip) const;
  std::optional<MobilityRecord> lookup(const Uid& uid) const;

  void insert(MobilityRecord rec);
  void update_rip(const Uid& uid, Ipv4Address rip, SimTime now);
  void touch(const Uid& uid, SimTime now);
  std::optional<MobilityRecord> erase(const Uid& uid);

  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  const std::set<Ipv4Address>& used_vpips() const noexcept { return used_vpips_; }
  // Ordered by uid.
  std::vector<MobilityRecord> snapshot() const;

 private:
  std::map<Uid, MobilityRecord> records_;
  std::map<Ipv4Address, Uid> by_rip_;
  std::set<Ipv4Address> used_vpips_;
};

struct ControlAction {
  enum class Kind : std::uint8_t { InstallFlows, RefreshFlows, EvictClient };

  Kind kind = Kind::InstallFlows;
  Uid uid;
  // Record the action refers to, as of the moment it was emitted.
  MobilityRecord record;
  // Populated for InstallFlows only.
  std::optional<FlowRule> snat;
  std::optional<FlowRule> dnat;

  bool operator==(const ControlAction&) const = default;
};

std::string_view to_string(ControlAction::Kind kind) noexcept;

// Uniform over the pool's free addresses, in ascending address order, using
// one Rng::uniform_index draw. Throws ExhaustedError when nothing is free.
Ipv4Address allocate_vpip(const Ipv4Range& pool, const std::set<Ipv4Address>& used, Rng& rng);

struct MobilityServiceConfig {
  Ipv4Range vpip_pool = Ipv4Range::parse("198.51.100.0/24");
  SimDuration idle_timeout = kDefaultIdleTimeout;
  PortId external_port = kExternalPort;
};

// MobilityDiscovery plus MobilityServiceTable management on the core
// controller. One instance is a single serialized event handler.
class MobilityService {
 public:
  MobilityService(MobilityServiceConfig cfg, std::uint64_t seed);

  // New uid: allocate a vpIP and emit the sNAT/dNAT pair. Known uid with a new
  // rIP: move the record and emit a pair for the new rIP (vpIP unchanged; the
  // old flows are left to idle out). Same rIP: RefreshFlows. Throws
  // ControlError for rIPs inside the virtual pool.
  std::vector<ControlAction> handle_host_report(const HostReport& report, SimTime now);

  // Periodic keepalive from a tap server. Refreshes a matching record and
  // treats an unknown uid like a fresh report; a keepalive naming an rIP the
  // client no longer holds comes from a zone it has left and is ignored.
  std::vector<ControlAction> handle_keepalive(const HostReport& report, SimTime now);

  // Removes records silent for longer than `liveness_window`.
  std::vector<ControlAction> evict_stale(SimTime now, SimDuration liveness_window);

  // Repair path only: re-emits flows for a known client whose escalated packet
  // carries its current rIP. Discovery itself stays with the tap servers.
  std::vector<ControlAction> handle_packet_in(const Packet& pkt, SimTime now);

  std::optional<MobilityRecord> lookup(const Uid& uid) const { return mst_.lookup(uid); }
  const MobilityServiceTable& table() const noexcept { return mst_; }
  const MobilityServiceConfig& config() const noexcept { return cfg_; }

  ControlAction install_action(const MobilityRecord& rec) const;

 private:
  MobilityServiceConfig cfg_;
  MobilityServiceTable mst_;
  Rng rng_;
};

}  // namespace sdnmob
