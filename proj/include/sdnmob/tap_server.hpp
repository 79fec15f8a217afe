#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sdnmob/address.hpp"
#include "sdnmob/controller.hpp"
#include "sdnmob/packet.hpp"
#include "sdnmob/sim_time.hpp"

namespace sdnmob {

enum class TapFilter : std::uint8_t { AllPackets, DhcpAndRsOnly };

struct ZoneConfig {
  std::string zone_id;
  Ipv4Range dhcp_range;
  SimDuration dhcp_latency = std::chrono::milliseconds(100);
  TapFilter tap_filter = TapFilter::AllPackets;

  bool operator==(const ZoneConfig&) const = default;
};

struct TimeBufferEntry {
  Ipv4Address rip;
  Uid uid;
  std::int64_t last_seen_ms = 0;
  // When this entry was last included in a keepalive round.
  std::int64_t last_reported_ms = 0;

  bool operator==(const TimeBufferEntry&) const = default;
};

// (rIP, time) pairs of the clients currently seen in one zone.
class TimeBuffer {
 public:
  const TimeBufferEntry* find(Ipv4Address rip) const;
  const TimeBufferEntry* find_uid(const Uid& uid) const;
  void upsert(Ipv4Address rip, const Uid& uid, std::int64_t now_ms);
  void refresh(Ipv4Address rip, std::int64_t now_ms);
  void erase(Ipv4Address rip);

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  // Ordered by rIP.
  const std::map<Ipv4Address, TimeBufferEntry>& entries() const noexcept { return entries_; }
  std::map<Ipv4Address, TimeBufferEntry>& mutable_entries() noexcept { return entries_; }

 private:
  std::map<Ipv4Address, TimeBufferEntry> entries_;
};

enum class TapVerdict : std::uint8_t {
  Ignored,         // filtered out by DhcpAndRsOnly
  DhcpInProgress,  // source 0.0.0.0
  Reported,        // new binding, report emitted
  Refreshed,       // known binding, timestamp updated
  Rejected,        // source outside the zone's DHCP range
};

struct TapCounters {
  std::uint64_t observed = 0;
  std::uint64_t ignored = 0;
  std::uint64_t dhcp_in_progress = 0;
  std::uint64_t reported = 0;
  std::uint64_t refreshed = 0;
  std::uint64_t rejected = 0;
  std::uint64_t keepalives = 0;
};

// HostDiscovery for one zone. Sees copies of packets only; nothing here can
// influence forwarding.
class TapServer {
 public:
  TapServer(ZoneConfig zone, SimDuration update_interval);

  std::optional<HostReport> observe_packet(const Packet& pkt, SimTime now);
  // Verdict of the most recent observe_packet call.
  TapVerdict last_verdict() const noexcept { return last_verdict_; }

  // Keepalive round: on each crossed interval boundary, one report per entry
  // seen since the previous round; entries silent for two intervals are
  // dropped instead.
  std::vector<HostReport> tick(SimTime now);
  SimTime next_boundary() const noexcept { return last_round_ + update_interval_; }

  const ZoneConfig& zone() const noexcept { return zone_; }
  const TimeBuffer& buffer() const noexcept { return buffer_; }
  const TapCounters& counters() const noexcept { return counters_; }
  SimDuration update_interval() const noexcept { return update_interval_; }
  SimDuration staleness_horizon() const noexcept { return 2 * update_interval_; }

 private:
  TapVerdict classify(const Packet& pkt) const;

  ZoneConfig zone_;
  SimDuration update_interval_;
  SimTime last_round_{0};
  TimeBuffer buffer_;
  TapCounters counters_;
  TapVerdict last_verdict_ = TapVerdict::Ignored;
};

}  // namespace sdnmob
