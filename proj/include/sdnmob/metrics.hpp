#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sdnmob/address.hpp"
#include "sdnmob/controller.hpp"
#include "sdnmob/flow_table.hpp"
#include "sdnmob/scenario.hpp"
#include "sdnmob/sim_time.hpp"
#include "sdnmob/transport.hpp"

namespace sdnmob {

struct ThroughputSample {
  SimTime window_start{0};
  std::uint64_t bits = 0;
  double bits_per_s = 0.0;

  bool operator==(const ThroughputSample&) const = default;
};

struct HandoffRecord {
  std::string from_zone;
  std::string to_zone;
  SimTime detach_time{0};
  // Client holds its post-handoff address from here on.
  std::optional<SimTime> bound_time;
  // Arrival at the server of the first client packet sent after detach_time.
  std::optional<SimTime> first_delivery;

  std::optional<SimDuration> switch_over_delay() const {
    if (!first_delivery) return std::nullopt;
    return *first_delivery - detach_time;
  }
  bool operator==(const HandoffRecord&) const = default;
};

struct FlowLogEntry {
  enum class Event : std::uint8_t { Installed, Expired };
  SimTime at{0};
  Event event = Event::Installed;
  FlowRule rule;

  bool operator==(const FlowLogEntry&) const = default;
};

struct MstSnapshot {
  SimTime at{0};
  std::string reason;  // "move" (taken before detaching) or "report"
  std::vector<MobilityRecord> records;

  bool operator==(const MstSnapshot&) const = default;
};

struct DeliveryCounters {
  std::uint64_t data_sent = 0;        // every Data transmission, retransmissions included
  std::uint64_t data_delivered = 0;   // Data copies that reached the peer endpoint
  std::uint64_t data_dropped = 0;     // Data copies lost in the network
  std::uint64_t retransmissions = 0;
  std::uint64_t app_submitted = 0;    // segments handed to the transport, both directions
  std::uint64_t app_delivered = 0;    // segments delivered in order to the peer application
  std::map<std::string, std::uint64_t> drops_by_reason;  // all packet kinds

  bool operator==(const DeliveryCounters&) const = default;
};

struct MetricsTrace {
  MobilityMode mode = MobilityMode::Sdn;
  std::vector<ScenarioEvent> events;
  SimDuration throughput_window{std::chrono::milliseconds(100)};

  std::vector<RttSample> rtt_client;
  std::vector<RttSample> rtt_server;
  // Payload bits of client Data arriving at the server, per tumbling window;
  // duplicates count, so this is link throughput rather than goodput.
  std::vector<ThroughputSample> throughput;
  std::vector<HandoffRecord> handoffs;
  // Application segments never delivered in order to the peer.
  std::uint64_t losses = 0;
  std::uint64_t resets = 0;
  std::set<Ipv4Address> server_observed_sources;

  DeliveryCounters counters;
  // In-order application deliveries at the server: (time, payload bytes).
  std::vector<std::pair<SimTime, std::uint32_t>> server_deliveries;
  std::vector<MstSnapshot> mst_snapshots;
  std::vector<FlowLogEntry> flow_log;
  SimTime end_time{0};

  std::optional<SimDuration> switch_over_delay() const {
    if (handoffs.empty()) return std::nullopt;
    return handoffs.front().switch_over_delay();
  }
};

// `series,time_s,value,unit`; RTT and switch-over delay in ms, throughput in
// bits per second, times with six decimals.
inline constexpr const char* kCsvHeader = "series,time_s,value,unit";
std::string to_csv(const MetricsTrace& trace);

struct RttStats {
  std::size_t count = 0;
  double mean_ms = 0.0;
  double p50_ms = 0.0;
  double p95_ms = 0.0;
  double max_ms = 0.0;
};
RttStats rtt_stats(const std::vector<RttSample>& samples);

// Goodput over [first server delivery + warmup, first detach) or up to the last
// delivery when there is no handoff in that span.
struct SteadyState {
  SimTime from{0};
  SimTime to{0};
  std::uint64_t packets = 0;
  double goodput_bps = 0.0;
};
SteadyState steady_state(const MetricsTrace& trace,
                         SimDuration warmup = std::chrono::milliseconds(500));

// Goodput of in-order deliveries in [from, to).
SteadyState goodput_between(const MetricsTrace& trace, SimTime from, SimTime to);

// Ordered "key: value" pairs for summary.txt, keys prefixed with the mode.
std::vector<std::pair<std::string, std::string>> summarize(const MetricsTrace& trace);

struct Comparison {
  std::string label_a;
  std::string label_b;
  std::optional<SimDuration> switchover_a;
  std::optional<SimDuration> switchover_b;
  RttStats rtt_client_a, rtt_client_b;
  RttStats rtt_server_a, rtt_server_b;
  SteadyState steady_a, steady_b;

  struct AlignedPoint {
    SimDuration offset{0};  // window start relative to the first handoff
    double a_bps = 0.0;
    double b_bps = 0.0;
  };
  std::vector<AlignedPoint> aligned_throughput;

  // b - a
  double switchover_delta_ms() const;
  double rtt_client_delta_ms() const { return rtt_client_b.mean_ms - rtt_client_a.mean_ms; }
  double goodput_delta_bps() const { return steady_b.goodput_bps - steady_a.goodput_bps; }
  double goodput_ratio() const {
    return steady_a.goodput_bps > 0 ? steady_b.goodput_bps / steady_a.goodput_bps : 0.0;
  }
};

// Throws ComparisonError if the traces ran different event lists.
Comparison compare_runs(const MetricsTrace& a, const MetricsTrace& b);
std::string comparison_csv(const Comparison& c);
std::vector<std::pair<std::string, std::string>> summarize(const Comparison& c);

}  // namespace sdnmob
