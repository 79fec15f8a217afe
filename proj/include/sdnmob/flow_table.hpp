#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sdnmob/address.hpp"
#include "sdnmob/packet.hpp"
#include "sdnmob/sim_time.hpp"

namespace sdnmob {

using PortId = std::uint32_t;

// Route by destination using the router's own L3 table (OpenFlow NORMAL).
inline constexpr PortId kNormalPort = 0xfffffffau;
inline constexpr PortId kExternalPort = 1;
inline constexpr PortId zone_port(std::size_t zone_index) {
  return static_cast<PortId>(100 + zone_index);
}

inline constexpr std::uint32_t kDefaultPriority = 0;
inline constexpr std::uint32_t kNatPriority = 100;
inline constexpr SimDuration kDefaultIdleTimeout = std::chrono::seconds(30);

// Absent field matches anything. The all-wildcard match is reserved for the
// default L2/route rule.
struct FlowMatch {
  std::optional<Ipv4Address> src_ip;
  std::optional<Ipv4Address> dst_ip;

  static FlowMatch source(Ipv4Address a) { return {a, std::nullopt}; }
  static FlowMatch destination(Ipv4Address a) { return {std::nullopt, a}; }
  static FlowMatch any() { return {}; }

  bool is_wildcard() const noexcept { return !src_ip && !dst_ip; }
  bool matches(const Packet& pkt) const noexcept {
    return (!src_ip || *src_ip == pkt.src_ip) && (!dst_ip || *dst_ip == pkt.dst_ip);
  }
  std::string to_string() const;

  bool operator==(const FlowMatch&) const = default;
};

enum class ActionKind : std::uint8_t { RewriteSrc, RewriteDst, Forward };

struct FlowAction {
  ActionKind kind = ActionKind::Forward;
  Ipv4Address new_addr{};
  PortId out_port = 0;

  static FlowAction rewrite_src(Ipv4Address a) { return {ActionKind::RewriteSrc, a, 0}; }
  static FlowAction rewrite_dst(Ipv4Address a) { return {ActionKind::RewriteDst, a, 0}; }
  static FlowAction forward(PortId p) { return {ActionKind::Forward, {}, p}; }

  bool operator==(const FlowAction&) const = default;
};

struct FlowRule {
  FlowMatch match;
  std::vector<FlowAction> actions;
  std::uint32_t priority = kDefaultPriority;
  // Zero means the rule never idles out.
  SimDuration idle_timeout{0};
  SimTime installed_at{0};
  SimTime last_hit{0};
  std::uint64_t install_seq = 0;

  bool is_default() const noexcept { return match.is_wildcard(); }
  bool rewrites() const noexcept;
  bool idle_expired(SimTime now) const noexcept {
    return !is_default() && idle_timeout.count() > 0 && now - last_hit > idle_timeout;
  }
  std::string to_string() const;

  bool operator==(const FlowRule&) const = default;
};

// sNAT: rIP -> vpIP on the way out; dNAT: vpIP -> rIP on the way back.
FlowRule make_snat_rule(Ipv4Address rip, Ipv4Address vpip, PortId external_port,
                        SimDuration idle_timeout);
FlowRule make_dnat_rule(Ipv4Address vpip, Ipv4Address rip, SimDuration idle_timeout);
FlowRule make_default_rule(PortId port = kNormalPort);

// Applies rewrites in order; the final Forward supplies the port. Throws
// FlowError for action lists that do not end in exactly one Forward.
std::pair<Packet, PortId> apply_actions(const FlowRule& rule, const Packet& pkt);

// Single prioritized table with exact-address indexes. Rules whose idle time
// has run out stop matching immediately, even before expire() collects them.
class FlowTable {
 public:
  // Validates and inserts; an existing rule with the same (match, priority) is
  // replaced and receives a fresh install_seq. Throws FlowError.
  const FlowRule& install(FlowRule rule, SimTime now);

  // Highest priority, then lowest install_seq. Updates last_hit.
  const FlowRule* match(const Packet& pkt, SimTime now);
  // Same selection without touching last_hit.
  const FlowRule* peek(const Packet& pkt, SimTime now) const;

  std::vector<FlowRule> expire(SimTime now);

  const FlowRule* find(const FlowMatch& m, std::uint32_t priority) const;
  bool remove(const FlowMatch& m, std::uint32_t priority);

  std::size_t size() const noexcept { return rules_.size(); }
  bool empty() const noexcept { return rules_.empty(); }
  // Sorted by install_seq.
  std::vector<FlowRule> rules() const;

 private:
  using RuleId = std::uint64_t;

  const FlowRule* select(const Packet& pkt, SimTime now) const;
  void index(const FlowRule& r);
  void unindex(const FlowRule& r);
  void erase(RuleId id);

  std::unordered_map<RuleId, FlowRule> rules_;
  std::unordered_map<Ipv4Address, std::vector<RuleId>> by_src_;
  std::unordered_map<Ipv4Address, std::vector<RuleId>> by_dst_;
  std::vector<RuleId> wildcard_;
  std::uint64_t next_seq_ = 1;
};

struct ForwardDecision {
  enum class Outcome : std::uint8_t { Forwarded, PacketIn };

  Outcome outcome = Outcome::Forwarded;
  Packet packet;
  PortId out_port = 0;

  bool forwarded() const noexcept { return outcome == Outcome::Forwarded; }
};

struct CoreSwitchConfig {
  // Client-side address space; unmatched packets sourced here escalate.
  std::vector<Ipv4Range> local_ranges;
  bool escalate_unknown_local = true;
  std::size_t buffer_capacity = 64;
  SimDuration buffer_timeout = std::chrono::seconds(2);
};

// The SDN-aware core router: flow table, default rule and packet-in buffer.
class CoreSwitch {
 public:
  explicit CoreSwitch(CoreSwitchConfig cfg, SimTime now = SimTime{0});

  ForwardDecision process_packet(const Packet& pkt, SimTime now);

  // Re-runs buffered packets through the table, oldest first. Packets that
  // now match leave the buffer; timed-out ones are dropped.
  std::vector<ForwardDecision> release_buffered(SimTime now);

  FlowTable& table() noexcept { return table_; }
  const FlowTable& table() const noexcept { return table_; }
  const CoreSwitchConfig& config() const noexcept { return cfg_; }

  std::size_t buffered() const noexcept { return buffer_.size(); }
  std::vector<Packet> buffered_packets() const;
  std::uint64_t overflow_drops() const noexcept { return overflow_drops_; }
  std::uint64_t timeout_drops() const noexcept { return timeout_drops_; }
  // Packets lost to the buffer since the last call.
  std::vector<Packet> take_dropped();

 private:
  bool is_local(Ipv4Address a) const noexcept;

  struct Buffered {
    Packet packet;
    SimTime arrived;
  };

  CoreSwitchConfig cfg_;
  FlowTable table_;
  std::deque<Buffered> buffer_;
  std::vector<Packet> dropped_;
  std::uint64_t overflow_drops_ = 0;
  std::uint64_t timeout_drops_ = 0;
};

}  // namespace sdnmob
