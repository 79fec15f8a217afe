#pragma once

#include <cstdint>
#include <string_view>

#include "sdnmob/address.hpp"
#include "sdnmob/sim_time.hpp"

namespace sdnmob {

enum class PacketKind : std::uint8_t {
  Data,
  Ack,
  DhcpDiscover,
  DhcpOffer,
  RouterSolicitation,
  Keepalive,
};

std::string_view to_string(PacketKind kind) noexcept;

inline constexpr bool is_discovery_kind(PacketKind k) noexcept {
  return k == PacketKind::DhcpDiscover || k == PacketKind::DhcpOffer ||
         k == PacketKind::RouterSolicitation;
}

// Simulated L3 datagram plus the L2 source address the access segment saw.
struct Packet {
  Ipv4Address src_ip;
  Ipv4Address dst_ip;
  MacAddress src_mac;
  std::uint32_t payload_len = 0;
  // Segment number for Data, cumulative acknowledgement for Ack.
  std::uint64_t seq = 0;
  // Time this copy left its originating endpoint.
  SimTime sent_at{0};
  PacketKind kind = PacketKind::Data;

  // Transport connection; stands in for the port pair of a 5-tuple.
  std::uint32_t conn_id = 0;
  std::uint32_t header_bytes = 40;
  // Outer tunnel header carried while encapsulated; 0 otherwise.
  std::uint32_t encap_bytes = 0;
  // Unique per transmission, for tracing only.
  std::uint64_t trace_id = 0;

  std::uint32_t wire_bytes() const noexcept { return payload_len + header_bytes + encap_bytes; }

  bool operator==(const Packet&) const = default;
};

}  // namespace sdnmob
