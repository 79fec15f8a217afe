#include "sdnmob/packet.hpp"

#include <cstdio>

namespace sdnmob {

std::string_view to_string(PacketKind kind) noexcept {
  switch (kind) {
    case PacketKind::Data: return "data";
    case PacketKind::Ack: return "ack";
    case PacketKind::DhcpDiscover: return "dhcp_discover";
    case PacketKind::DhcpOffer: return "dhcp_offer";
    case PacketKind::RouterSolicitation: return "router_solicitation";
    case PacketKind::Keepalive: return "keepalive";
  }
  return "unknown";
}

std::string format_seconds(SimTime t) {
  // Integer arithmetic keeps the text identical across platforms.
  const auto ns = t.count();
  const bool negative = ns < 0;
  const auto mag = negative ? -ns : ns;
  const auto micros = (mag + 500) / 1000;
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s%lld.%06lld", negative ? "-" : "",
                static_cast<long long>(micros / 1'000'000), static_cast<long long>(micros % 1'000'000));
  return buf;
}

}  // namespace sdnmob
