#pragma once

#include <map>
#include <optional>
#include <set>

#include "sdnmob/address.hpp"
#include "sdnmob/random.hpp"
#include "sdnmob/tap_server.hpp"

namespace sdnmob {

// Uniform choice among the addresses of `range` not in `used`, counted in
// ascending order, with a single Rng::uniform_index draw. Throws
// ExhaustedError when no address is free.
Ipv4Address pick_free_address(const Ipv4Range& range, const std::set<Ipv4Address>& used, Rng& rng);

// Leases of one zone's DHCP server. Clients leave without releasing, so a
// lease outlives the client's stay in the zone.
class DhcpLeases {
 public:
  bool is_leased(Ipv4Address a) const { return leased_.count(a) != 0; }
  std::optional<MacAddress> holder(Ipv4Address a) const;
  void record(Ipv4Address a, const MacAddress& mac);
  void release(Ipv4Address a);

  const std::set<Ipv4Address>& leased() const noexcept { return leased_; }
  std::size_t size() const noexcept { return leased_.size(); }

 private:
  std::set<Ipv4Address> leased_;
  std::map<Ipv4Address, MacAddress> holders_;
};

// Leases a free address of the zone's range to `client`. Throws
// ExhaustedError when the range is fully leased.
Ipv4Address dhcp_assign(const ZoneConfig& zone, DhcpLeases& leases, const MacAddress& client, Rng& rng);

}  // namespace sdnmob
