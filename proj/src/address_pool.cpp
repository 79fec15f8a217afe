#include "sdnmob/address_pool.hpp"

#include <iterator>

#include "sdnmob/errors.hpp"

namespace sdnmob {

Ipv4Address pick_free_address(const Ipv4Range& range, const std::set<Ipv4Address>& used, Rng& rng) {
  const auto lo = used.lower_bound(range.first());
  const auto hi = used.upper_bound(range.last());
  const auto used_in_range = static_cast<std::uint64_t>(std::distance(lo, hi));
  const std::uint64_t free = range.size() - used_in_range;
  if (free == 0) throw ExhaustedError("address range " + range.to_string() + " is exhausted");

  // The k-th free address: walk the used addresses in order and shift k past
  // each one that sits at or below the candidate.
  const std::uint64_t k = rng.uniform_index(free);
  std::uint64_t candidate = range.first().value() + k;
  for (auto it = lo; it != hi && it->value() <= candidate; ++it) ++candidate;
  return Ipv4Address(static_cast<std::uint32_t>(candidate));
}

std::optional<MacAddress> DhcpLeases::holder(Ipv4Address a) const {
  auto it = holders_.find(a);
  if (it == holders_.end()) return std::nullopt;
  return it->second;
}

void DhcpLeases::record(Ipv4Address a, const MacAddress& mac) {
  leased_.insert(a);
  holders_[a] = mac;
}

void DhcpLeases::release(Ipv4Address a) {
  leased_.erase(a);
  holders_.erase(a);
}

Ipv4Address dhcp_assign(const ZoneConfig& zone, DhcpLeases& leases, const MacAddress& client, Rng& rng) {
  const Ipv4Address a = pick_free_address(zone.dhcp_range, leases.leased(), rng);
  leases.record(a, client);
  return a;
}

}  // namespace sdnmob
