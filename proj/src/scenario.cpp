#include "sdnmob/scenario.hpp"

#include <set>

#include "sdnmob/errors.hpp"

namespace sdnmob {

std::string_view to_string(MobilityMode m) noexcept {
  switch (m) {
    case MobilityMode::Sdn: return "sdn";
    case MobilityMode::Pmip: return "pmip";
    case MobilityMode::Plain: return "plain";
  }
  return "unknown";
}

std::string_view to_string(ScenarioEvent::Kind k) noexcept {
  switch (k) {
    case ScenarioEvent::Kind::MoveClient: return "move";
    case ScenarioEvent::Kind::StartEcho: return "start_echo";
    case ScenarioEvent::Kind::StartBulkTransfer: return "start_bulk";
    case ScenarioEvent::Kind::Stop: return "stop";
  }
  return "unknown";
}

std::size_t TopologyConfig::zone_index(std::string_view zone_id) const {
  for (std::size_t i = 0; i < zones.size(); ++i) {
    if (zones[i].zone_id == zone_id) return i;
  }
  throw ScenarioError("unknown zone '" + std::string(zone_id) + "'");
}

const std::string& TopologyConfig::initial_zone_id() const {
  if (zones.empty()) throw ScenarioError("topology has no zones");
  if (initial_zone.empty()) return zones.front().zone_id;
  return zones[zone_index(initial_zone)].zone_id;
}

void TopologyConfig::validate() const {
  if (zones.empty()) throw ScenarioError("topology needs at least one zone");
  auto check_link = [](const LinkConfig& l, const char* name) {
    if (l.bandwidth_bps == 0) throw ScenarioError(std::string(name) + " link bandwidth must be positive");
    if (l.delay.count() < 0) throw ScenarioError(std::string(name) + " link delay must be non-negative");
  };
  check_link(access, "access");
  check_link(distribution, "distribution");
  check_link(external, "external");
  if (control_delay.count() < 0) throw ScenarioError("control delay must be non-negative");

  std::set<std::string> ids;
  for (std::size_t i = 0; i < zones.size(); ++i) {
    const auto& z = zones[i];
    if (z.zone_id.empty()) throw ScenarioError("zone without an id");
    if (!ids.insert(z.zone_id).second) throw ScenarioError("duplicate zone id '" + z.zone_id + "'");
    if (z.dhcp_latency.count() < 0) {
      throw ScenarioError("zone '" + z.zone_id + "' has a negative DHCP latency");
    }
    if (z.dhcp_range.overlaps(vpip_pool)) {
      throw ScenarioError("zone '" + z.zone_id + "' range " + z.dhcp_range.to_string() +
                          " overlaps the vpIP pool " + vpip_pool.to_string());
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (z.dhcp_range.overlaps(zones[j].dhcp_range)) {
        throw ScenarioError("zone '" + z.zone_id + "' range overlaps zone '" + zones[j].zone_id + "'");
      }
    }
    if (z.dhcp_range.contains(server_ip)) {
      throw ScenarioError("server address lies inside zone '" + z.zone_id + "'");
    }
  }
  if (vpip_pool.contains(server_ip)) throw ScenarioError("server address lies inside the vpIP pool");
  (void)initial_zone_id();
  if (idle_timeout.count() < 0) throw ScenarioError("idle timeout must be non-negative");
  if (keepalive_interval.count() <= 0) throw ScenarioError("keepalive interval must be positive");
  if (!(liveness_factor > 1.0)) {
    throw ScenarioError("liveness window must exceed the keepalive interval");
  }
  if (header_bytes == 0) throw ScenarioError("header size must be positive");
  if (send_window == 0) throw ScenarioError("send window must be positive");
  if (flow_sweep_interval.count() <= 0) throw ScenarioError("flow sweep interval must be positive");
  if (throughput_window.count() <= 0) throw ScenarioError("throughput window must be positive");
}

TopologyConfig default_topology() {
  TopologyConfig t;
  t.zones = {
      ZoneConfig{"zone1", Ipv4Range::parse("10.1.0.0/24")},
      ZoneConfig{"zone2", Ipv4Range::parse("10.2.0.0/24")},
  };
  return t;
}

void TunnelConfig::validate(bool allow_zero_overhead) const {
  if (encap_overhead_bytes == 0 && !allow_zero_overhead) throw ScenarioError("tunnel encapsulation overhead must be positive");
  if (binding_update_delay.count() < 0) throw ScenarioError("binding update delay must be non-negative");
}

ScenarioEvent ScenarioEvent::move_client(SimTime at, std::string zone) {
  ScenarioEvent e;
  e.at = at;
  e.kind = Kind::MoveClient;
  e.zone_id = std::move(zone);
  return e;
}

ScenarioEvent ScenarioEvent::start_echo(SimTime at, SimDuration interval, std::uint32_t payload) {
  ScenarioEvent e;
  e.at = at;
  e.kind = Kind::StartEcho;
  e.interval = interval;
  e.payload_len = payload;
  return e;
}

ScenarioEvent ScenarioEvent::start_bulk(SimTime at, std::uint64_t total_bytes, std::uint32_t payload) {
  ScenarioEvent e;
  e.at = at;
  e.kind = Kind::StartBulkTransfer;
  e.total_bytes = total_bytes;
  e.payload_len = payload;
  return e;
}

ScenarioEvent ScenarioEvent::stop(SimTime at) {
  ScenarioEvent e;
  e.at = at;
  e.kind = Kind::Stop;
  return e;
}

void validate_events(const TopologyConfig& topo, const std::vector<ScenarioEvent>& events) {
  std::size_t current = topo.zone_index(topo.initial_zone_id());
  SimTime prev{0};
  std::optional<SimTime> last_move;
  bool traffic = false;
  bool echo = false;
  bool stopped = false;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    const std::string where = "event " + std::to_string(i + 1) + " (" +
                              std::string(to_string(e.kind)) + "): ";
    if (e.at.count() < 0) throw EventError(i, where + "negative time");
    if (e.at < prev) throw EventError(i, where + "events are not sorted by time");
    prev = e.at;
    if (stopped) throw EventError(i, where + "event after stop");
    switch (e.kind) {
      case ScenarioEvent::Kind::MoveClient: {
        std::size_t target = 0;
        try {
          target = topo.zone_index(e.zone_id);
        } catch (const ScenarioError& err) {
          throw EventError(i, where + err.what());
        }
        if (target == current) throw EventError(i, where + "client is already in zone '" + e.zone_id + "'");
        if (last_move && *last_move == e.at) {
          throw EventError(i, where + "a mobility event is already pending at this instant");
        }
        last_move = e.at;
        current = target;
        break;
      }
      case ScenarioEvent::Kind::StartEcho:
        if (e.interval.count() <= 0) throw EventError(i, where + "echo interval must be positive");
        [[fallthrough]];
      case ScenarioEvent::Kind::StartBulkTransfer:
        if (traffic) throw EventError(i, where + "only one traffic source per scenario");
        if (e.payload_len == 0) throw EventError(i, where + "payload must be positive");
        if (e.kind == ScenarioEvent::Kind::StartBulkTransfer && e.total_bytes == 0) {
          throw EventError(i, where + "transfer size must be positive");
        }
        traffic = true;
        echo = e.kind == ScenarioEvent::Kind::StartEcho;
        break;
      case ScenarioEvent::Kind::Stop:
        stopped = true;
        break;
    }
  }
  if (echo && !stopped) throw ScenarioError("echo traffic needs a stop event");
}

}  // namespace sdnmob
