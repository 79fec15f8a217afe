#include "sdnmob/network.hpp"

#include <algorithm>
#include <map>
#include <utility>

#include "sdnmob/address_pool.hpp"
#include "sdnmob/errors.hpp"
#include "sdnmob/event_queue.hpp"
#include "sdnmob/random.hpp"
#include "sdnmob/transport.hpp"

namespace sdnmob {
namespace {

constexpr std::uint32_t kUploadConn = 1;    // client -> server data
constexpr std::uint32_t kDownloadConn = 2;  // server -> client data

enum Direction : int { kUp = 0, kDown = 1 };

// Point-to-point link with one FIFO transmitter per direction.
struct Link {
  LinkConfig cfg;
  SimTime busy_until[2]{SimTime{0}, SimTime{0}};

  SimTime transmit(SimTime now, std::uint32_t bytes, Direction dir) {
    const SimTime start = std::max(now, busy_until[dir]);
    busy_until[dir] = start + serialization_time(bytes, cfg.bandwidth_bps);
    return busy_until[dir] + cfg.delay;
  }
};

enum class App : std::uint8_t { None, Echo, Bulk };

}  // namespace

struct Network::Impl {
  TopologyConfig cfg;
  MobilityMode mode;
  std::optional<TunnelConfig> tunnel;

  EventQueue q;
  Rng dhcp_rng;
  Rng lma_rng;

  std::vector<Link> access;
  std::vector<Link> dist;
  Link external;
  std::vector<DhcpLeases> leases;

  std::vector<TapServer> taps;
  std::vector<HostReportDecoder> report_streams;
  std::vector<HostReportDecoder> keepalive_streams;
  std::optional<MobilityService> ctl;
  std::optional<CoreSwitch> core;

  // LMA state.
  std::optional<Ipv4Address> home_address;
  std::optional<std::size_t> lma_binding;

  // Client attachment.
  std::size_t zone = 0;
  bool attached = false;
  std::uint64_t epoch = 0;
  std::optional<Ipv4Address> address;

  std::unique_ptr<ReliableSender> client_tx;
  std::unique_ptr<ReliableSender> server_tx;
  ReliableReceiver client_rx;
  ReliableReceiver server_rx;
  std::optional<Ipv4Address> server_peer;
  bool server_reset = false;

  App app = App::None;
  bool stopped = false;
  bool scheduled = false;

  MetricsTrace tr;
  std::map<std::int64_t, std::uint64_t> window_bits;
  std::uint64_t next_trace_id = 1;

  Impl(TopologyConfig c, MobilityMode m, std::optional<TunnelConfig> t)
      : cfg(std::move(c)),
        mode(m),
        tunnel(std::move(t)),
        dhcp_rng(Rng::derive_seed(cfg.seed, 1)),
        lma_rng(Rng::derive_seed(cfg.seed, 3)) {
    cfg.validate();
    if (mode == MobilityMode::Pmip) {
      if (!tunnel) tunnel = TunnelConfig::defaults_for(cfg);
      tunnel->validate(true);
    }
    for (std::size_t i = 0; i < cfg.zones.size(); ++i) {
      access.push_back(Link{cfg.access});
      dist.push_back(Link{cfg.distribution});
    }
    external = Link{cfg.external};
    leases.resize(cfg.zones.size());

    if (mode != MobilityMode::Pmip) {
      CoreSwitchConfig cs;
      for (const auto& z : cfg.zones) cs.local_ranges.push_back(z.dhcp_range);
      cs.escalate_unknown_local = mode == MobilityMode::Sdn;
      cs.buffer_capacity = cfg.packet_in_buffer;
      cs.buffer_timeout = cfg.packet_in_timeout;
      core.emplace(std::move(cs), SimTime{0});
    }
    if (mode == MobilityMode::Sdn) {
      for (const auto& z : cfg.zones) taps.emplace_back(z, cfg.keepalive_interval);
      report_streams.resize(cfg.zones.size());
      keepalive_streams.resize(cfg.zones.size());
      ctl.emplace(MobilityServiceConfig{cfg.vpip_pool, cfg.idle_timeout, kExternalPort},
                  Rng::derive_seed(cfg.seed, 2));
    }

    auto hooks = [this](bool client_side) {
      TransportHooks h;
      h.transmit = [this, client_side](Packet p) {
        client_side ? client_send(std::move(p)) : server_send_data(std::move(p));
      };
      h.schedule = [this](SimTime at, std::function<void()> fn) { q.schedule(at, std::move(fn)); };
      h.now = [this] { return q.now(); };
      return h;
    };
    client_tx = std::make_unique<ReliableSender>(kUploadConn, cfg.send_window, cfg.header_bytes,
                                                 hooks(true));
    server_tx = std::make_unique<ReliableSender>(kDownloadConn, cfg.send_window, cfg.header_bytes,
                                                 hooks(false));

    tr.mode = mode;
    tr.throughput_window = cfg.throughput_window;

    start_housekeeping();
    attach(cfg.zone_index(cfg.initial_zone_id()));
  }

  SimTime now() const { return q.now(); }
  SimDuration c() const { return cfg.control_delay; }

  void drop(const Packet& p, const char* reason) {
    ++tr.counters.drops_by_reason[reason];
    if (p.kind == PacketKind::Data) ++tr.counters.data_dropped;
  }

  Packet control_packet(PacketKind kind, Ipv4Address dst) const {
    Packet p;
    p.kind = kind;
    p.dst_ip = dst;
    p.header_bytes = cfg.header_bytes;
    return p;
  }

  // ---- client ----------------------------------------------------------

  void client_send(Packet p) {
    if (p.kind == PacketKind::Data) {
      ++tr.counters.data_sent;
      p.dst_ip = cfg.server_ip;
    }
    p.src_mac = cfg.client_mac;
    p.sent_at = now();
    p.trace_id = next_trace_id++;
    if (!attached) return drop(p, "client_detached");
    if (p.kind == PacketKind::DhcpDiscover) {
      p.src_ip = kUnspecifiedAddress;
    } else if (address) {
      p.src_ip = *address;
    } else {
      return drop(p, "client_unbound");
    }
    const std::size_t z = zone;
    const std::uint64_t e = epoch;
    const SimTime at = access[z].transmit(now(), p.wire_bytes(), kUp);
    q.schedule(at, [this, z, e, p] { dr_from_access(z, e, p); });
  }

  void attach(std::size_t z) {
    zone = z;
    attached = true;
    ++epoch;
    address.reset();
    client_send(control_packet(PacketKind::DhcpDiscover, kBroadcastAddress));
    const std::uint64_t e = epoch;
    SimDuration wait = cfg.zones[z].dhcp_latency;
    if (mode == MobilityMode::Pmip) {
      // MAG sees the attach: PBU to the LMA, PBA back, then addressing.
      const SimDuration bud = tunnel->binding_update_delay;
      q.schedule(now() + bud / 2, [this, z] { lma_register(z); });
      wait += bud;
    }
    q.schedule(now() + wait, [this, e] { bind(e); });
  }

  void detach() {
    attached = false;
    ++epoch;
    address.reset();
  }

  void bind(std::uint64_t e) {
    if (e != epoch || !attached) return;
    if (mode == MobilityMode::Pmip) {
      address = home_address;
    } else {
      try {
        address = dhcp_assign(cfg.zones[zone], leases[zone], cfg.client_mac, dhcp_rng);
      } catch (const ExhaustedError&) {
        ++tr.counters.drops_by_reason["dhcp_exhausted"];
        return;
      }
    }
    if (!address) return;
    if (!tr.handoffs.empty() && !tr.handoffs.back().bound_time) tr.handoffs.back().bound_time = now();
    client_send(control_packet(PacketKind::RouterSolicitation, kBroadcastAddress));
    client_send(control_packet(PacketKind::Keepalive, cfg.server_ip));
    client_tx->resend_outstanding();
  }

  void move(std::string_view zone_id) {
    const std::size_t target = cfg.zone_index(zone_id);
    if (target == zone) {
      throw ScenarioError("client is already in zone '" + std::string(zone_id) + "'");
    }
    snapshot_mst("move");
    HandoffRecord h;
    h.from_zone = cfg.zones[zone].zone_id;
    h.to_zone = cfg.zones[target].zone_id;
    h.detach_time = now();
    tr.handoffs.push_back(h);
    detach();
    attach(target);
  }

  void client_receive(std::size_t z, std::uint64_t e, Packet p) {
    if (!attached || zone != z || epoch != e) return drop(p, "access_link_down");
    if (!address || p.dst_ip != *address) return drop(p, "address_mismatch");
    if (p.kind == PacketKind::Data && p.conn_id == kDownloadConn) {
      ++tr.counters.data_delivered;
      const auto r = client_rx.on_data(p.seq, p.payload_len);
      Packet ack = control_packet(PacketKind::Ack, cfg.server_ip);
      ack.conn_id = kDownloadConn;
      ack.seq = r.ack;
      client_send(ack);
    } else if (p.kind == PacketKind::Ack && p.conn_id == kUploadConn) {
      client_tx->on_ack(p.seq);
    }
  }

  // ---- distribution routers / MAGs --------------------------------------

  void dr_from_access(std::size_t z, std::uint64_t e, Packet p) {
    if (!attached || zone != z || epoch != e) return drop(p, "access_link_down");
    if (mode == MobilityMode::Sdn) {
      if (auto report = taps[z].observe_packet(p, now())) send_report(z, *report, false);
    }
    if (is_discovery_kind(p.kind)) return;  // answered by the local DHCP server / router
    if (mode == MobilityMode::Pmip) p.encap_bytes = tunnel->encap_overhead_bytes;
    const SimTime at = dist[z].transmit(now(), p.wire_bytes(), kUp);
    q.schedule(at, [this, p] { core_ingress(p); });
  }

  void send_down_zone(std::size_t z, Packet p) {
    const SimTime at = dist[z].transmit(now(), p.wire_bytes(), kDown);
    q.schedule(at, [this, z, p] { dr_from_core(z, p); });
  }

  void dr_from_core(std::size_t z, Packet p) {
    if (mode == MobilityMode::Pmip) {
      p.encap_bytes = 0;
    } else if (!cfg.zones[z].dhcp_range.contains(p.dst_ip)) {
      return drop(p, "no_route");
    }
    if (!attached || zone != z) return drop(p, "access_link_down");
    const std::uint64_t e = epoch;
    const SimTime at = access[z].transmit(now(), p.wire_bytes(), kDown);
    q.schedule(at, [this, z, e, p] { client_receive(z, e, p); });
  }

  // ---- core router / LMA ------------------------------------------------

  void core_ingress(Packet p) {
    if (mode == MobilityMode::Pmip) {
      p.encap_bytes = 0;
      return route(std::move(p));
    }
    const ForwardDecision d = core->process_packet(p, now());
    for (const auto& lost : core->take_dropped()) drop(lost, "packet_in_overflow");
    if (d.forwarded()) return egress(d);
    if (ctl) {
      q.schedule(now() + c(), [this, p] { apply_control(ctl->handle_packet_in(p, now()), false); });
    }
  }

  void egress(const ForwardDecision& d) {
    if (d.out_port == kExternalPort) return to_server(d.packet);
    if (d.out_port == kNormalPort) return route(d.packet);
    for (std::size_t i = 0; i < cfg.zones.size(); ++i) {
      if (d.out_port == zone_port(i)) return send_down_zone(i, d.packet);
    }
    drop(d.packet, "no_route");
  }

  void route(Packet p) {
    if (p.dst_ip == cfg.server_ip) return to_server(std::move(p));
    for (std::size_t i = 0; i < cfg.zones.size(); ++i) {
      if (cfg.zones[i].dhcp_range.contains(p.dst_ip)) return send_down_zone(i, std::move(p));
    }
    if (mode == MobilityMode::Pmip && home_address && p.dst_ip == *home_address && lma_binding) {
      p.encap_bytes = tunnel->encap_overhead_bytes;
      return send_down_zone(*lma_binding, std::move(p));
    }
    drop(p, "no_route");
  }

  void lma_register(std::size_t z) {
    if (!home_address) home_address = pick_free_address(cfg.vpip_pool, {}, lma_rng);
    lma_binding = z;
  }

  // ---- controller -------------------------------------------------------

  void send_report(std::size_t z, const HostReport& report, bool keepalive) {
    const std::string bytes = report.serialize();
    q.schedule(now() + c(), [this, z, bytes, keepalive] {
      auto& stream = keepalive ? keepalive_streams[z] : report_streams[z];
      for (const auto& r : stream.feed(bytes)) {
        apply_control(keepalive ? ctl->handle_keepalive(r, now()) : ctl->handle_host_report(r, now()),
                      true);
      }
    });
  }

  void apply_control(const std::vector<ControlAction>& actions, bool from_report) {
    bool changed = false;
    for (const auto& a : actions) {
      switch (a.kind) {
        case ControlAction::Kind::InstallFlows:
          changed = true;
          q.schedule(now() + c(), [this, a] { core_install(a); });
          break;
        case ControlAction::Kind::RefreshFlows:
          q.schedule(now() + c(), [this, rec = a.record] { core_refresh(rec); });
          break;
        case ControlAction::Kind::EvictClient:
          // Flows of evicted clients are left to idle out.
          changed = true;
          break;
      }
    }
    if (changed && from_report) snapshot_mst("report");
  }

  void core_install(const ControlAction& a) {
    for (const auto* rule : {&a.snat, &a.dnat}) {
      if (!*rule) continue;
      const FlowRule& installed = core->table().install(**rule, now());
      tr.flow_log.push_back({now(), FlowLogEntry::Event::Installed, installed});
    }
    release_buffered();
  }

  void core_refresh(const MobilityRecord& rec) {
    const FlowRule* snat = core->table().find(FlowMatch::source(rec.rip), kNatPriority);
    const FlowRule* dnat = core->table().find(FlowMatch::destination(rec.vpip), kNatPriority);
    const bool live = snat && dnat && !snat->idle_expired(now()) && !dnat->idle_expired(now());
    if (!live) core_install(ctl->install_action(rec));
  }

  void release_buffered() {
    for (const auto& d : core->release_buffered(now())) egress(d);
    for (const auto& lost : core->take_dropped()) drop(lost, "packet_in_timeout");
  }

  void snapshot_mst(const char* reason) {
    if (!ctl) return;
    tr.mst_snapshots.push_back({now(), reason, ctl->table().snapshot()});
  }

  // ---- server -----------------------------------------------------------

  void to_server(Packet p) {
    const SimTime at = external.transmit(now(), p.wire_bytes(), kUp);
    q.schedule(at, [this, p] { server_receive(p); });
  }

  void server_emit(Packet p) {
    p.src_ip = cfg.server_ip;
    p.sent_at = now();
    p.trace_id = next_trace_id++;
    const SimTime at = external.transmit(now(), p.wire_bytes(), kDown);
    q.schedule(at, [this, p] { core_ingress(p); });
  }

  void server_send_data(Packet p) {
    ++tr.counters.data_sent;
    if (server_reset || !server_peer) return drop(p, "connection_reset");
    p.dst_ip = *server_peer;
    server_emit(std::move(p));
  }

  void note_first_delivery(const Packet& p) {
    for (auto it = tr.handoffs.rbegin(); it != tr.handoffs.rend(); ++it) {
      if (it->detach_time <= p.sent_at) {
        if (!it->first_delivery) it->first_delivery = now();
        return;
      }
    }
  }

  void server_receive(const Packet& p) {
    tr.server_observed_sources.insert(p.src_ip);
    note_first_delivery(p);
    if (p.kind == PacketKind::Data && p.conn_id == kUploadConn) {
      ++tr.counters.data_delivered;
      window_bits[now().count() / cfg.throughput_window.count()] +=
          static_cast<std::uint64_t>(p.payload_len) * 8;
      if (server_reset) return;
      if (!server_peer) {
        server_peer = p.src_ip;
      } else if (p.src_ip != *server_peer) {
        ++tr.resets;
        server_reset = true;
        return;
      }
      const auto r = server_rx.on_data(p.seq, p.payload_len);
      Packet ack = control_packet(PacketKind::Ack, *server_peer);
      ack.conn_id = kUploadConn;
      ack.seq = r.ack;
      server_emit(ack);
      for (const auto& [seq, len] : r.delivered) {
        tr.server_deliveries.emplace_back(now(), len);
        if (app == App::Echo) server_tx->submit(len);
      }
    } else if (p.kind == PacketKind::Ack && p.conn_id == kDownloadConn) {
      if (!server_reset && server_peer && p.src_ip == *server_peer) server_tx->on_ack(p.seq);
    }
  }

  // ---- scenario ---------------------------------------------------------

  void echo_tick(SimDuration interval, std::uint32_t len) {
    if (stopped || client_tx->aborted()) return;
    client_tx->submit(len);
    q.schedule(now() + interval, [this, interval, len] { echo_tick(interval, len); });
  }

  void run_event(const ScenarioEvent& ev) {
    switch (ev.kind) {
      case ScenarioEvent::Kind::MoveClient:
        move(ev.zone_id);
        break;
      case ScenarioEvent::Kind::StartEcho:
        app = App::Echo;
        echo_tick(ev.interval, ev.payload_len);
        break;
      case ScenarioEvent::Kind::StartBulkTransfer: {
        app = App::Bulk;
        std::uint64_t left = ev.total_bytes;
        while (left > 0) {
          const auto len = static_cast<std::uint32_t>(std::min<std::uint64_t>(left, ev.payload_len));
          client_tx->submit(len);
          left -= len;
        }
        break;
      }
      case ScenarioEvent::Kind::Stop:
        stopped = true;
        break;
    }
  }

  void start_housekeeping() {
    if (core) sweep_at(now() + cfg.flow_sweep_interval);
    if (ctl) keepalive_at(now() + cfg.keepalive_interval);
  }

  void sweep_at(SimTime at) {
    q.schedule_housekeeping(at, [this] {
      for (auto& r : core->table().expire(now())) {
        tr.flow_log.push_back({now(), FlowLogEntry::Event::Expired, std::move(r)});
      }
      release_buffered();
      sweep_at(now() + cfg.flow_sweep_interval);
    });
  }

  void keepalive_at(SimTime at) {
    q.schedule_housekeeping(at, [this] {
      for (std::size_t z = 0; z < taps.size(); ++z) {
        for (const auto& r : taps[z].tick(now())) send_report(z, r, true);
      }
      const auto evicted = ctl->evict_stale(now(), cfg.liveness_window());
      if (!evicted.empty()) snapshot_mst("report");
      keepalive_at(now() + cfg.keepalive_interval);
    });
  }

  MetricsTrace finish() const {
    MetricsTrace out = tr;
    out.rtt_client = client_tx->rtt_samples();
    out.rtt_server = server_tx->rtt_samples();
    if (!window_bits.empty()) {
      const auto w = cfg.throughput_window;
      for (auto i = window_bits.begin()->first; i <= window_bits.rbegin()->first; ++i) {
        const auto it = window_bits.find(i);
        const std::uint64_t bits = it == window_bits.end() ? 0 : it->second;
        out.throughput.push_back({i * w, bits, static_cast<double>(bits) / to_seconds(w)});
      }
    }
    out.counters.retransmissions =
        client_tx->counters().retransmissions + server_tx->counters().retransmissions;
    out.counters.app_submitted = client_tx->submitted() + server_tx->submitted();
    out.counters.app_delivered = server_rx.expected() + client_rx.expected();
    out.losses = out.counters.app_submitted - out.counters.app_delivered;
    if (core) {
      // Still waiting in the packet-in buffer: never delivered.
      for (const auto& p : core->buffered_packets()) {
        ++out.counters.drops_by_reason["packet_in_pending"];
        if (p.kind == PacketKind::Data) ++out.counters.data_dropped;
      }
    }
    out.end_time = now();
    return out;
  }
};

Network::Network(TopologyConfig cfg, MobilityMode mode, std::optional<TunnelConfig> tunnel)
    : impl_(std::make_unique<Impl>(std::move(cfg), mode, std::move(tunnel))) {}
Network::~Network() = default;
Network::Network(Network&&) noexcept = default;
Network& Network::operator=(Network&&) noexcept = default;

std::size_t Network::zone_count() const noexcept { return impl_->cfg.zones.size(); }
std::size_t Network::distribution_router_count() const noexcept { return impl_->dist.size(); }
std::size_t Network::tap_server_count() const noexcept { return impl_->taps.size(); }
MobilityMode Network::mode() const noexcept { return impl_->mode; }
const TopologyConfig& Network::config() const noexcept { return impl_->cfg; }
const TunnelConfig* Network::tunnel() const noexcept {
  return impl_->tunnel ? &*impl_->tunnel : nullptr;
}

void Network::schedule(const std::vector<ScenarioEvent>& events) {
  if (impl_->scheduled) throw ScenarioError("scenario already scheduled");
  validate_events(impl_->cfg, events);
  impl_->scheduled = true;
  impl_->tr.events = events;
  for (const auto& ev : events) {
    if (ev.at < impl_->now()) throw ScenarioError("event at " + format_seconds(ev.at) + " s lies in the past");
  }
  for (const auto& ev : events) {
    impl_->q.schedule(ev.at, [impl = impl_.get(), ev] { impl->run_event(ev); });
  }
}

void Network::run() { impl_->q.run(); }
void Network::run_until(SimTime t) { impl_->q.run_until(t); }
SimTime Network::now() const noexcept { return impl_->now(); }
void Network::move_client(std::string_view zone_id) { impl_->move(zone_id); }

std::optional<Ipv4Address> Network::client_address() const { return impl_->address; }
const std::string& Network::client_zone() const { return impl_->cfg.zones[impl_->zone].zone_id; }
bool Network::client_bound() const noexcept { return impl_->address.has_value(); }
bool Network::connection_alive() const noexcept {
  return !impl_->server_reset && !impl_->client_tx->aborted() && !impl_->server_tx->aborted();
}

const MobilityService* Network::controller() const noexcept {
  return impl_->ctl ? &*impl_->ctl : nullptr;
}
const CoreSwitch* Network::core_switch() const noexcept {
  return impl_->core ? &*impl_->core : nullptr;
}
const TapServer* Network::tap_server(std::size_t zone_index) const {
  return zone_index < impl_->taps.size() ? &impl_->taps[zone_index] : nullptr;
}
std::optional<Ipv4Address> Network::pmip_home_address() const { return impl_->home_address; }

MetricsTrace Network::trace() const { return impl_->finish(); }

Network build_topology(const TopologyConfig& cfg) { return Network(cfg, MobilityMode::Sdn); }

MetricsTrace run_scenario(const TopologyConfig& cfg, const std::vector<ScenarioEvent>& events,
                          MobilityMode mode) {
  Network net(cfg, mode);
  net.schedule(events);
  net.run();
  return net.trace();
}

MetricsTrace run_pmip_baseline(const TopologyConfig& cfg, const std::vector<ScenarioEvent>& events,
                               const TunnelConfig& tunnel) {
  Network net(cfg, MobilityMode::Pmip, tunnel);
  net.schedule(events);
  net.run();
  return net.trace();
}

}  // namespace sdnmob
