#include "sdnmob/tap_server.hpp"

#include "sdnmob/errors.hpp"

namespace sdnmob {

const TimeBufferEntry* TimeBuffer::find(Ipv4Address rip) const {
  auto it = entries_.find(rip);
  return it == entries_.end() ? nullptr : &it->second;
}

const TimeBufferEntry* TimeBuffer::find_uid(const Uid& uid) const {
  for (const auto& [rip, e] : entries_) {
    if (e.uid == uid) return &e;
  }
  return nullptr;
}

void TimeBuffer::upsert(Ipv4Address rip, const Uid& uid, std::int64_t now_ms) {
  auto& e = entries_[rip];
  e.rip = rip;
  e.uid = uid;
  e.last_seen_ms = std::max(e.last_seen_ms, now_ms);
}

void TimeBuffer::refresh(Ipv4Address rip, std::int64_t now_ms) {
  auto& e = entries_.at(rip);
  e.last_seen_ms = std::max(e.last_seen_ms, now_ms);
}

void TimeBuffer::erase(Ipv4Address rip) { entries_.erase(rip); }

TapServer::TapServer(ZoneConfig zone, SimDuration update_interval)
    : zone_(std::move(zone)), update_interval_(update_interval) {
  if (update_interval_.count() <= 0) throw ScenarioError("tap update interval must be positive");
}

TapVerdict TapServer::classify(const Packet& pkt) const {
  if (zone_.tap_filter == TapFilter::DhcpAndRsOnly && !is_discovery_kind(pkt.kind)) {
    return TapVerdict::Ignored;
  }
  if (pkt.src_ip.is_unspecified()) return TapVerdict::DhcpInProgress;
  if (!zone_.dhcp_range.contains(pkt.src_ip)) return TapVerdict::Rejected;
  const TimeBufferEntry* e = buffer_.find(pkt.src_ip);
  if (e != nullptr && e->uid == pkt.src_mac) return TapVerdict::Refreshed;
  return TapVerdict::Reported;
}

std::optional<HostReport> TapServer::observe_packet(const Packet& pkt, SimTime now) {
  ++counters_.observed;
  const auto now_ms = to_millis_floor(now);
  last_verdict_ = classify(pkt);
  switch (last_verdict_) {
    case TapVerdict::Ignored: ++counters_.ignored; return std::nullopt;
    case TapVerdict::DhcpInProgress: ++counters_.dhcp_in_progress; return std::nullopt;
    case TapVerdict::Rejected: ++counters_.rejected; return std::nullopt;
    case TapVerdict::Refreshed:
      ++counters_.refreshed;
      buffer_.refresh(pkt.src_ip, now_ms);
      return std::nullopt;
    case TapVerdict::Reported: break;
  }
  // The client re-addressed inside this zone: its previous binding is gone.
  if (const auto* prev = buffer_.find_uid(pkt.src_mac); prev && prev->rip != pkt.src_ip) {
    buffer_.erase(prev->rip);
  }
  buffer_.upsert(pkt.src_ip, pkt.src_mac, now_ms);
  ++counters_.reported;
  return HostReport{pkt.src_mac, pkt.src_ip};
}

std::vector<HostReport> TapServer::tick(SimTime now) {
  if (now < last_round_ + update_interval_) return {};
  const SimTime window_start = last_round_;
  // Latest boundary at or before now; missed boundaries collapse into one round.
  const auto rounds = (now - last_round_) / update_interval_;
  last_round_ += rounds * update_interval_;

  const auto now_ms = to_millis_floor(now);
  const auto start_ms = to_millis_floor(window_start);
  const auto horizon_ms = to_millis_floor(staleness_horizon());

  std::vector<HostReport> reports;
  auto& entries = buffer_.mutable_entries();
  for (auto it = entries.begin(); it != entries.end();) {
    auto& e = it->second;
    if (now_ms - e.last_seen_ms > horizon_ms) {
      it = entries.erase(it);
      continue;
    }
    if (e.last_seen_ms >= start_ms) {
      reports.push_back(HostReport{e.uid, e.rip});
      e.last_reported_ms = now_ms;
    }
    ++it;
  }
  counters_.keepalives += reports.size();
  return reports;
}

}  // namespace sdnmob
