#include "sdnmob/controller.hpp"

#include <algorithm>

#include "sdnmob/address_pool.hpp"
#include "sdnmob/errors.hpp"

namespace sdnmob {

std::string HostReport::serialize() const { return uid.to_string() + "#" + rip.to_string() + "\n"; }

HostReport HostReport::parse(std::string_view line) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  const auto hash = line.find('#');
  if (hash == std::string_view::npos || line.find('#', hash + 1) != std::string_view::npos) {
    throw ParseError("host report must contain exactly one '#': '" + std::string(line) + "'");
  }
  const auto uid_text = line.substr(0, hash);
  if (!MacAddress::is_canonical_text(uid_text)) {
    throw ParseError("host report uid is not canonical lowercase colon-hex: '" +
                     std::string(uid_text) + "'");
  }
  return HostReport{MacAddress::parse(uid_text), Ipv4Address::parse(line.substr(hash + 1))};
}

std::vector<HostReport> HostReportDecoder::feed(std::string_view bytes) {
  std::vector<HostReport> out;
  pending_.append(bytes);
  std::size_t start = 0;
  for (;;) {
    const auto nl = pending_.find('\n', start);
    if (nl == std::string::npos) break;
    out.push_back(HostReport::parse(std::string_view(pending_).substr(start, nl - start)));
    start = nl + 1;
  }
  pending_.erase(0, start);
  return out;
}

const MobilityRecord* MobilityServiceTable::find(const Uid& uid) const {
  auto it = records_.find(uid);
  return it == records_.end() ? nullptr : &it->second;
}

const MobilityRecord* MobilityServiceTable::find_by_rip(Ipv4Address rip) const {
  auto it = by_rip_.find(rip);
  return it == by_rip_.end() ? nullptr : find(it->second);
}

std::optional<MobilityRecord> MobilityServiceTable::lookup(const Uid& uid) const {
  if (const auto* r = find(uid)) return *r;
  return std::nullopt;
}

void MobilityServiceTable::insert(MobilityRecord rec) {
  const Uid uid = rec.uid;
  by_rip_[rec.rip] = uid;
  used_vpips_.insert(rec.vpip);
  records_[uid] = rec;
}

void MobilityServiceTable::update_rip(const Uid& uid, Ipv4Address rip, SimTime now) {
  auto& rec = records_.at(uid);
  by_rip_.erase(rec.rip);
  rec.rip = rip;
  rec.last_seen = now;
  by_rip_[rip] = uid;
}

void MobilityServiceTable::touch(const Uid& uid, SimTime now) { records_.at(uid).last_seen = now; }

std::optional<MobilityRecord> MobilityServiceTable::erase(const Uid& uid) {
  auto it = records_.find(uid);
  if (it == records_.end()) return std::nullopt;
  MobilityRecord rec = it->second;
  by_rip_.erase(rec.rip);
  used_vpips_.erase(rec.vpip);
  records_.erase(it);
  return rec;
}

std::vector<MobilityRecord> MobilityServiceTable::snapshot() const {
  std::vector<MobilityRecord> out;
  out.reserve(records_.size());
  for (const auto& [uid, rec] : records_) out.push_back(rec);
  return out;
}

std::string_view to_string(ControlAction::Kind kind) noexcept {
  switch (kind) {
    case ControlAction::Kind::InstallFlows: return "install_flows";
    case ControlAction::Kind::RefreshFlows: return "refresh_flows";
    case ControlAction::Kind::EvictClient: return "evict_client";
  }
  return "unknown";
}

Ipv4Address allocate_vpip(const Ipv4Range& pool, const std::set<Ipv4Address>& used, Rng& rng) {
  return pick_free_address(pool, used, rng);
}

MobilityService::MobilityService(MobilityServiceConfig cfg, std::uint64_t seed)
    : cfg_(std::move(cfg)), rng_(seed) {}

ControlAction MobilityService::install_action(const MobilityRecord& rec) const {
  ControlAction a;
  a.kind = ControlAction::Kind::InstallFlows;
  a.uid = rec.uid;
  a.record = rec;
  a.snat = make_snat_rule(rec.rip, rec.vpip, cfg_.external_port, cfg_.idle_timeout);
  a.dnat = make_dnat_rule(rec.vpip, rec.rip, cfg_.idle_timeout);
  return a;
}

std::vector<ControlAction> MobilityService::handle_host_report(const HostReport& report,
                                                                SimTime now) {
  if (cfg_.vpip_pool.contains(report.rip)) {
    throw ControlError("reported rIP " + report.rip.to_string() +
                       " lies inside the virtual pool " + cfg_.vpip_pool.to_string());
  }
  if (report.rip.is_unspecified() || report.rip.is_broadcast()) {
    throw ControlError("reported rIP " + report.rip.to_string() + " is not a unicast address");
  }

  std::vector<ControlAction> actions;

  // A different client holding this rIP has left without being evicted
  // (address reuse); keep rIP -> vpIP injective by dropping that record.
  if (const auto* holder = mst_.find_by_rip(report.rip); holder && holder->uid != report.uid) {
    const MobilityRecord gone = *mst_.erase(holder->uid);
    actions.push_back({ControlAction::Kind::EvictClient, gone.uid, gone, std::nullopt, std::nullopt});
  }

  const MobilityRecord* existing = mst_.find(report.uid);
  if (existing == nullptr) {
    const Ipv4Address vpip = allocate_vpip(cfg_.vpip_pool, mst_.used_vpips(), rng_);
    MobilityRecord rec{report.uid, report.rip, vpip, now};
    mst_.insert(rec);
    actions.push_back(install_action(rec));
  } else if (existing->rip != report.rip) {
    mst_.update_rip(report.uid, report.rip, now);
    actions.push_back(install_action(*mst_.find(report.uid)));
  } else {
    mst_.touch(report.uid, now);
    const MobilityRecord& rec = *mst_.find(report.uid);
    actions.push_back({ControlAction::Kind::RefreshFlows, rec.uid, rec, std::nullopt, std::nullopt});
  }
  return actions;
}

std::vector<ControlAction> MobilityService::handle_keepalive(const HostReport& report, SimTime now) {
  const MobilityRecord* rec = mst_.find(report.uid);
  if (rec == nullptr) return handle_host_report(report, now);
  if (rec->rip != report.rip) return {};
  return handle_host_report(report, now);
}

std::vector<ControlAction> MobilityService::evict_stale(SimTime now, SimDuration liveness_window) {
  std::vector<Uid> stale;
  for (const auto& rec : mst_.snapshot()) {
    if (now - rec.last_seen > liveness_window) stale.push_back(rec.uid);
  }
  std::vector<ControlAction> actions;
  for (const auto& uid : stale) {
    const MobilityRecord gone = *mst_.erase(uid);
    actions.push_back({ControlAction::Kind::EvictClient, uid, gone, std::nullopt, std::nullopt});
  }
  return actions;
}

std::vector<ControlAction> MobilityService::handle_packet_in(const Packet& pkt, SimTime /*now*/) {
  const MobilityRecord* rec = mst_.find(pkt.src_mac);
  if (rec == nullptr || rec->rip != pkt.src_ip) return {};
  return {install_action(*rec)};
}

}  // namespace sdnmob
