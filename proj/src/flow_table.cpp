#include "sdnmob/flow_table.hpp"

#include <algorithm>

#include "sdnmob/errors.hpp"

namespace sdnmob {

std::string FlowMatch::to_string() const {
  if (is_wildcard()) return "*";
  std::string out;
  if (src_ip) out += "src=" + src_ip->to_string();
  if (dst_ip) out += std::string(out.empty() ? "" : ",") + "dst=" + dst_ip->to_string();
  return out;
}

bool FlowRule::rewrites() const noexcept {
  return std::any_of(actions.begin(), actions.end(),
                     [](const FlowAction& a) { return a.kind != ActionKind::Forward; });
}

std::string FlowRule::to_string() const {
  std::string out = "[" + match.to_string() + " prio=" + std::to_string(priority) + " ->";
  for (const auto& a : actions) {
    switch (a.kind) {
      case ActionKind::RewriteSrc: out += " set_src:" + a.new_addr.to_string(); break;
      case ActionKind::RewriteDst: out += " set_dst:" + a.new_addr.to_string(); break;
      case ActionKind::Forward:
        out += a.out_port == kNormalPort ? " out:normal" : " out:" + std::to_string(a.out_port);
        break;
    }
  }
  return out + "]";
}

FlowRule make_snat_rule(Ipv4Address rip, Ipv4Address vpip, PortId external_port,
                        SimDuration idle_timeout) {
  FlowRule r;
  r.match = FlowMatch::source(rip);
  r.actions = {FlowAction::rewrite_src(vpip), FlowAction::forward(external_port)};
  r.priority = kNatPriority;
  r.idle_timeout = idle_timeout;
  return r;
}

FlowRule make_dnat_rule(Ipv4Address vpip, Ipv4Address rip, SimDuration idle_timeout) {
  FlowRule r;
  r.match = FlowMatch::destination(vpip);
  r.actions = {FlowAction::rewrite_dst(rip), FlowAction::forward(kNormalPort)};
  r.priority = kNatPriority;
  r.idle_timeout = idle_timeout;
  return r;
}

FlowRule make_default_rule(PortId port) {
  FlowRule r;
  r.actions = {FlowAction::forward(port)};
  r.priority = kDefaultPriority;
  return r;
}

namespace {

void check_actions(const FlowRule& rule) {
  if (rule.actions.empty() || rule.actions.back().kind != ActionKind::Forward) {
    throw FlowError("action list of " + rule.to_string() + " does not end with Forward");
  }
  const auto forwards = std::count_if(rule.actions.begin(), rule.actions.end(),
                                      [](const FlowAction& a) { return a.kind == ActionKind::Forward; });
  if (forwards != 1) {
    throw FlowError("action list of " + rule.to_string() + " has more than one Forward");
  }
}

}  // namespace

std::pair<Packet, PortId> apply_actions(const FlowRule& rule, const Packet& pkt) {
  check_actions(rule);
  Packet out = pkt;
  for (const auto& a : rule.actions) {
    switch (a.kind) {
      case ActionKind::RewriteSrc: out.src_ip = a.new_addr; break;
      case ActionKind::RewriteDst: out.dst_ip = a.new_addr; break;
      case ActionKind::Forward: return {out, a.out_port};
    }
  }
  // Unreachable: check_actions guarantees a trailing Forward.
  throw FlowError("no Forward action");
}

const FlowRule& FlowTable::install(FlowRule rule, SimTime now) {
  check_actions(rule);
  if (rule.is_default() && rule.priority != kDefaultPriority) {
    throw FlowError("all-wildcard match is reserved for the default rule");
  }
  if (rule.rewrites() && rule.priority <= kDefaultPriority) {
    throw FlowError("translation rule " + rule.to_string() +
                    " must have priority above the default rule");
  }
  if (rule.is_default() && rule.rewrites()) {
    throw FlowError("default rule may not rewrite addresses");
  }

  if (const FlowRule* existing = find(rule.match, rule.priority)) {
    erase(existing->install_seq);
  }
  rule.installed_at = now;
  rule.last_hit = now;
  rule.install_seq = next_seq_++;
  const RuleId id = rule.install_seq;
  auto [it, inserted] = rules_.emplace(id, std::move(rule));
  index(it->second);
  return it->second;
}

void FlowTable::index(const FlowRule& r) {
  if (r.match.src_ip) {
    by_src_[*r.match.src_ip].push_back(r.install_seq);
  } else if (r.match.dst_ip) {
    by_dst_[*r.match.dst_ip].push_back(r.install_seq);
  } else {
    wildcard_.push_back(r.install_seq);
  }
}

void FlowTable::unindex(const FlowRule& r) {
  auto drop = [id = r.install_seq](std::vector<RuleId>& v) {
    v.erase(std::remove(v.begin(), v.end(), id), v.end());
  };
  if (r.match.src_ip) {
    auto it = by_src_.find(*r.match.src_ip);
    drop(it->second);
    if (it->second.empty()) by_src_.erase(it);
  } else if (r.match.dst_ip) {
    auto it = by_dst_.find(*r.match.dst_ip);
    drop(it->second);
    if (it->second.empty()) by_dst_.erase(it);
  } else {
    drop(wildcard_);
  }
}

void FlowTable::erase(RuleId id) {
  auto it = rules_.find(id);
  if (it == rules_.end()) return;
  unindex(it->second);
  rules_.erase(it);
}

const FlowRule* FlowTable::select(const Packet& pkt, SimTime now) const {
  const FlowRule* best = nullptr;
  auto consider = [&](RuleId id) {
    const FlowRule& r = rules_.at(id);
    if (!r.match.matches(pkt) || r.idle_expired(now)) return;
    if (best == nullptr || r.priority > best->priority ||
        (r.priority == best->priority && r.install_seq < best->install_seq)) {
      best = &r;
    }
  };
  if (auto it = by_src_.find(pkt.src_ip); it != by_src_.end()) {
    for (RuleId id : it->second) consider(id);
  }
  if (auto it = by_dst_.find(pkt.dst_ip); it != by_dst_.end()) {
    for (RuleId id : it->second) consider(id);
  }
  for (RuleId id : wildcard_) consider(id);
  return best;
}

const FlowRule* FlowTable::match(const Packet& pkt, SimTime now) {
  const FlowRule* hit = select(pkt, now);
  if (hit == nullptr) return nullptr;
  FlowRule& r = rules_.at(hit->install_seq);
  r.last_hit = std::max(r.last_hit, now);
  return &r;
}

const FlowRule* FlowTable::peek(const Packet& pkt, SimTime now) const { return select(pkt, now); }

std::vector<FlowRule> FlowTable::expire(SimTime now) {
  std::vector<RuleId> stale;
  for (const auto& [id, r] : rules_) {
    if (r.idle_expired(now)) stale.push_back(id);
  }
  std::sort(stale.begin(), stale.end());
  std::vector<FlowRule> removed;
  removed.reserve(stale.size());
  for (RuleId id : stale) {
    removed.push_back(rules_.at(id));
    erase(id);
  }
  return removed;
}

const FlowRule* FlowTable::find(const FlowMatch& m, std::uint32_t priority) const {
  const std::vector<RuleId>* bucket = nullptr;
  if (m.src_ip) {
    auto it = by_src_.find(*m.src_ip);
    if (it != by_src_.end()) bucket = &it->second;
  } else if (m.dst_ip) {
    auto it = by_dst_.find(*m.dst_ip);
    if (it != by_dst_.end()) bucket = &it->second;
  } else {
    bucket = &wildcard_;
  }
  if (bucket == nullptr) return nullptr;
  for (RuleId id : *bucket) {
    const FlowRule& r = rules_.at(id);
    if (r.match == m && r.priority == priority) return &r;
  }
  return nullptr;
}

bool FlowTable::remove(const FlowMatch& m, std::uint32_t priority) {
  const FlowRule* r = find(m, priority);
  if (r == nullptr) return false;
  erase(r->install_seq);
  return true;
}

std::vector<FlowRule> FlowTable::rules() const {
  std::vector<FlowRule> out;
  out.reserve(rules_.size());
  for (const auto& [id, r] : rules_) out.push_back(r);
  std::sort(out.begin(), out.end(),
            [](const FlowRule& a, const FlowRule& b) { return a.install_seq < b.install_seq; });
  return out;
}

CoreSwitch::CoreSwitch(CoreSwitchConfig cfg, SimTime now) : cfg_(std::move(cfg)) {
  table_.install(make_default_rule(), now);
}

bool CoreSwitch::is_local(Ipv4Address a) const noexcept {
  return std::any_of(cfg_.local_ranges.begin(), cfg_.local_ranges.end(),
                     [a](const Ipv4Range& r) { return r.contains(a); });
}

ForwardDecision CoreSwitch::process_packet(const Packet& pkt, SimTime now) {
  const FlowRule* rule = table_.match(pkt, now);
  if (rule != nullptr && !rule->is_default()) {
    auto [out, port] = apply_actions(*rule, pkt);
    return {ForwardDecision::Outcome::Forwarded, std::move(out), port};
  }
  if (cfg_.escalate_unknown_local && is_local(pkt.src_ip)) {
    if (buffer_.size() >= cfg_.buffer_capacity && !buffer_.empty()) {
      dropped_.push_back(buffer_.front().packet);
      buffer_.pop_front();
      ++overflow_drops_;
    }
    if (cfg_.buffer_capacity > 0) {
      buffer_.push_back({pkt, now});
    } else {
      dropped_.push_back(pkt);
      ++overflow_drops_;
    }
    return {ForwardDecision::Outcome::PacketIn, pkt, 0};
  }
  if (rule == nullptr) {
    // Only reachable if the default rule was removed by hand.
    throw FlowError("no rule matches " + pkt.src_ip.to_string() + " -> " + pkt.dst_ip.to_string());
  }
  auto [out, port] = apply_actions(*rule, pkt);
  return {ForwardDecision::Outcome::Forwarded, std::move(out), port};
}

std::vector<ForwardDecision> CoreSwitch::release_buffered(SimTime now) {
  std::vector<ForwardDecision> released;
  std::deque<Buffered> keep;
  for (auto& b : buffer_) {
    if (now - b.arrived > cfg_.buffer_timeout) {
      dropped_.push_back(b.packet);
      ++timeout_drops_;
      continue;
    }
    const FlowRule* rule = table_.match(b.packet, now);
    if (rule != nullptr && !rule->is_default()) {
      auto [out, port] = apply_actions(*rule, b.packet);
      released.push_back({ForwardDecision::Outcome::Forwarded, std::move(out), port});
    } else {
      keep.push_back(std::move(b));
    }
  }
  buffer_ = std::move(keep);
  return released;
}

std::vector<Packet> CoreSwitch::buffered_packets() const {
  std::vector<Packet> out;
  out.reserve(buffer_.size());
  for (const auto& b : buffer_) out.push_back(b.packet);
  return out;
}

std::vector<Packet> CoreSwitch::take_dropped() {
  std::vector<Packet> out;
  out.swap(dropped_);
  return out;
}

}  // namespace sdnmob
