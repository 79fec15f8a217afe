#include "sdnmob/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "sdnmob/errors.hpp"

namespace sdnmob {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

class Parser {
 public:
  Parser(std::string_view text, std::string source) : text_(text), source_(std::move(source)) {}

  RunConfig parse();

 private:
  [[noreturn]] void fail(std::size_t line, const std::string& what) const {
    throw ConfigError(source_, line, what);
  }

  std::uint64_t parse_u64(std::string_view v, std::size_t line, std::string_view key) const {
    std::uint64_t out = 0;
    const auto* end = v.data() + v.size();
    const auto [p, ec] = std::from_chars(v.data(), end, out);
    if (v.empty() || ec != std::errc() || p != end) {
      fail(line, "'" + std::string(key) + "' expects a non-negative integer, got '" + std::string(v) + "'");
    }
    return out;
  }

  std::uint64_t parse_positive(std::string_view v, std::size_t line, std::string_view key) const {
    const auto n = parse_u64(v, line, key);
    if (n == 0) fail(line, "'" + std::string(key) + "' must be positive");
    return n;
  }

  std::uint32_t parse_u32(std::string_view v, std::size_t line, std::string_view key) const {
    const auto n = parse_positive(v, line, key);
    if (n > 0xffffffffull) fail(line, "'" + std::string(key) + "' is out of range");
    return static_cast<std::uint32_t>(n);
  }

  // Exact decimal to integer nanoseconds; `digits` is the number of decimal
  // places one unit has in nanoseconds (6 for ms, 9 for s).
  SimDuration parse_duration(std::string_view v, int digits, std::size_t line, std::string_view key) const {
    const auto bad = [&] {
      fail(line, "'" + std::string(key) + "' expects a non-negative decimal, got '" + std::string(v) + "'");
    };
    const auto dot = v.find('.');
    const auto whole = v.substr(0, dot);
    std::string_view frac = dot == std::string_view::npos ? std::string_view{} : v.substr(dot + 1);
    if (whole.empty() && frac.empty()) bad();
    for (char ch : whole) {
      if (!std::isdigit(static_cast<unsigned char>(ch))) bad();
    }
    for (char ch : frac) {
      if (!std::isdigit(static_cast<unsigned char>(ch))) bad();
    }
    while (!frac.empty() && frac.back() == '0') frac.remove_suffix(1);
    if (static_cast<int>(frac.size()) > digits) {
      fail(line, "'" + std::string(key) + "' has sub-nanosecond precision");
    }
    std::int64_t scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    std::int64_t w = 0;
    for (char ch : whole) {
      w = w * 10 + (ch - '0');
      if (w > (std::int64_t{1} << 62) / scale) fail(line, "'" + std::string(key) + "' is out of range");
    }
    std::int64_t f = 0;
    for (int i = 0; i < digits; ++i) {
      f = f * 10 + (i < static_cast<int>(frac.size()) ? frac[static_cast<std::size_t>(i)] - '0' : 0);
    }
    return SimDuration(w * scale + f);
  }

  SimDuration parse_ms(std::string_view v, std::size_t line, std::string_view key) const {
    return parse_duration(v, 6, line, key);
  }
  SimDuration parse_s(std::string_view v, std::size_t line, std::string_view key) const {
    return parse_duration(v, 9, line, key);
  }

  double parse_double(std::string_view v, std::size_t line, std::string_view key) const {
    const std::string s(v);
    char* end = nullptr;
    const double d = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) {
      fail(line, "'" + std::string(key) + "' expects a number, got '" + s + "'");
    }
    return d;
  }

  template <typename F>
  auto wrap(std::size_t line, F&& f) const {
    try {
      return f();
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      fail(line, e.what());
    }
  }

  void topology_key(std::string_view key, std::string_view v, std::size_t line);
  void zone_line(std::string_view key, std::string_view v, std::size_t line);
  void event_line(std::string_view text, std::size_t line);
  void tunnel_key(std::string_view key, std::string_view v, std::size_t line);
  void run_key(std::string_view key, std::string_view v, std::size_t line);

  void validate_topology(std::size_t topology_line) const;
  void validate_events_at_lines(std::size_t events_line) const;

  std::string_view text_;
  std::string source_;
  RunConfig cfg_;

  std::optional<std::uint64_t> link_bandwidth_;
  std::set<std::string> explicit_bandwidth_;
  std::optional<SimDuration> binding_update_delay_;
  std::vector<std::size_t> zone_lines_;
  std::vector<std::size_t> event_lines_;
};

void Parser::topology_key(std::string_view key, std::string_view v, std::size_t line) {
  auto& t = cfg_.topology;
  if (key == "seed") {
    t.seed = parse_u64(v, line, key);
  } else if (key == "vpip_pool") {
    t.vpip_pool = wrap(line, [&] { return Ipv4Range::parse(v); });
  } else if (key == "server_ip") {
    t.server_ip = wrap(line, [&] { return Ipv4Address::parse(v); });
  } else if (key == "client_mac") {
    t.client_mac = wrap(line, [&] { return MacAddress::parse(v); });
  } else if (key == "initial_zone") {
    t.initial_zone = std::string(v);
  } else if (key == "link_bandwidth_bps") {
    link_bandwidth_ = parse_positive(v, line, key);
  } else if (key == "access_bandwidth_bps") {
    t.access.bandwidth_bps = parse_positive(v, line, key);
    explicit_bandwidth_.insert("access");
  } else if (key == "distribution_bandwidth_bps") {
    t.distribution.bandwidth_bps = parse_positive(v, line, key);
    explicit_bandwidth_.insert("distribution");
  } else if (key == "external_bandwidth_bps") {
    t.external.bandwidth_bps = parse_positive(v, line, key);
    explicit_bandwidth_.insert("external");
  } else if (key == "access_delay_ms") {
    t.access.delay = parse_ms(v, line, key);
  } else if (key == "distribution_delay_ms") {
    t.distribution.delay = parse_ms(v, line, key);
  } else if (key == "external_delay_ms") {
    t.external.delay = parse_ms(v, line, key);
  } else if (key == "control_delay_ms") {
    t.control_delay = parse_ms(v, line, key);
  } else if (key == "idle_timeout_s") {
    t.idle_timeout = parse_s(v, line, key);
  } else if (key == "keepalive_interval_s") {
    t.keepalive_interval = parse_s(v, line, key);
    if (t.keepalive_interval.count() == 0) fail(line, "'keepalive_interval_s' must be positive");
  } else if (key == "liveness_factor") {
    t.liveness_factor = parse_double(v, line, key);
    if (!(t.liveness_factor > 1.0)) fail(line, "'liveness_factor' must exceed 1");
  } else if (key == "header_bytes") {
    t.header_bytes = parse_u32(v, line, key);
  } else if (key == "send_window") {
    t.send_window = parse_u32(v, line, key);
  } else if (key == "packet_in_buffer") {
    t.packet_in_buffer = static_cast<std::size_t>(parse_u64(v, line, key));
  } else if (key == "packet_in_timeout_ms") {
    t.packet_in_timeout = parse_ms(v, line, key);
  } else if (key == "flow_sweep_interval_ms") {
    t.flow_sweep_interval = parse_ms(v, line, key);
    if (t.flow_sweep_interval.count() == 0) fail(line, "'flow_sweep_interval_ms' must be positive");
  } else if (key == "throughput_window_ms") {
    t.throughput_window = parse_ms(v, line, key);
    if (t.throughput_window.count() == 0) fail(line, "'throughput_window_ms' must be positive");
  } else {
    fail(line, "unknown key '" + std::string(key) + "' in [topology]");
  }
}

void Parser::zone_line(std::string_view key, std::string_view v, std::size_t line) {
  ZoneConfig z;
  z.zone_id = std::string(key);
  const auto parts = split(v, ',');
  z.dhcp_range = wrap(line, [&] { return Ipv4Range::parse(parts.front()); });
  std::set<std::string_view> seen;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto eq = parts[i].find('=');
    if (eq == std::string_view::npos) fail(line, "expected key=value, got '" + std::string(parts[i]) + "'");
    const auto k = trim(parts[i].substr(0, eq));
    const auto val = trim(parts[i].substr(eq + 1));
    if (!seen.insert(k).second) fail(line, "duplicate zone option '" + std::string(k) + "'");
    if (k == "dhcp_latency_ms") {
      z.dhcp_latency = parse_ms(val, line, k);
    } else if (k == "tap_filter") {
      if (val == "all") {
        z.tap_filter = TapFilter::AllPackets;
      } else if (val == "dhcp_rs") {
        z.tap_filter = TapFilter::DhcpAndRsOnly;
      } else {
        fail(line, "tap_filter must be 'all' or 'dhcp_rs', got '" + std::string(val) + "'");
      }
    } else {
      fail(line, "unknown zone option '" + std::string(k) + "'");
    }
  }
  for (const auto& other : cfg_.topology.zones) {
    if (other.zone_id == z.zone_id) fail(line, "duplicate zone id '" + z.zone_id + "'");
  }
  cfg_.topology.zones.push_back(std::move(z));
  zone_lines_.push_back(line);
}

void Parser::event_line(std::string_view text, std::size_t line) {
  const auto w = words(text);
  if (w.size() < 2) fail(line, "event needs a time and a kind");
  const SimTime at = parse_s(w[0], line, "event time");
  const std::string_view kind = w[1];

  std::map<std::string_view, std::string_view> opts;
  std::vector<std::string_view> positional;
  for (std::size_t i = 2; i < w.size(); ++i) {
    const auto eq = w[i].find('=');
    if (eq == std::string_view::npos) {
      positional.push_back(w[i]);
    } else if (!opts.emplace(w[i].substr(0, eq), w[i].substr(eq + 1)).second) {
      fail(line, "duplicate event option '" + std::string(w[i].substr(0, eq)) + "'");
    }
  }
  auto take = [&](std::string_view k) -> std::string_view {
    auto it = opts.find(k);
    if (it == opts.end()) fail(line, std::string(kind) + " needs " + std::string(k) + "=");
    const auto v = it->second;
    opts.erase(it);
    return v;
  };
  auto finish = [&](std::size_t allowed_positional) {
    if (!opts.empty()) fail(line, "unknown option '" + std::string(opts.begin()->first) + "' for " + std::string(kind));
    if (positional.size() != allowed_positional) fail(line, "wrong number of arguments for " + std::string(kind));
  };

  ScenarioEvent ev;
  if (kind == "move") {
    finish(1);
    ev = ScenarioEvent::move_client(at, std::string(positional[0]));
  } else if (kind == "start_echo") {
    const auto interval = parse_ms(take("interval_ms"), line, "interval_ms");
    const auto payload = parse_u32(take("payload_bytes"), line, "payload_bytes");
    finish(0);
    ev = ScenarioEvent::start_echo(at, interval, payload);
  } else if (kind == "start_bulk") {
    const auto total = parse_positive(take("total_bytes"), line, "total_bytes");
    const auto payload = parse_u32(take("payload_bytes"), line, "payload_bytes");
    finish(0);
    ev = ScenarioEvent::start_bulk(at, total, payload);
  } else if (kind == "stop") {
    finish(0);
    ev = ScenarioEvent::stop(at);
  } else {
    fail(line, "unknown event kind '" + std::string(kind) + "'");
  }
  cfg_.events.push_back(std::move(ev));
  event_lines_.push_back(line);
}

void Parser::tunnel_key(std::string_view key, std::string_view v, std::size_t line) {
  if (!cfg_.tunnel) cfg_.tunnel = TunnelConfig{};
  if (key == "encap_overhead_bytes") {
    cfg_.tunnel->encap_overhead_bytes = parse_u32(v, line, key);
  } else if (key == "binding_update_delay_ms") {
    binding_update_delay_ = parse_ms(v, line, key);
  } else {
    fail(line, "unknown key '" + std::string(key) + "' in [tunnel]");
  }
}

void Parser::run_key(std::string_view key, std::string_view v, std::size_t line) {
  if (key == "mode") {
    const auto m = parse_run_mode(v);
    if (!m) fail(line, "mode must be sdn, pmip or both, got '" + std::string(v) + "'");
    cfg_.mode = *m;
  } else if (key == "output_dir") {
    if (v.empty()) fail(line, "output_dir must not be empty");
    cfg_.output_dir = std::string(v);
  } else {
    fail(line, "unknown key '" + std::string(key) + "' in [run]");
  }
}

void Parser::validate_topology(std::size_t topology_line) const {
  try {
    cfg_.topology.validate();
  } catch (const ScenarioError& e) {
    const std::string msg = e.what();
    // Attribute zone problems to the first zone line at which they appear.
    for (std::size_t k = 1; k <= cfg_.topology.zones.size(); ++k) {
      const std::string& id = cfg_.topology.zones[k - 1].zone_id;
      if (msg.find("zone '" + id + "'") != std::string::npos) fail(zone_lines_[k - 1], msg);
    }
    fail(topology_line, msg);
  }
}

void Parser::validate_events_at_lines(std::size_t events_line) const {
  try {
    validate_events(cfg_.topology, cfg_.events);
  } catch (const EventError& e) {
    fail(event_lines_.at(e.index()), e.what());
  } catch (const ScenarioError& e) {
    // Whole-list problems (such as a missing stop) belong to the last event.
    fail(event_lines_.empty() ? events_line : event_lines_.back(), e.what());
  }
}

RunConfig Parser::parse() {
  enum class Section { None, Topology, Zones, Events, Tunnel, Run };
  static const std::map<std::string_view, Section> kSections = {
      {"topology", Section::Topology}, {"zones", Section::Zones}, {"events", Section::Events},
      {"tunnel", Section::Tunnel},     {"run", Section::Run},
  };
  std::map<Section, std::size_t> header_line;
  std::map<Section, std::set<std::string>> keys;
  Section current = Section::None;
  std::size_t line_no = 0;
  std::size_t last_line = 1;

  std::size_t pos = 0;
  while (pos <= text_.size()) {
    const auto nl = text_.find('\n', pos);
    std::string_view raw = text_.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text_.size() + 1 : nl + 1;
    ++line_no;
    if (!trim(raw).empty()) last_line = line_no;

    const auto hash = raw.find_first_of("#;");
    const std::string_view body = trim(raw.substr(0, hash));
    if (body.empty()) continue;

    if (body.front() == '[') {
      if (body.back() != ']') fail(line_no, "malformed section header '" + std::string(body) + "'");
      const auto name = trim(body.substr(1, body.size() - 2));
      const auto it = kSections.find(name);
      if (it == kSections.end()) fail(line_no, "unknown section [" + std::string(name) + "]");
      if (!header_line.emplace(it->second, line_no).second) {
        fail(line_no, "duplicate section [" + std::string(name) + "]");
      }
      current = it->second;
      if (current == Section::Tunnel && !cfg_.tunnel) cfg_.tunnel = TunnelConfig{};
      continue;
    }
    if (current == Section::None) fail(line_no, "content before the first section header");

    if (current == Section::Events) {
      event_line(body, line_no);
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected 'key = value', got '" + std::string(body) + "'");
    const auto key = trim(body.substr(0, eq));
    const auto value = trim(body.substr(eq + 1));
    if (key.empty()) fail(line_no, "missing key before '='");
    if (!keys[current].insert(std::string(key)).second) {
      fail(line_no, "duplicate key '" + std::string(key) + "'");
    }
    switch (current) {
      case Section::Topology: topology_key(key, value, line_no); break;
      case Section::Zones: zone_line(key, value, line_no); break;
      case Section::Tunnel: tunnel_key(key, value, line_no); break;
      case Section::Run: run_key(key, value, line_no); break;
      default: break;
    }
  }

  if (!header_line.count(Section::Topology)) fail(1, "missing [topology] section");
  if (!header_line.count(Section::Zones)) fail(last_line, "missing [zones] section");
  const std::size_t topo_line = header_line.at(Section::Topology);
  if (cfg_.topology.zones.empty()) fail(header_line.at(Section::Zones), "[zones] defines no zone");

  if (link_bandwidth_) {
    auto& t = cfg_.topology;
    if (!explicit_bandwidth_.count("access")) t.access.bandwidth_bps = *link_bandwidth_;
    if (!explicit_bandwidth_.count("distribution")) t.distribution.bandwidth_bps = *link_bandwidth_;
    if (!explicit_bandwidth_.count("external")) t.external.bandwidth_bps = *link_bandwidth_;
  }
  if (!cfg_.topology.initial_zone.empty()) {
    bool known = false;
    for (const auto& z : cfg_.topology.zones) known = known || z.zone_id == cfg_.topology.initial_zone;
    if (!known) fail(topo_line, "initial_zone '" + cfg_.topology.initial_zone + "' is not defined in [zones]");
  }
  validate_topology(topo_line);

  if (cfg_.tunnel) {
    cfg_.tunnel->binding_update_delay =
        binding_update_delay_.value_or(TunnelConfig::defaults_for(cfg_.topology).binding_update_delay);
    const std::size_t tl = header_line.at(Section::Tunnel);
    wrap(tl, [&] {
      cfg_.tunnel->validate();
      return 0;
    });
  }
  if (cfg_.mode != RunMode::Sdn && !cfg_.tunnel) {
    fail(header_line.count(Section::Run) ? header_line.at(Section::Run) : topo_line,
         "mode " + std::string(to_string(cfg_.mode)) + " needs a [tunnel] section");
  }
  validate_events_at_lines(header_line.count(Section::Events) ? header_line.at(Section::Events) : topo_line);
  return cfg_;
}

std::string ms_text(SimDuration d, int digits) {
  std::int64_t scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  const auto whole = d.count() / scale;
  auto frac = d.count() % scale;
  std::string out = std::to_string(whole);
  if (frac != 0) {
    std::string f = std::to_string(frac);
    f.insert(0, static_cast<std::size_t>(digits) - f.size(), '0');
    while (f.back() == '0') f.pop_back();
    out += "." + f;
  }
  return out;
}

std::string ms(SimDuration d) { return ms_text(d, 6); }
std::string secs(SimDuration d) { return ms_text(d, 9); }

}  // namespace

std::string_view to_string(RunMode m) noexcept {
  switch (m) {
    case RunMode::Sdn: return "sdn";
    case RunMode::Pmip: return "pmip";
    case RunMode::Both: return "both";
  }
  return "unknown";
}

std::optional<RunMode> parse_run_mode(std::string_view text) noexcept {
  if (text == "sdn") return RunMode::Sdn;
  if (text == "pmip") return RunMode::Pmip;
  if (text == "both") return RunMode::Both;
  return std::nullopt;
}

RunConfig parse_config(std::string_view text, const std::string& source_name) {
  return Parser(text, source_name).parse();
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

void check_run_config(const RunConfig& cfg, const std::string& source_name) {
  if (cfg.mode != RunMode::Sdn && !cfg.tunnel) {
    throw ConfigError(source_name, 0, "mode " + std::string(to_string(cfg.mode)) + " needs a [tunnel] section");
  }
}

std::string serialize_config(const RunConfig& cfg) {
  const auto& t = cfg.topology;
  std::ostringstream o;
  char factor[64];
  std::snprintf(factor, sizeof factor, "%.17g", t.liveness_factor);

  o << "[topology]\n";
  o << "seed = " << t.seed << "\n";
  o << "vpip_pool = " << t.vpip_pool.to_string() << "\n";
  o << "server_ip = " << t.server_ip.to_string() << "\n";
  o << "client_mac = " << t.client_mac.to_string() << "\n";
  if (!t.initial_zone.empty()) o << "initial_zone = " << t.initial_zone << "\n";
  o << "access_bandwidth_bps = " << t.access.bandwidth_bps << "\n";
  o << "access_delay_ms = " << ms(t.access.delay) << "\n";
  o << "distribution_bandwidth_bps = " << t.distribution.bandwidth_bps << "\n";
  o << "distribution_delay_ms = " << ms(t.distribution.delay) << "\n";
  o << "external_bandwidth_bps = " << t.external.bandwidth_bps << "\n";
  o << "external_delay_ms = " << ms(t.external.delay) << "\n";
  o << "control_delay_ms = " << ms(t.control_delay) << "\n";
  o << "idle_timeout_s = " << secs(t.idle_timeout) << "\n";
  o << "keepalive_interval_s = " << secs(t.keepalive_interval) << "\n";
  o << "liveness_factor = " << factor << "\n";
  o << "header_bytes = " << t.header_bytes << "\n";
  o << "send_window = " << t.send_window << "\n";
  o << "packet_in_buffer = " << t.packet_in_buffer << "\n";
  o << "packet_in_timeout_ms = " << ms(t.packet_in_timeout) << "\n";
  o << "flow_sweep_interval_ms = " << ms(t.flow_sweep_interval) << "\n";
  o << "throughput_window_ms = " << ms(t.throughput_window) << "\n";

  o << "\n[zones]\n";
  for (const auto& z : t.zones) {
    o << z.zone_id << " = " << z.dhcp_range.to_string() << ", dhcp_latency_ms=" << ms(z.dhcp_latency)
      << ", tap_filter=" << (z.tap_filter == TapFilter::AllPackets ? "all" : "dhcp_rs") << "\n";
  }

  o << "\n[events]\n";
  for (const auto& e : cfg.events) {
    o << secs(e.at) << " ";
    switch (e.kind) {
      case ScenarioEvent::Kind::MoveClient: o << "move " << e.zone_id; break;
      case ScenarioEvent::Kind::StartEcho:
        o << "start_echo interval_ms=" << ms(e.interval) << " payload_bytes=" << e.payload_len;
        break;
      case ScenarioEvent::Kind::StartBulkTransfer:
        o << "start_bulk total_bytes=" << e.total_bytes << " payload_bytes=" << e.payload_len;
        break;
      case ScenarioEvent::Kind::Stop: o << "stop"; break;
    }
    o << "\n";
  }

  if (cfg.tunnel) {
    o << "\n[tunnel]\n";
    o << "encap_overhead_bytes = " << cfg.tunnel->encap_overhead_bytes << "\n";
    o << "binding_update_delay_ms = " << ms(cfg.tunnel->binding_update_delay) << "\n";
  }

  o << "\n[run]\n";
  o << "mode = " << to_string(cfg.mode) << "\n";
  o << "output_dir = " << cfg.output_dir << "\n";
  return o.str();
}

}  // namespace sdnmob
