#include "sdnmob/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "sdnmob/errors.hpp"

namespace sdnmob {
namespace {

__extension__ using i128 = __int128;

// num/den rounded half-up to six decimals, using integer arithmetic only so
// CSV bytes never depend on floating-point formatting.
std::string fixed6(i128 num, i128 den) {
  const bool negative = (num < 0) != (den < 0) && num != 0;
  if (num < 0) num = -num;
  if (den < 0) den = -den;
  const i128 scaled = (num * 1'000'000 * 2 + den) / (2 * den);
  const auto whole = static_cast<long long>(scaled / 1'000'000);
  const auto frac = static_cast<long long>(scaled % 1'000'000);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%lld.%06lld", negative ? "-" : "", whole, frac);
  return buf;
}

std::string ms_text(SimDuration d) { return fixed6(d.count(), 1'000'000); }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string join_ms(const std::vector<HandoffRecord>& hs) {
  std::string out;
  for (const auto& h : hs) {
    if (!out.empty()) out += ",";
    const auto d = h.switch_over_delay();
    out += d ? ms_text(*d) : std::string("none");
  }
  return out.empty() ? "none" : out;
}

}  // namespace

std::string to_csv(const MetricsTrace& trace) {
  std::string out = std::string(kCsvHeader) + "\n";
  auto row = [&out](const char* series, SimTime t, const std::string& value, const char* unit) {
    out += series;
    out += ',';
    out += format_seconds(t);
    out += ',';
    out += value;
    out += ',';
    out += unit;
    out += '\n';
  };
  for (const auto& s : trace.rtt_client) row("rtt_client", s.send_time, ms_text(s.rtt), "ms");
  for (const auto& s : trace.rtt_server) row("rtt_server", s.send_time, ms_text(s.rtt), "ms");
  const auto window_ns = trace.throughput_window.count();
  for (const auto& s : trace.throughput) {
    row("throughput", s.window_start, fixed6(static_cast<i128>(s.bits) * 1'000'000'000, window_ns),
        "bps");
  }
  for (const auto& h : trace.handoffs) {
    if (const auto d = h.switch_over_delay()) row("switchover_delay", h.detach_time, ms_text(*d), "ms");
  }
  return out;
}

RttStats rtt_stats(const std::vector<RttSample>& samples) {
  RttStats st;
  st.count = samples.size();
  if (samples.empty()) return st;
  std::vector<double> ms;
  ms.reserve(samples.size());
  for (const auto& s : samples) ms.push_back(to_millis(s.rtt));
  std::sort(ms.begin(), ms.end());
  double sum = 0.0;
  for (double v : ms) sum += v;
  st.mean_ms = sum / static_cast<double>(ms.size());
  auto rank = [&ms](double p) {
    const auto n = static_cast<double>(ms.size());
    const auto idx = static_cast<std::size_t>(std::max(1.0, std::ceil(p * n))) - 1;
    return ms[std::min(idx, ms.size() - 1)];
  };
  st.p50_ms = rank(0.50);
  st.p95_ms = rank(0.95);
  st.max_ms = ms.back();
  return st;
}

SteadyState goodput_between(const MetricsTrace& trace, SimTime from, SimTime to) {
  SteadyState st;
  st.from = from;
  st.to = to;
  if (to <= from) return st;
  std::uint64_t bytes = 0;
  for (const auto& [t, len] : trace.server_deliveries) {
    if (t >= from && t < to) {
      bytes += len;
      ++st.packets;
    }
  }
  st.goodput_bps = static_cast<double>(bytes) * 8.0 / to_seconds(to - from);
  return st;
}

SteadyState steady_state(const MetricsTrace& trace, SimDuration warmup) {
  if (trace.server_deliveries.empty()) return {};
  const SimTime from = trace.server_deliveries.front().first + warmup;
  SimTime to = trace.server_deliveries.back().first;
  for (const auto& h : trace.handoffs) {
    if (h.detach_time > from) {
      to = std::min(to, h.detach_time);
      break;
    }
  }
  return goodput_between(trace, from, to);
}

std::vector<std::pair<std::string, std::string>> summarize(const MetricsTrace& trace) {
  const std::string p = std::string(to_string(trace.mode)) + ".";
  std::vector<std::pair<std::string, std::string>> kv;
  const auto rc = rtt_stats(trace.rtt_client);
  const auto rs = rtt_stats(trace.rtt_server);
  const auto ss = steady_state(trace);

  std::string sources;
  for (const auto& a : trace.server_observed_sources) {
    if (!sources.empty()) sources += ",";
    sources += a.to_string();
  }

  kv.emplace_back(p + "handoffs", std::to_string(trace.handoffs.size()));
  kv.emplace_back(p + "switchover_delay_ms", join_ms(trace.handoffs));
  kv.emplace_back(p + "rtt_client_mean_ms", fmt(rc.mean_ms));
  kv.emplace_back(p + "rtt_client_p95_ms", fmt(rc.p95_ms));
  kv.emplace_back(p + "rtt_server_mean_ms", fmt(rs.mean_ms));
  kv.emplace_back(p + "rtt_server_p95_ms", fmt(rs.p95_ms));
  kv.emplace_back(p + "steady_goodput_bps", fmt(ss.goodput_bps));
  kv.emplace_back(p + "losses", std::to_string(trace.losses));
  kv.emplace_back(p + "resets", std::to_string(trace.resets));
  kv.emplace_back(p + "server_observed_sources", sources.empty() ? "none" : sources);
  kv.emplace_back(p + "data_sent", std::to_string(trace.counters.data_sent));
  kv.emplace_back(p + "data_dropped", std::to_string(trace.counters.data_dropped));
  kv.emplace_back(p + "retransmissions", std::to_string(trace.counters.retransmissions));
  return kv;
}

double Comparison::switchover_delta_ms() const {
  if (!switchover_a || !switchover_b) return 0.0;
  return to_millis(*switchover_b - *switchover_a);
}

Comparison compare_runs(const MetricsTrace& a, const MetricsTrace& b) {
  if (a.events != b.events) throw ComparisonError("traces come from different event lists");
  if (a.throughput_window != b.throughput_window) {
    throw ComparisonError("traces use different throughput windows");
  }
  Comparison c;
  c.label_a = std::string(to_string(a.mode));
  c.label_b = std::string(to_string(b.mode));
  if (c.label_a == c.label_b) {
    c.label_a += "_a";
    c.label_b += "_b";
  }
  c.switchover_a = a.switch_over_delay();
  c.switchover_b = b.switch_over_delay();
  c.rtt_client_a = rtt_stats(a.rtt_client);
  c.rtt_client_b = rtt_stats(b.rtt_client);
  c.rtt_server_a = rtt_stats(a.rtt_server);
  c.rtt_server_b = rtt_stats(b.rtt_server);
  c.steady_a = steady_state(a);
  c.steady_b = steady_state(b);

  const SimTime anchor = a.handoffs.empty() ? SimTime{0} : a.handoffs.front().detach_time;
  std::map<SimDuration, Comparison::AlignedPoint> points;
  for (const auto& s : a.throughput) {
    auto& pt = points[s.window_start - anchor];
    pt.offset = s.window_start - anchor;
    pt.a_bps = s.bits_per_s;
  }
  for (const auto& s : b.throughput) {
    auto& pt = points[s.window_start - anchor];
    pt.offset = s.window_start - anchor;
    pt.b_bps = s.bits_per_s;
  }
  for (const auto& [off, pt] : points) c.aligned_throughput.push_back(pt);
  return c;
}

std::string comparison_csv(const Comparison& c) {
  std::string out = std::string(kCsvHeader) + "\n";
  auto row = [&out](const std::string& series, SimDuration t, const std::string& value, const char* unit) {
    out += series + "," + format_seconds(t) + "," + value + "," + unit + "\n";
  };
  for (const auto& p : c.aligned_throughput) row("throughput_" + c.label_a, p.offset, fmt(p.a_bps), "bps");
  for (const auto& p : c.aligned_throughput) row("throughput_" + c.label_b, p.offset, fmt(p.b_bps), "bps");
  if (c.switchover_a) row("switchover_delay_" + c.label_a, SimDuration{0}, ms_text(*c.switchover_a), "ms");
  if (c.switchover_b) row("switchover_delay_" + c.label_b, SimDuration{0}, ms_text(*c.switchover_b), "ms");
  return out;
}

std::vector<std::pair<std::string, std::string>> summarize(const Comparison& c) {
  std::vector<std::pair<std::string, std::string>> kv;
  const std::string p = "delta." + c.label_b + "_minus_" + c.label_a + ".";
  kv.emplace_back(p + "switchover_delay_ms", fmt(c.switchover_delta_ms()));
  kv.emplace_back(p + "rtt_client_mean_ms", fmt(c.rtt_client_delta_ms()));
  kv.emplace_back(p + "rtt_server_mean_ms", fmt(c.rtt_server_b.mean_ms - c.rtt_server_a.mean_ms));
  kv.emplace_back(p + "steady_goodput_bps", fmt(c.goodput_delta_bps()));
  kv.emplace_back("ratio." + c.label_b + "_over_" + c.label_a + ".steady_goodput", fmt(c.goodput_ratio()));
  const bool faster = c.switchover_a && c.switchover_b && *c.switchover_a < *c.switchover_b;
  kv.emplace_back("faster_switchover", faster ? c.label_a : (c.switchover_a && c.switchover_b &&
                                                             *c.switchover_b < *c.switchover_a
                                                         ? c.label_b
                                                         : std::string("tie")));
  return kv;
}

}  // namespace sdnmob
