#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "sdnmob/cli.hpp"
#include "sdnmob/config.hpp"
#include "sdnmob/controller.hpp"
#include "sdnmob/errors.hpp"
#include "sdnmob/flow_table.hpp"
#include "sdnmob/metrics.hpp"
#include "sdnmob/network.hpp"

namespace py = pybind11;
using namespace sdnmob;

namespace {

MobilityMode mode_from(const std::string& name) {
  if (name == "sdn") return MobilityMode::Sdn;
  if (name == "pmip") return MobilityMode::Pmip;
  if (name == "plain") return MobilityMode::Plain;
  throw py::value_error("mode must be 'sdn', 'pmip' or 'plain'");
}

MetricsTrace run(const RunConfig& cfg, const std::string& mode) {
  const MobilityMode m = mode_from(mode);
  if (m == MobilityMode::Pmip) {
    return run_pmip_baseline(cfg.topology, cfg.events,
                             cfg.tunnel.value_or(TunnelConfig::defaults_for(cfg.topology)));
  }
  return run_scenario(cfg.topology, cfg.events, m);
}

std::optional<double> delay_ms(const MetricsTrace& t) {
  if (auto d = t.switch_over_delay()) return to_millis(*d);
  return std::nullopt;
}

std::vector<std::string> sources(const MetricsTrace& t) {
  std::vector<std::string> out;
  for (const auto& a : t.server_observed_sources) out.push_back(a.to_string());
  return out;
}

py::dict as_dict(const std::vector<std::pair<std::string, std::string>>& kv) {
  py::dict d;
  for (const auto& [k, v] : kv) d[py::str(k)] = v;
  return d;
}

// sNAT then dNAT on a packet from rip to dst; returns the restored
// (src, dst) pair of the reply direction.
py::tuple nat_round_trip(const std::string& rip, const std::string& vpip, const std::string& peer) {
  const auto r = Ipv4Address::parse(rip);
  const auto v = Ipv4Address::parse(vpip);
  FlowTable table;
  table.install(make_default_rule(), SimTime{0});
  table.install(make_snat_rule(r, v, kExternalPort, kDefaultIdleTimeout), SimTime{0});
  table.install(make_dnat_rule(v, r, kDefaultIdleTimeout), SimTime{0});

  Packet out;
  out.src_ip = r;
  out.dst_ip = Ipv4Address::parse(peer);
  const auto [translated, port_out] = apply_actions(*table.match(out, SimTime{0}), out);
  Packet reply;
  reply.src_ip = translated.dst_ip;
  reply.dst_ip = translated.src_ip;
  const auto [restored, port_in] = apply_actions(*table.match(reply, SimTime{0}), reply);
  return py::make_tuple(translated.src_ip.to_string(), restored.dst_ip.to_string());
}

}  // namespace

PYBIND11_MODULE(_sdnmob, m) {
  m.doc() = "SDN-based L3 mobility simulator";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ScenarioError>(m, "ScenarioError", base.ptr());
  py::register_exception<ComparisonError>(m, "ComparisonError", base.ptr());

  py::class_<RunConfig>(m, "RunConfig")
      .def_property_readonly("mode", [](const RunConfig& c) { return std::string(to_string(c.mode)); })
      .def_property("seed", [](const RunConfig& c) { return c.topology.seed; },
                    [](RunConfig& c, std::uint64_t s) { c.topology.seed = s; })
      .def_readwrite("output_dir", &RunConfig::output_dir)
      .def_property_readonly("zone_ids",
                             [](const RunConfig& c) {
                               std::vector<std::string> ids;
                               for (const auto& z : c.topology.zones) ids.push_back(z.zone_id);
                               return ids;
                             })
      .def_property_readonly("event_count", [](const RunConfig& c) { return c.events.size(); })
      .def_property_readonly("has_tunnel", [](const RunConfig& c) { return c.tunnel.has_value(); })
      .def("serialize", &serialize_config)
      .def("__eq__", [](const RunConfig& a, const RunConfig& b) { return a == b; });

  py::class_<MetricsTrace>(m, "MetricsTrace")
      .def_property_readonly("mode", [](const MetricsTrace& t) { return std::string(to_string(t.mode)); })
      .def_property_readonly("switch_over_delay_ms", &delay_ms)
      .def_readonly("resets", &MetricsTrace::resets)
      .def_readonly("losses", &MetricsTrace::losses)
      .def_property_readonly("server_observed_sources", &sources)
      .def_property_readonly("rtt_client_ms",
                             [](const MetricsTrace& t) {
                               std::vector<std::pair<double, double>> out;
                               for (const auto& s : t.rtt_client) out.emplace_back(to_seconds(s.send_time), to_millis(s.rtt));
                               return out;
                             })
      .def_property_readonly("throughput_bps",
                             [](const MetricsTrace& t) {
                               std::vector<std::pair<double, double>> out;
                               for (const auto& s : t.throughput) out.emplace_back(to_seconds(s.window_start), s.bits_per_s);
                               return out;
                             })
      .def("to_csv", &to_csv)
      .def("summary", [](const MetricsTrace& t) { return as_dict(summarize(t)); });

  m.def("load_config", &load_config, py::arg("path"));
  m.def("parse_config", &parse_config, py::arg("text"), py::arg("source_name") = "<config>");
  m.def("run", &run, py::arg("config"), py::arg("mode") = "sdn",
        py::call_guard<py::gil_scoped_release>());
  m.def(
      "compare",
      [](const MetricsTrace& a, const MetricsTrace& b) {
        const auto c = compare_runs(a, b);
        py::dict d = as_dict(summarize(c));
        d["csv"] = comparison_csv(c);
        return d;
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "execute",
      [](const RunConfig& cfg) {
        py::gil_scoped_release release;
        return execute(cfg).artifacts;
      },
      py::arg("config"));

  m.def("serialize_host_report", [](const std::string& uid, const std::string& rip) {
    return HostReport{MacAddress::parse(uid), Ipv4Address::parse(rip)}.serialize();
  });
  m.def("parse_host_report", [](const std::string& line) {
    const auto r = HostReport::parse(line);
    return py::make_tuple(r.uid.to_string(), r.rip.to_string());
  });
  m.def("nat_round_trip", &nat_round_trip, py::arg("rip"), py::arg("vpip"), py::arg("peer"));
}
