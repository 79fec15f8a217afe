#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "sdnmob/config.hpp"
#include "sdnmob/errors.hpp"

using namespace sdnmob;
using std::chrono::milliseconds;
using std::chrono::seconds;

namespace {

const char* kMinimal = R"([topology]
seed = 7

[zones]
zone1 = 10.1.0.0/24
zone2 = 10.2.0.0/24, dhcp_latency_ms=50, tap_filter=dhcp_rs

[events]
1 start_echo interval_ms=20 payload_bytes=64
2.5 move zone2
3 stop
)";

std::size_t error_line(const std::string& text) {
  try {
    parse_config(text, "t.ini");
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.file(), "t.ini");
    return e.line();
  }
  ADD_FAILURE() << "no ConfigError for:\n" << text;
  return 0;
}

std::string error_text(const std::string& text) {
  try {
    parse_config(text, "t.ini");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, BundledHandoffBasicLoads) {
  const auto cfg = load_config(std::string(SDNMOB_SCENARIO_DIR) + "/handoff_basic.ini");
  ASSERT_EQ(cfg.topology.zones.size(), 2u);
  std::size_t moves = 0;
  for (const auto& e : cfg.events) {
    if (e.kind == ScenarioEvent::Kind::MoveClient) {
      ++moves;
      EXPECT_EQ(e.at, seconds(10));
      EXPECT_EQ(e.zone_id, "zone2");
    }
  }
  EXPECT_EQ(moves, 1u);
  EXPECT_EQ(cfg.mode, RunMode::Both);
  ASSERT_TRUE(cfg.tunnel);
  EXPECT_EQ(parse_config(serialize_config(cfg)), cfg);
}

TEST(Config, EveryBundledScenarioRoundTrips) {
  for (const auto& entry : std::filesystem::directory_iterator(SDNMOB_SCENARIO_DIR)) {
    if (entry.path().extension() != ".ini") continue;
    const auto cfg = load_config(entry.path().string());
    EXPECT_EQ(parse_config(serialize_config(cfg)), cfg) << entry.path();
  }
}

TEST(Config, MinimalFileUsesDefaults) {
  const auto cfg = parse_config(kMinimal);
  EXPECT_EQ(cfg.topology.seed, 7u);
  EXPECT_EQ(cfg.topology.control_delay, milliseconds(5));
  EXPECT_EQ(cfg.topology.zones[1].dhcp_latency, milliseconds(50));
  EXPECT_EQ(cfg.topology.zones[1].tap_filter, TapFilter::DhcpAndRsOnly);
  EXPECT_EQ(cfg.events[1].at, milliseconds(2500));
  EXPECT_EQ(cfg.mode, RunMode::Sdn);
  EXPECT_FALSE(cfg.tunnel);
}

TEST(Config, EmptyFileNamesMissingTopology) {
  EXPECT_EQ(error_text(""), "t.ini:1: missing [topology] section");
}

TEST(Config, MissingFileIsAConfigError) {
  EXPECT_THROW(load_config("/nonexistent/never.ini"), ConfigError);
}

TEST(Config, UnknownZoneInEventPointsAtItsLine) {
  std::string text = kMinimal;
  text.replace(text.find("move zone2"), 10, "move zone9");
  EXPECT_EQ(error_line(text), 10u);
  EXPECT_NE(error_text(text).find("zone9"), std::string::npos);
}

TEST(Config, PmipWithoutTunnelIsRejected) {
  const std::string text = std::string(kMinimal) + "\n[run]\nmode = pmip\n";
  EXPECT_EQ(error_line(text), 13u);
  EXPECT_NE(error_text(text).find("[tunnel]"), std::string::npos);
  EXPECT_NO_THROW(parse_config(text + "[tunnel]\n"));
}

TEST(Config, EmptyTunnelSectionTakesDefaults) {
  auto cfg = parse_config(std::string(kMinimal) + "[tunnel]\n");
  ASSERT_TRUE(cfg.tunnel);
  EXPECT_EQ(cfg.tunnel->encap_overhead_bytes, 40u);
  EXPECT_EQ(cfg.tunnel->binding_update_delay, milliseconds(10));
}

TEST(Config, ValueErrorsCarryLineNumbers) {
  struct Case {
    std::string from, to;
    std::size_t line;
  };
  const std::vector<Case> cases = {
      {"seed = 7", "sed = 7", 2},
      {"seed = 7", "seed = seven", 2},
      {"seed = 7", "seed = 7\nseed = 8", 3},
      {"zone1 = 10.1.0.0/24", "zone1 = 10.1.0.0/33", 5},
      {"zone1 = 10.1.0.0/24", "zone1 = 10.2.0.0/25", 5},
      {"zone1 = 10.1.0.0/24", "zone1 = 198.51.100.0/25", 5},
      {"tap_filter=dhcp_rs", "tap_filter=some", 6},
      {"3 stop", "3 halt", 11},
      {"3 stop", "2 stop", 11},
      {"interval_ms=20", "interval_ms=0", 9},
      {"[events]", "[evnts]", 8},
  };
  for (const auto& c : cases) {
    std::string text = kMinimal;
    text.replace(text.find(c.from), c.from.size(), c.to);
    EXPECT_EQ(error_line(text), c.line) << c.to;
  }
}

TEST(Config, ExactDecimalTimes) {
  std::string text = kMinimal;
  text.replace(text.find("seed = 7"), 8, "control_delay_ms = 0.000001\nidle_timeout_s = 1.000000001");
  const auto cfg = parse_config(text);
  EXPECT_EQ(cfg.topology.control_delay, SimDuration{1});
  EXPECT_EQ(cfg.topology.idle_timeout, SimDuration{1'000'000'001});
}

TEST(Config, LinkBandwidthAppliesToUnsetTiers) {
  std::string text = kMinimal;
  text.replace(text.find("seed = 7"), 8, "link_bandwidth_bps = 5000000\nexternal_bandwidth_bps = 1000000");
  const auto cfg = parse_config(text);
  EXPECT_EQ(cfg.topology.access.bandwidth_bps, 5'000'000u);
  EXPECT_EQ(cfg.topology.external.bandwidth_bps, 1'000'000u);
}

TEST(ConfigProperty, RandomConfigsRoundTrip) {
  std::mt19937_64 gen(21);
  auto ms = [&](std::uint64_t max_ms) { return SimDuration(static_cast<std::int64_t>(gen() % (max_ms * 1'000'000 + 1))); };
  for (int i = 0; i < 300; ++i) {
    RunConfig c;
    auto& t = c.topology;
    t.seed = gen();
    t.zones.clear();
    const int zones = 1 + static_cast<int>(gen() % 4);
    for (int z = 0; z < zones; ++z) {
      ZoneConfig zc;
      zc.zone_id = "z" + std::to_string(z);
      zc.dhcp_range = gen() % 2 ? Ipv4Range::cidr(Ipv4Address(10, static_cast<std::uint8_t>(z + 1), 0, 0), 24)
                                : Ipv4Range(Ipv4Address(10, static_cast<std::uint8_t>(z + 1), 0, 10),
                                            Ipv4Address(10, static_cast<std::uint8_t>(z + 1), 0, 20));
      zc.dhcp_latency = ms(500);
      zc.tap_filter = gen() % 2 ? TapFilter::AllPackets : TapFilter::DhcpAndRsOnly;
      t.zones.push_back(zc);
    }
    t.access = {1 + gen() % 100'000'000, ms(10)};
    t.distribution = {1 + gen() % 100'000'000, ms(10)};
    t.external = {1 + gen() % 100'000'000, ms(10)};
    t.control_delay = ms(20);
    t.idle_timeout = seconds(static_cast<long>(gen() % 100));
    t.keepalive_interval = SimDuration(1 + static_cast<std::int64_t>(gen() % 400'000'000'000));
    t.liveness_factor = 1.0 + static_cast<double>(1 + gen() % 1000) / 97.0;
    t.header_bytes = 1 + static_cast<std::uint32_t>(gen() % 100);
    t.send_window = 1 + static_cast<std::uint32_t>(gen() % 100);
    t.packet_in_buffer = gen() % 100;
    t.packet_in_timeout = ms(5000);
    t.flow_sweep_interval = milliseconds(1 + static_cast<long>(gen() % 2000));
    t.throughput_window = milliseconds(1 + static_cast<long>(gen() % 500));
    if (gen() % 2) t.initial_zone = t.zones.back().zone_id;

    SimTime at = ms(2000);
    c.events.push_back(gen() % 2 ? ScenarioEvent::start_echo(at, milliseconds(1 + static_cast<long>(gen() % 100)),
                                                              1 + static_cast<std::uint32_t>(gen() % 1460))
                                 : ScenarioEvent::start_bulk(at, 1 + gen() % 10'000'000,
                                                             1 + static_cast<std::uint32_t>(gen() % 1460)));
    std::string where = t.initial_zone_id();
    for (int k = 0; zones > 1 && k < 3; ++k) {
      at += SimDuration(1 + static_cast<std::int64_t>(gen() % 5'000'000'000));
      std::string to;
      do {
        to = t.zones[gen() % t.zones.size()].zone_id;
      } while (to == where);
      c.events.push_back(ScenarioEvent::move_client(at, to));
      where = to;
    }
    c.events.push_back(ScenarioEvent::stop(at + seconds(1)));
    c.mode = static_cast<RunMode>(gen() % 3);
    if (c.mode != RunMode::Sdn || gen() % 2) {
      c.tunnel = TunnelConfig{1 + static_cast<std::uint32_t>(gen() % 80), ms(30)};
    }
    c.output_dir = "out/run" + std::to_string(i);

    const std::string text = serialize_config(c);
    RunConfig back;
    ASSERT_NO_THROW(back = parse_config(text)) << text;
    ASSERT_EQ(back, c) << text;
    EXPECT_EQ(serialize_config(back), text);
  }
}

TEST(RunMode, ParseAndName) {
  for (auto m : {RunMode::Sdn, RunMode::Pmip, RunMode::Both}) EXPECT_EQ(parse_run_mode(to_string(m)), m);
  EXPECT_FALSE(parse_run_mode("SDN"));
}

TEST(CheckRunConfig, TunnelRequiredOutsideSdn) {
  RunConfig c = parse_config(kMinimal);
  c.mode = RunMode::Both;
  EXPECT_THROW(check_run_config(c), ConfigError);
  c.tunnel = TunnelConfig{};
  EXPECT_NO_THROW(check_run_config(c));
}
