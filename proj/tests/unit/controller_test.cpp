#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>

#include "sdnmob/controller.hpp"
#include "sdnmob/errors.hpp"

using namespace sdnmob;
using std::chrono::seconds;

namespace {

const Uid kUid1 = MacAddress::parse("aa:bb:cc:00:00:01");
const Uid kUid2 = MacAddress::parse("aa:bb:cc:00:00:02");
const Ipv4Address kRip1(10, 1, 0, 5);
const Ipv4Address kRip2(10, 2, 0, 9);

MobilityServiceConfig pool(const char* range) {
  MobilityServiceConfig c;
  c.vpip_pool = Ipv4Range::parse(range);
  return c;
}

// Reference for the allocator: mt19937_64 output, reject below 2^64 mod n,
// take the remainder, index the free addresses in ascending order.
Ipv4Address oracle_first_draw(std::uint64_t seed, const Ipv4Range& range) {
  std::mt19937_64 eng(seed);
  const std::uint64_t n = range.size();
  const std::uint64_t threshold = (~std::uint64_t{0} % n + 1) % n;
  std::uint64_t x;
  do {
    x = eng();
  } while (x < threshold);
  return Ipv4Address(range.first().value() + static_cast<std::uint32_t>(x % n));
}

}  // namespace

TEST(HostReport, WireFormatIsExact) {
  EXPECT_EQ((HostReport{kUid1, kRip1}).serialize(), "aa:bb:cc:00:00:01#10.1.0.5\n");
  EXPECT_EQ(HostReport::parse("aa:bb:cc:00:00:01#10.1.0.5\n"), (HostReport{kUid1, kRip1}));
  EXPECT_EQ(HostReport::parse("aa:bb:cc:00:00:01#10.1.0.5"), (HostReport{kUid1, kRip1}));
}

TEST(HostReport, ParseRejectsMalformedLines) {
  for (const char* bad : {"aa:bb:cc:00:00:0110.1.0.5", "aa:bb:cc:00:00:01##10.1.0.5",
                          "#aa:bb:cc:00:00:01#10.1.0.5", "AA:BB:CC:00:00:01#10.1.0.5",
                          "aa:bb:cc:00:00:01#10.1.0", "aa:bb:cc:00:00#10.1.0.5", ""}) {
    EXPECT_THROW(HostReport::parse(bad), ParseError) << bad;
  }
}

TEST(HostReport, RandomRoundTrip) {
  std::mt19937_64 gen(77);
  for (int i = 0; i < 10000; ++i) {
    const HostReport r{MacAddress::from_u64(gen() & 0xffffffffffffull),
                       Ipv4Address(static_cast<std::uint32_t>(gen()))};
    const std::string wire = r.serialize();
    ASSERT_EQ(HostReport::parse(wire), r) << wire;
    EXPECT_EQ(std::count(wire.begin(), wire.end(), '#'), 1);
  }
}

TEST(HostReportDecoder, ReassemblesSplitLines) {
  HostReportDecoder d;
  const std::string stream =
      HostReport{kUid1, kRip1}.serialize() + HostReport{kUid2, kRip2}.serialize();
  std::vector<HostReport> got;
  for (char c : stream) {
    auto part = d.feed(std::string_view(&c, 1));
    got.insert(got.end(), part.begin(), part.end());
  }
  ASSERT_EQ(got.size(), 2u);
  EXPECT_EQ(got[1], (HostReport{kUid2, kRip2}));
  EXPECT_FALSE(d.has_partial());
  EXPECT_TRUE(d.feed("aa:bb").empty());
  EXPECT_TRUE(d.has_partial());
}

TEST(AllocateVpip, ForcedChoiceAndExhaustion) {
  Rng rng(1);
  const auto range = Ipv4Range::parse("198.51.100.1-198.51.100.3");
  const std::set<Ipv4Address> used = {Ipv4Address(198, 51, 100, 1), Ipv4Address(198, 51, 100, 3)};
  EXPECT_EQ(allocate_vpip(range, used, rng), Ipv4Address(198, 51, 100, 2));
  std::set<Ipv4Address> all = used;
  all.insert(Ipv4Address(198, 51, 100, 2));
  EXPECT_THROW(allocate_vpip(range, all, rng), ExhaustedError);
}

TEST(AllocateVpip, FirstDrawMatchesGeneratorOracle) {
  const auto range = Ipv4Range::parse("198.51.100.0/24");
  for (std::uint64_t seed : {0ull, 1ull, 42ull, 0xdeadbeefull}) {
    Rng rng(seed);
    EXPECT_EQ(allocate_vpip(range, {}, rng), oracle_first_draw(seed, range)) << seed;
  }
}

TEST(AllocateVpip, GoldenFirstDrawForSeed42) {
  Rng rng(42);
  EXPECT_EQ(allocate_vpip(Ipv4Range::parse("198.51.100.0/24"), {}, rng).to_string(), "198.51.100.85");
}

TEST(MobilityService, NewClientGetsRecordAndNatPair) {
  MobilityService svc(pool("198.51.100.0/24"), 42);
  const auto actions = svc.handle_host_report({kUid1, kRip1}, seconds(1));
  ASSERT_EQ(actions.size(), 1u);
  const auto& a = actions.front();
  EXPECT_EQ(a.kind, ControlAction::Kind::InstallFlows);
  ASSERT_TRUE(a.snat && a.dnat);
  const auto rec = *svc.lookup(kUid1);
  EXPECT_EQ(rec.rip, kRip1);
  EXPECT_TRUE(svc.config().vpip_pool.contains(rec.vpip));
  EXPECT_EQ(rec.last_seen, seconds(1));
  EXPECT_EQ(a.snat->match, FlowMatch::source(kRip1));
  EXPECT_EQ(a.snat->actions.front(), FlowAction::rewrite_src(rec.vpip));
  EXPECT_EQ(a.dnat->match, FlowMatch::destination(rec.vpip));
  EXPECT_EQ(a.dnat->actions.front(), FlowAction::rewrite_dst(kRip1));
  EXPECT_EQ(a.snat->priority, kNatPriority);
  EXPECT_EQ(a.record, rec);
}

TEST(MobilityService, MoveKeepsVpipAndEmitsNewPair) {
  MobilityService svc(pool("198.51.100.0/24"), 42);
  svc.handle_host_report({kUid1, kRip1}, seconds(1));
  const auto before = *svc.lookup(kUid1);
  const auto actions = svc.handle_host_report({kUid1, kRip2}, seconds(12));
  ASSERT_EQ(actions.size(), 1u);
  EXPECT_EQ(actions[0].kind, ControlAction::Kind::InstallFlows);
  EXPECT_EQ(actions[0].snat->match, FlowMatch::source(kRip2));
  const auto after = *svc.lookup(kUid1);
  EXPECT_EQ(after.rip, kRip2);
  EXPECT_EQ(after.vpip, before.vpip);
  EXPECT_EQ(after.last_seen, seconds(12));
  EXPECT_EQ(svc.table().find_by_rip(kRip1), nullptr);
}

TEST(MobilityService, SameReportRefreshes) {
  MobilityService svc(pool("198.51.100.0/24"), 42);
  svc.handle_host_report({kUid1, kRip1}, seconds(1));
  const auto actions = svc.handle_host_report({kUid1, kRip1}, seconds(4));
  ASSERT_EQ(actions.size(), 1u);
  EXPECT_EQ(actions[0].kind, ControlAction::Kind::RefreshFlows);
  EXPECT_EQ(svc.table().size(), 1u);
  EXPECT_EQ(svc.lookup(kUid1)->last_seen, seconds(4));
}

TEST(MobilityService, RejectsRipInsideVirtualPool) {
  MobilityService svc(pool("198.51.100.0/24"), 42);
  EXPECT_THROW(svc.handle_host_report({kUid1, Ipv4Address(198, 51, 100, 3)}, seconds(0)), ControlError);
  EXPECT_THROW(svc.handle_host_report({kUid1, kUnspecifiedAddress}, seconds(0)), ControlError);
  EXPECT_TRUE(svc.table().empty());
}

TEST(MobilityService, PoolExhaustionPropagates) {
  MobilityService svc(pool("198.51.100.1-198.51.100.1"), 3);
  svc.handle_host_report({kUid1, kRip1}, seconds(0));
  EXPECT_THROW(svc.handle_host_report({kUid2, kRip2}, seconds(0)), ExhaustedError);
}

TEST(MobilityService, LookupAbsentUid) {
  MobilityService svc(pool("198.51.100.0/24"), 42);
  EXPECT_FALSE(svc.lookup(kUid2).has_value());
}

TEST(MobilityService, EvictStaleFreesVpipForReuse) {
  MobilityService svc(pool("198.51.100.1-198.51.100.1"), 9);
  EXPECT_TRUE(svc.evict_stale(seconds(100), seconds(10)).empty());
  svc.handle_host_report({kUid1, kRip1}, seconds(0));
  EXPECT_TRUE(svc.evict_stale(seconds(10), seconds(10)).empty());
  const auto ev = svc.evict_stale(seconds(20), seconds(10));
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0].kind, ControlAction::Kind::EvictClient);
  EXPECT_EQ(ev[0].uid, kUid1);
  EXPECT_TRUE(svc.table().used_vpips().empty());
  const auto again = svc.handle_host_report({kUid2, kRip2}, seconds(21));
  EXPECT_EQ(again.front().record.vpip, Ipv4Address(198, 51, 100, 1));
}

TEST(MobilityService, PacketInRepairsOnlyKnownClients) {
  MobilityService svc(pool("198.51.100.0/24"), 42);
  Packet p;
  p.src_ip = kRip1;
  p.src_mac = kUid1;
  p.dst_ip = Ipv4Address(203, 0, 113, 10);
  EXPECT_TRUE(svc.handle_packet_in(p, seconds(0)).empty());
  svc.handle_host_report({kUid1, kRip1}, seconds(0));
  const auto acts = svc.handle_packet_in(p, seconds(40));
  ASSERT_EQ(acts.size(), 1u);
  EXPECT_EQ(acts[0].kind, ControlAction::Kind::InstallFlows);
  EXPECT_EQ(acts[0].snat->match, FlowMatch::source(kRip1));

  Packet outside = p;
  outside.src_ip = Ipv4Address(203, 0, 113, 10);
  outside.src_mac = MacAddress::parse("02:00:00:00:00:99");
  EXPECT_TRUE(svc.handle_packet_in(outside, seconds(40)).empty());
  Packet old_rip = p;
  old_rip.src_ip = kRip2;
  EXPECT_TRUE(svc.handle_packet_in(old_rip, seconds(40)).empty());
}

TEST(MobilityService, KeepaliveFromLeftZoneIsIgnored) {
  MobilityService svc(pool("198.51.100.0/24"), 42);
  svc.handle_host_report({kUid1, kRip1}, seconds(0));
  svc.handle_host_report({kUid1, kRip2}, seconds(5));
  EXPECT_TRUE(svc.handle_keepalive({kUid1, kRip1}, seconds(6)).empty());
  EXPECT_EQ(svc.lookup(kUid1)->rip, kRip2);
  EXPECT_EQ(svc.handle_keepalive({kUid1, kRip2}, seconds(7)).front().kind,
            ControlAction::Kind::RefreshFlows);
  EXPECT_EQ(svc.handle_keepalive({kUid2, kRip1}, seconds(8)).back().kind,
            ControlAction::Kind::InstallFlows);
}

// ---- properties over random report streams ------------------------------

namespace {

struct ModelRecord {
  Ipv4Address rip;
  SimTime last_seen;
};

std::vector<HostReport> random_reports(std::mt19937_64& gen, int n) {
  std::vector<HostReport> out;
  for (int i = 0; i < n; ++i) {
    const Uid uid = MacAddress::from_u64(0x020000000000ull + gen() % 6);
    const Ipv4Address rip(10, static_cast<std::uint8_t>(1 + gen() % 2), 0,
                          static_cast<std::uint8_t>(1 + gen() % 8));
    out.push_back({uid, rip});
  }
  return out;
}

}  // namespace

TEST(MobilityServiceProperty, ReplayAgreesWithReferenceModel) {
  std::mt19937_64 gen(100);
  for (int run = 0; run < 200; ++run) {
    MobilityService svc(pool("198.51.100.0/24"), run);
    std::map<Uid, ModelRecord> model;
    std::map<Uid, Ipv4Address> vpip_of;
    SimTime now{0};
    for (const auto& r : random_reports(gen, 60)) {
      now += seconds(1);
      const auto acts = svc.handle_host_report(r, now);
      // Model: another uid holding this rIP is dropped first.
      std::vector<Uid> displaced;
      for (const auto& [u, m] : model) {
        if (u != r.uid && m.rip == r.rip) displaced.push_back(u);
      }
      for (const auto& u : displaced) {
        model.erase(u);
        vpip_of.erase(u);
      }
      const bool existed = model.count(r.uid) != 0;
      const bool moved = existed && model[r.uid].rip != r.rip;
      model[r.uid] = {r.rip, now};

      ASSERT_EQ(acts.size(), displaced.size() + 1);
      const auto& last = acts.back();
      EXPECT_EQ(last.kind, existed && !moved ? ControlAction::Kind::RefreshFlows
                                             : ControlAction::Kind::InstallFlows);
      const auto rec = *svc.lookup(r.uid);
      if (existed) EXPECT_EQ(rec.vpip, vpip_of[r.uid]);  // vpIP stability
      vpip_of[r.uid] = rec.vpip;

      // Final-state diff against the model plus injectivity.
      ASSERT_EQ(svc.table().size(), model.size());
      std::set<Ipv4Address> rips, vpips;
      for (const auto& rec2 : svc.table().snapshot()) {
        const auto& m = model.at(rec2.uid);
        EXPECT_EQ(rec2.rip, m.rip);
        EXPECT_EQ(rec2.last_seen, m.last_seen);
        rips.insert(rec2.rip);
        vpips.insert(rec2.vpip);
      }
      EXPECT_EQ(rips.size(), model.size());
      EXPECT_EQ(vpips, svc.table().used_vpips());
      EXPECT_EQ(vpips.size(), model.size());
    }
  }
}

TEST(MobilityServiceProperty, RepeatedReportIsIdempotent) {
  std::mt19937_64 gen(5);
  for (int run = 0; run < 100; ++run) {
    MobilityService once(pool("198.51.100.0/24"), 7);
    MobilityService twice(pool("198.51.100.0/24"), 7);
    for (const auto& r : random_reports(gen, 30)) {
      once.handle_host_report(r, seconds(run));
      twice.handle_host_report(r, seconds(run));
      twice.handle_host_report(r, seconds(run));
      ASSERT_EQ(once.table().snapshot(), twice.table().snapshot());
    }
  }
}

TEST(MobilityServiceProperty, FixedSeedIsDeterministic) {
  std::mt19937_64 gen(12);
  const auto reports = random_reports(gen, 200);
  MobilityService a(pool("198.51.100.0/24"), 99);
  MobilityService b(pool("198.51.100.0/24"), 99);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const SimTime t = seconds(static_cast<long>(i));
    ASSERT_EQ(a.handle_host_report(reports[i], t), b.handle_host_report(reports[i], t));
    if (i % 17 == 0) ASSERT_EQ(a.evict_stale(t, seconds(20)), b.evict_stale(t, seconds(20)));
  }
  EXPECT_EQ(a.table().snapshot(), b.table().snapshot());
}
