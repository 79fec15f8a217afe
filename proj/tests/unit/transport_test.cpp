#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "sdnmob/event_queue.hpp"
#include "sdnmob/transport.hpp"

using namespace sdnmob;
using std::chrono::milliseconds;

namespace {

// Sender and receiver joined by a fixed-delay channel in both directions.
// `lose` decides per Data transmission whether the copy vanishes.
struct Loopback {
  EventQueue q;
  ReliableReceiver rx;
  SimDuration one_way;
  std::function<bool(const Packet&)> lose = [](const Packet&) { return false; };
  std::vector<std::pair<std::uint64_t, std::uint32_t>> app;
  std::uint64_t duplicates = 0;
  std::unique_ptr<ReliableSender> tx;

  explicit Loopback(SimDuration d, std::uint32_t window = 8, std::uint32_t max_timeouts = 8)
      : one_way(d) {
    TransportHooks hooks;
    hooks.now = [this] { return q.now(); };
    hooks.schedule = [this](SimTime at, std::function<void()> fn) { q.schedule(at, std::move(fn)); };
    hooks.transmit = [this](Packet p) {
      if (lose(p)) return;
      q.schedule(q.now() + one_way, [this, p] {
        const auto r = rx.on_data(p.seq, p.payload_len);
        if (r.duplicate) ++duplicates;
        app.insert(app.end(), r.delivered.begin(), r.delivered.end());
        q.schedule(q.now() + one_way, [this, ack = r.ack] { tx->on_ack(ack); });
      });
    };
    tx = std::make_unique<ReliableSender>(7, window, 40, hooks, max_timeouts);
  }
};

}  // namespace

TEST(ReliableReceiver, DeliversInOrderAndBuffersGaps) {
  ReliableReceiver rx;
  auto r = rx.on_data(1, 10);
  EXPECT_TRUE(r.delivered.empty());
  EXPECT_EQ(r.ack, 0u);
  r = rx.on_data(0, 20);
  ASSERT_EQ(r.delivered.size(), 2u);
  EXPECT_EQ(r.delivered[0], (std::pair<std::uint64_t, std::uint32_t>{0, 20}));
  EXPECT_EQ(r.ack, 2u);
  EXPECT_TRUE(rx.on_data(0, 20).duplicate);
  EXPECT_TRUE(rx.on_data(5, 1).delivered.empty());
  EXPECT_TRUE(rx.on_data(5, 1).duplicate);
}

TEST(ReliableSender, LosslessTransferSamplesRtt) {
  Loopback lb(milliseconds(10));
  for (int i = 0; i < 20; ++i) lb.tx->submit(100);
  lb.q.run();
  EXPECT_TRUE(lb.tx->idle());
  EXPECT_EQ(lb.app.size(), 20u);
  EXPECT_EQ(lb.tx->counters().retransmissions, 0u);
  ASSERT_FALSE(lb.tx->rtt_samples().empty());
  for (const auto& s : lb.tx->rtt_samples()) EXPECT_EQ(s.rtt, milliseconds(20));
  EXPECT_EQ(lb.tx->rto(), milliseconds(80));
}

TEST(ReliableSender, WindowBoundsInFlight) {
  Loopback lb(milliseconds(10), 4);
  std::uint64_t peak = 0;
  for (int i = 0; i < 12; ++i) lb.tx->submit(10);
  while (lb.q.step()) peak = std::max(peak, lb.tx->in_flight());
  EXPECT_LE(peak, 4u);
  EXPECT_EQ(lb.tx->acked(), 12u);
}

TEST(ReliableSender, LostSegmentIsRetransmittedAfterTimeout) {
  Loopback lb(milliseconds(10));
  bool dropped = false;
  lb.lose = [&](const Packet& p) {
    if (p.seq == 2 && !dropped) return dropped = true;
    return false;
  };
  for (int i = 0; i < 5; ++i) lb.tx->submit(100);
  lb.q.run();
  EXPECT_EQ(lb.app.size(), 5u);
  EXPECT_GE(lb.tx->counters().timeouts, 1u);
  EXPECT_GE(lb.tx->counters().retransmissions, 1u);
  for (const auto& s : lb.tx->rtt_samples()) EXPECT_EQ(s.rtt, milliseconds(20));
}

TEST(ReliableSender, AbortsAfterRepeatedTimeouts) {
  Loopback lb(milliseconds(10), 8, 3);
  lb.lose = [](const Packet&) { return true; };
  lb.tx->submit(100);
  lb.q.run();
  EXPECT_TRUE(lb.tx->aborted());
  EXPECT_EQ(lb.tx->counters().timeouts, 4u);
  lb.tx->submit(100);
  EXPECT_EQ(lb.tx->submitted(), 1u);
}

TEST(ReliableSender, RejectsEmptyPayloadAndZeroWindow) {
  Loopback lb(milliseconds(1));
  EXPECT_THROW(lb.tx->submit(0), std::invalid_argument);
  EXPECT_THROW(ReliableSender(1, 0, 40, TransportHooks{}), std::invalid_argument);
}

TEST(ReliableSender, ResendOutstandingPushesWindowAgain) {
  Loopback lb(milliseconds(10));
  for (int i = 0; i < 3; ++i) lb.tx->submit(100);
  const auto sent = lb.tx->counters().transmissions;
  lb.tx->resend_outstanding();
  EXPECT_EQ(lb.tx->counters().transmissions, sent + 3);
  lb.q.run();
  EXPECT_EQ(lb.app.size(), 3u);
  EXPECT_EQ(lb.duplicates, 3u);
}

TEST(ReliableTransportProperty, RandomLossStillDeliversEverythingOnce) {
  std::mt19937_64 gen(55);
  for (int run = 0; run < 50; ++run) {
    Loopback lb(milliseconds(1 + static_cast<long>(gen() % 20)), 1 + static_cast<std::uint32_t>(gen() % 16), 50);
    lb.lose = [&](const Packet&) { return gen() % 5 == 0; };
    const int n = 50 + static_cast<int>(gen() % 100);
    for (int i = 0; i < n; ++i) lb.tx->submit(1 + static_cast<std::uint32_t>(gen() % 1460));
    lb.q.run();
    ASSERT_FALSE(lb.tx->aborted());
    ASSERT_EQ(lb.app.size(), static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) EXPECT_EQ(lb.app[i].first, static_cast<std::uint64_t>(i));
    const auto& c = lb.tx->counters();
    EXPECT_EQ(c.transmissions, c.submitted + c.retransmissions);
    for (const auto& s : lb.tx->rtt_samples()) EXPECT_GE(s.rtt, 2 * lb.one_way);
  }
}
