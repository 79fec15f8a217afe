#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "sdnmob/packet.hpp"
#include "sdnmob/sim_time.hpp"

namespace sdnmob {

struct RttSample {
  SimTime send_time{0};
  SimDuration rtt{0};

  bool operator==(const RttSample&) const = default;
};

struct TransportHooks {
  // Hands a Data segment to the endpoint, which fills in addresses.
  std::function<void(Packet)> transmit;
  std::function<void(SimTime, std::function<void()>)> schedule;
  std::function<SimTime()> now;
};

struct SenderCounters {
  std::uint64_t submitted = 0;
  std::uint64_t transmissions = 0;
  std::uint64_t retransmissions = 0;
  std::uint64_t timeouts = 0;
};

// Window-limited sender with cumulative acks and a fixed retransmission
// timeout of 4 x smoothed RTT (1 s before the first sample). Timeouts and
// rebinds resend everything outstanding (go-back-N). RTT is sampled only
// from segments that were never retransmitted.
class ReliableSender {
 public:
  static constexpr SimDuration kInitialRto = std::chrono::seconds(1);

  ReliableSender(std::uint32_t conn_id, std::uint32_t window, std::uint32_t header_bytes,
                 TransportHooks hooks, std::uint32_t max_consecutive_timeouts = 8);

  void submit(std::uint32_t payload_len);
  void on_ack(std::uint64_t cumulative_ack);
  // Local address changed: push everything outstanding out again.
  void resend_outstanding();

  bool idle() const noexcept { return snd_una_ == next_seq_; }
  bool aborted() const noexcept { return aborted_; }
  std::uint64_t acked() const noexcept { return snd_una_; }
  std::uint64_t submitted() const noexcept { return next_seq_; }
  std::uint64_t in_flight() const noexcept { return snd_nxt_ - snd_una_; }

  SimDuration rto() const noexcept { return srtt_ ? 4 * *srtt_ : kInitialRto; }
  std::optional<SimDuration> srtt() const noexcept { return srtt_; }
  const std::vector<RttSample>& rtt_samples() const noexcept { return samples_; }
  const SenderCounters& counters() const noexcept { return counters_; }

 private:
  struct Segment {
    std::uint64_t seq;
    std::uint32_t len;
    SimTime first_sent{0};
    bool sent = false;
    bool retransmitted = false;
  };

  void try_send();
  void send_segment(Segment& s);
  void arm_timer();
  void stop_timer() { ++timer_generation_; timer_armed_ = false; }
  void on_timeout(std::uint64_t generation);
  Segment& segment(std::uint64_t seq) { return segs_[seq - snd_una_]; }

  std::uint32_t conn_id_;
  std::uint32_t window_;
  std::uint32_t header_bytes_;
  TransportHooks hooks_;
  std::uint32_t max_timeouts_;

  std::deque<Segment> segs_;  // snd_una_ .. next_seq_-1
  std::uint64_t snd_una_ = 0;
  std::uint64_t snd_nxt_ = 0;
  std::uint64_t next_seq_ = 0;

  std::optional<SimDuration> srtt_;
  std::vector<RttSample> samples_;
  SenderCounters counters_;
  std::uint64_t timer_generation_ = 0;
  bool timer_armed_ = false;
  std::uint32_t consecutive_timeouts_ = 0;
  bool aborted_ = false;
};

// In-order delivery with an unbounded reorder buffer.
class ReliableReceiver {
 public:
  struct Result {
    std::uint64_t ack = 0;
    bool duplicate = false;
    // Segments (seq, len) handed to the application by this arrival.
    std::vector<std::pair<std::uint64_t, std::uint32_t>> delivered;
  };

  Result on_data(std::uint64_t seq, std::uint32_t len);
  std::uint64_t expected() const noexcept { return rcv_nxt_; }

 private:
  std::uint64_t rcv_nxt_ = 0;
  std::map<std::uint64_t, std::uint32_t> out_of_order_;
};

}  // namespace sdnmob
