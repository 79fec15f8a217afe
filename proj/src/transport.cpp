#include "sdnmob/transport.hpp"

#include <algorithm>
#include <stdexcept>

namespace sdnmob {

ReliableSender::ReliableSender(std::uint32_t conn_id, std::uint32_t window,
                               std::uint32_t header_bytes, TransportHooks hooks,
                               std::uint32_t max_consecutive_timeouts)
    : conn_id_(conn_id),
      window_(window),
      header_bytes_(header_bytes),
      hooks_(std::move(hooks)),
      max_timeouts_(max_consecutive_timeouts) {
  if (window_ == 0) throw std::invalid_argument("send window must be positive");
}

void ReliableSender::submit(std::uint32_t payload_len) {
  if (payload_len == 0) throw std::invalid_argument("data segments carry a payload");
  if (aborted_) return;
  segs_.push_back(Segment{next_seq_++, payload_len});
  ++counters_.submitted;
  try_send();
}

void ReliableSender::send_segment(Segment& s) {
  const SimTime now = hooks_.now();
  if (s.sent) {
    s.retransmitted = true;
    ++counters_.retransmissions;
  } else {
    s.sent = true;
    s.first_sent = now;
  }
  Packet p;
  p.kind = PacketKind::Data;
  p.conn_id = conn_id_;
  p.seq = s.seq;
  p.payload_len = s.len;
  p.header_bytes = header_bytes_;
  p.sent_at = now;
  ++counters_.transmissions;
  hooks_.transmit(std::move(p));
}

void ReliableSender::try_send() {
  while (!aborted_ && snd_nxt_ < next_seq_ && snd_nxt_ - snd_una_ < window_) {
    send_segment(segment(snd_nxt_));
    ++snd_nxt_;
  }
  if (snd_nxt_ > snd_una_ && !timer_armed_) arm_timer();
}

void ReliableSender::arm_timer() {
  const std::uint64_t gen = ++timer_generation_;
  timer_armed_ = true;
  hooks_.schedule(hooks_.now() + rto(), [this, gen] { on_timeout(gen); });
}

void ReliableSender::on_ack(std::uint64_t cumulative_ack) {
  if (aborted_) return;
  const std::uint64_t ack = std::min(cumulative_ack, next_seq_);
  if (ack <= snd_una_) return;

  const Segment& newest = segment(ack - 1);
  if (newest.sent && !newest.retransmitted) {
    const SimTime now = hooks_.now();
    const SimDuration sample = now - newest.first_sent;
    samples_.push_back({newest.first_sent, sample});
    srtt_ = srtt_ ? (7 * *srtt_ + sample) / 8 : sample;
  }
  segs_.erase(segs_.begin(), segs_.begin() + static_cast<std::ptrdiff_t>(ack - snd_una_));
  snd_una_ = ack;
  snd_nxt_ = std::max(snd_nxt_, snd_una_);
  consecutive_timeouts_ = 0;

  stop_timer();
  try_send();
}

void ReliableSender::resend_outstanding() {
  if (aborted_ || snd_nxt_ == snd_una_) return;
  snd_nxt_ = snd_una_;
  stop_timer();
  try_send();
}

void ReliableSender::on_timeout(std::uint64_t generation) {
  if (generation != timer_generation_ || aborted_) return;
  timer_armed_ = false;
  if (snd_nxt_ == snd_una_) return;
  ++counters_.timeouts;
  if (++consecutive_timeouts_ > max_timeouts_) {
    aborted_ = true;
    return;
  }
  snd_nxt_ = snd_una_;
  try_send();
}

ReliableReceiver::Result ReliableReceiver::on_data(std::uint64_t seq, std::uint32_t len) {
  Result r;
  if (seq < rcv_nxt_ || out_of_order_.count(seq) != 0) {
    r.duplicate = true;
  } else if (seq == rcv_nxt_) {
    r.delivered.emplace_back(seq, len);
    ++rcv_nxt_;
    for (auto it = out_of_order_.begin(); it != out_of_order_.end() && it->first == rcv_nxt_;) {
      r.delivered.emplace_back(it->first, it->second);
      ++rcv_nxt_;
      it = out_of_order_.erase(it);
    }
  } else {
    out_of_order_.emplace(seq, len);
  }
  r.ack = rcv_nxt_;
  return r;
}

}  // namespace sdnmob
