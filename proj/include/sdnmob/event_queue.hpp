#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "sdnmob/sim_time.hpp"

namespace sdnmob {

// Global (time, insertion-order) event queue.
//
// Housekeeping events (periodic timers) do not keep a run alive: run() stops
// once only housekeeping remains. run_until() executes everything up to the
// given time regardless.
class EventQueue {
 public:
  using Action = std::function<void()>;

  void schedule(SimTime at, Action fn) { push(at, std::move(fn), false); }
  void schedule_housekeeping(SimTime at, Action fn) { push(at, std::move(fn), true); }

  SimTime now() const noexcept { return now_; }
  bool empty() const noexcept { return heap_.empty(); }
  std::size_t pending() const noexcept { return heap_.size(); }
  std::size_t pending_activity() const noexcept { return activity_; }
  std::uint64_t executed() const noexcept { return executed_; }

  // Pops and runs one event. Returns false if the queue was empty.
  bool step();
  void run();
  void run_until(SimTime t);

 private:
  struct Entry {
    SimTime at;
    std::uint64_t seq;
    bool housekeeping;
    Action fn;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const noexcept {
      return a.at != b.at ? a.at > b.at : a.seq > b.seq;
    }
  };

  void push(SimTime at, Action fn, bool housekeeping);

  std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
  SimTime now_{0};
  std::uint64_t next_seq_ = 0;
  std::size_t activity_ = 0;
  std::uint64_t executed_ = 0;
};

}  // namespace sdnmob
