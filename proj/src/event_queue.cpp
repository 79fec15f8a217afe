#include "sdnmob/event_queue.hpp"

#include <stdexcept>

namespace sdnmob {

void EventQueue::push(SimTime at, Action fn, bool housekeeping) {
  if (at < now_) throw std::logic_error("event scheduled in the past");
  heap_.push(Entry{at, next_seq_++, housekeeping, std::move(fn)});
  if (!housekeeping) ++activity_;
}

bool EventQueue::step() {
  if (heap_.empty()) return false;
  // priority_queue::top is const; the action is moved out before pop.
  Entry e = std::move(const_cast<Entry&>(heap_.top()));
  heap_.pop();
  now_ = e.at;
  if (!e.housekeeping) --activity_;
  ++executed_;
  e.fn();
  return true;
}

void EventQueue::run() {
  while (activity_ > 0 && step()) {
  }
}

void EventQueue::run_until(SimTime t) {
  while (!heap_.empty() && heap_.top().at <= t) step();
  if (now_ < t) now_ = t;
}

}  // namespace sdnmob
