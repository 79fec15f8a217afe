#pragma once

#include <chrono>
#include <cstdint>
#include <string>

namespace sdnmob {

// Simulated clock. One tick of the event loop is one nanosecond; that is also
// the scheduling quantum against which analytic delay budgets are compared.
using SimDuration = std::chrono::nanoseconds;
using SimTime = std::chrono::nanoseconds;

inline constexpr SimDuration kSchedulingQuantum{1};

constexpr SimDuration from_seconds(double s) {
  return SimDuration(static_cast<std::int64_t>(s * 1e9 + (s >= 0 ? 0.5 : -0.5)));
}
constexpr SimDuration from_millis(double ms) { return from_seconds(ms / 1000.0); }

constexpr double to_seconds(SimDuration d) { return static_cast<double>(d.count()) / 1e9; }
constexpr double to_millis(SimDuration d) { return static_cast<double>(d.count()) / 1e6; }

constexpr std::int64_t to_millis_floor(SimTime t) { return t.count() / 1'000'000; }

// Time to clock `bytes` onto a link, rounded up to the next nanosecond.
constexpr SimDuration serialization_time(std::uint64_t bytes, std::uint64_t bandwidth_bps) {
  const std::uint64_t bits = bytes * 8;
  const std::uint64_t num = bits * 1'000'000'000ull;
  return SimDuration(static_cast<std::int64_t>((num + bandwidth_bps - 1) / bandwidth_bps));
}

// Fixed six-decimal seconds, the CSV time format.
std::string format_seconds(SimTime t);

}  // namespace sdnmob
