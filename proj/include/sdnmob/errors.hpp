#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sdnmob {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed text input (addresses, host reports).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Address pool or DHCP range has no free address left.
class ExhaustedError : public Error {
 public:
  using Error::Error;
};

// Rejected by an invariant of the flow table or its action lists.
class FlowError : public Error {
 public:
  using Error::Error;
};

// A host report or packet-in that the control plane refuses to act on.
class ControlError : public Error {
 public:
  using Error::Error;
};

// Invalid topology or scenario (overlapping ranges, unknown zones, ...).
class ScenarioError : public Error {
 public:
  using Error::Error;
};

// A scenario problem tied to one event, by position in the event list.
class EventError : public ScenarioError {
 public:
  EventError(std::size_t index, const std::string& what) : ScenarioError(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class ComparisonError : public Error {
 public:
  using Error::Error;
};

// Configuration file problem, carrying a file:line location.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& file, std::size_t line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what), file_(file), line_(line) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

}  // namespace sdnmob
