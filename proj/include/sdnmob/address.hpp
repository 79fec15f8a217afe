#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace sdnmob {

class Ipv4Address {
 public:
  constexpr Ipv4Address() = default;
  constexpr explicit Ipv4Address(std::uint32_t host_order) : value_(host_order) {}
  constexpr Ipv4Address(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d)
      : value_((std::uint32_t{a} << 24) | (std::uint32_t{b} << 16) | (std::uint32_t{c} << 8) | d) {}

  // Dotted-quad only; throws ParseError.
  static Ipv4Address parse(std::string_view text);
  static std::optional<Ipv4Address> try_parse(std::string_view text) noexcept;

  constexpr std::uint32_t value() const noexcept { return value_; }
  constexpr bool is_unspecified() const noexcept { return value_ == 0; }
  constexpr bool is_broadcast() const noexcept { return value_ == 0xffffffffu; }
  std::string to_string() const;

  constexpr auto operator<=>(const Ipv4Address&) const = default;

 private:
  std::uint32_t value_ = 0;
};

inline constexpr Ipv4Address kUnspecifiedAddress{};
inline constexpr Ipv4Address kBroadcastAddress{0xffffffffu};

// Inclusive range of assignable addresses. Built from "a.b.c.d/len" (network
// and broadcast addresses excluded for len <= 30) or "first-last".
class Ipv4Range {
 public:
  Ipv4Range() = default;
  Ipv4Range(Ipv4Address first, Ipv4Address last);

  static Ipv4Range parse(std::string_view text);
  static Ipv4Range cidr(Ipv4Address network, int prefix_len);

  Ipv4Address first() const noexcept { return first_; }
  Ipv4Address last() const noexcept { return last_; }
  std::uint64_t size() const noexcept {
    return std::uint64_t{last_.value()} - first_.value() + 1;
  }
  Ipv4Address at(std::uint64_t index) const;

  bool contains(Ipv4Address a) const noexcept { return a >= first_ && a <= last_; }
  bool overlaps(const Ipv4Range& other) const noexcept {
    return first_ <= other.last_ && other.first_ <= last_;
  }

  // CIDR text when the range was built from one, "first-last" otherwise.
  std::string to_string() const;

  bool operator==(const Ipv4Range& o) const noexcept {
    return first_ == o.first_ && last_ == o.last_;
  }

 private:
  Ipv4Address first_{};
  Ipv4Address last_{};
  std::optional<std::pair<Ipv4Address, int>> cidr_;
};

// 48-bit MAC-style identifier; canonical text is lowercase colon-hex.
class MacAddress {
 public:
  using Octets = std::array<std::uint8_t, 6>;

  constexpr MacAddress() = default;
  constexpr explicit MacAddress(Octets octets) : octets_(octets) {}
  static MacAddress from_u64(std::uint64_t v);

  // Accepts "aa:bb:cc:dd:ee:ff" in either hex case; throws ParseError.
  static MacAddress parse(std::string_view text);
  static bool is_canonical_text(std::string_view text) noexcept;

  const Octets& octets() const noexcept { return octets_; }
  std::uint64_t to_u64() const noexcept;
  std::string to_string() const;

  constexpr auto operator<=>(const MacAddress&) const = default;

 private:
  Octets octets_{};
};

}  // namespace sdnmob

template <>
struct std::hash<sdnmob::Ipv4Address> {
  std::size_t operator()(const sdnmob::Ipv4Address& a) const noexcept {
    return std::hash<std::uint32_t>{}(a.value());
  }
};

template <>
struct std::hash<sdnmob::MacAddress> {
  std::size_t operator()(const sdnmob::MacAddress& m) const noexcept {
    return std::hash<std::uint64_t>{}(m.to_u64());
  }
};
