#include "sdnmob/address.hpp"

#include <charconv>
#include <cstdio>

#include "sdnmob/errors.hpp"

namespace sdnmob {
namespace {

std::optional<std::uint32_t> parse_dotted_quad(std::string_view text) {
  std::uint32_t value = 0;
  const char* p = text.data();
  const char* end = text.data() + text.size();
  for (int octet = 0; octet < 4; ++octet) {
    if (octet > 0) {
      if (p == end || *p != '.') return std::nullopt;
      ++p;
    }
    if (p == end || *p < '0' || *p > '9') return std::nullopt;
    // No leading zeros, at most three digits.
    const char* start = p;
    unsigned part = 0;
    auto [next, ec] = std::from_chars(p, end, part);
    if (ec != std::errc{} || part > 255 || next - start > 3) return std::nullopt;
    if (next - start > 1 && *start == '0') return std::nullopt;
    p = next;
    value = (value << 8) | part;
  }
  if (p != end) return std::nullopt;
  return value;
}

int hex_digit(char c) noexcept {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Ipv4Address Ipv4Address::parse(std::string_view text) {
  auto v = parse_dotted_quad(text);
  if (!v) throw ParseError("invalid IPv4 address '" + std::string(text) + "'");
  return Ipv4Address(*v);
}

std::optional<Ipv4Address> Ipv4Address::try_parse(std::string_view text) noexcept {
  auto v = parse_dotted_quad(text);
  if (!v) return std::nullopt;
  return Ipv4Address(*v);
}

std::string Ipv4Address::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%u.%u.%u.%u", (value_ >> 24) & 0xff, (value_ >> 16) & 0xff,
                (value_ >> 8) & 0xff, value_ & 0xff);
  return buf;
}

Ipv4Range::Ipv4Range(Ipv4Address first, Ipv4Address last) : first_(first), last_(last) {
  if (last < first) {
    throw ParseError("empty address range " + first.to_string() + "-" + last.to_string());
  }
}

Ipv4Range Ipv4Range::cidr(Ipv4Address network, int prefix_len) {
  if (prefix_len < 0 || prefix_len > 32) {
    throw ParseError("invalid prefix length " + std::to_string(prefix_len));
  }
  const std::uint32_t mask = prefix_len == 0 ? 0u : ~std::uint32_t{0} << (32 - prefix_len);
  const std::uint32_t base = network.value() & mask;
  if (base != network.value()) {
    throw ParseError(network.to_string() + "/" + std::to_string(prefix_len) +
                     " has host bits set");
  }
  const std::uint32_t top = base | ~mask;
  Ipv4Range r = prefix_len <= 30 ? Ipv4Range(Ipv4Address(base + 1), Ipv4Address(top - 1))
                                 : Ipv4Range(Ipv4Address(base), Ipv4Address(top));
  r.cidr_ = std::make_pair(network, prefix_len);
  return r;
}

Ipv4Range Ipv4Range::parse(std::string_view text) {
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto net = Ipv4Address::parse(text.substr(0, slash));
    auto len_text = text.substr(slash + 1);
    int len = -1;
    auto [p, ec] = std::from_chars(len_text.data(), len_text.data() + len_text.size(), len);
    if (ec != std::errc{} || p != len_text.data() + len_text.size()) {
      throw ParseError("invalid prefix in '" + std::string(text) + "'");
    }
    return cidr(net, len);
  }
  if (auto dash = text.find('-'); dash != std::string_view::npos) {
    return Ipv4Range(Ipv4Address::parse(text.substr(0, dash)),
                     Ipv4Address::parse(text.substr(dash + 1)));
  }
  auto single = Ipv4Address::parse(text);
  return Ipv4Range(single, single);
}

Ipv4Address Ipv4Range::at(std::uint64_t index) const {
  if (index >= size()) throw std::out_of_range("Ipv4Range::at");
  return Ipv4Address(static_cast<std::uint32_t>(first_.value() + index));
}

std::string Ipv4Range::to_string() const {
  if (cidr_) return cidr_->first.to_string() + "/" + std::to_string(cidr_->second);
  return first_.to_string() + "-" + last_.to_string();
}

MacAddress MacAddress::from_u64(std::uint64_t v) {
  Octets o{};
  for (int i = 5; i >= 0; --i) {
    o[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v & 0xff);
    v >>= 8;
  }
  return MacAddress(o);
}

std::uint64_t MacAddress::to_u64() const noexcept {
  std::uint64_t v = 0;
  for (auto b : octets_) v = (v << 8) | b;
  return v;
}

MacAddress MacAddress::parse(std::string_view text) {
  if (text.size() != 17) throw ParseError("invalid MAC address '" + std::string(text) + "'");
  Octets o{};
  for (std::size_t i = 0; i < 6; ++i) {
    const std::size_t at = i * 3;
    const int hi = hex_digit(text[at]);
    const int lo = hex_digit(text[at + 1]);
    if (hi < 0 || lo < 0 || (i < 5 && text[at + 2] != ':')) {
      throw ParseError("invalid MAC address '" + std::string(text) + "'");
    }
    o[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return MacAddress(o);
}

bool MacAddress::is_canonical_text(std::string_view text) noexcept {
  if (text.size() != 17) return false;
  for (std::size_t i = 0; i < 17; ++i) {
    const char c = text[i];
    if (i % 3 == 2) {
      if (c != ':') return false;
    } else if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) {
      return false;
    }
  }
  return true;
}

std::string MacAddress::to_string() const {
  char buf[18];
  std::snprintf(buf, sizeof buf, "%02x:%02x:%02x:%02x:%02x:%02x", octets_[0], octets_[1],
                octets_[2], octets_[3], octets_[4], octets_[5]);
  return buf;
}

}  // namespace sdnmob
