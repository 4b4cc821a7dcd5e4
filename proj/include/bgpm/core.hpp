#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Core value types shared across the toolkit: ASNs, addresses, prefixes,
// routers, border links, multipath cases and the IXP prefix directory.
// All types are immutable values; invariants are enforced on construction.

namespace bgpm {

/// Autonomous system number. Zero is reserved and rejected.
class Asn {
public:
  explicit Asn(uint32_t number);

  uint32_t number() const { return number_; }
  std::string str() const;  // "AS6939"

  friend auto operator<=>(const Asn&, const Asn&) = default;

private:
  uint32_t number_;
};

enum class Family : uint8_t { V4, V6 };

/// An IPv4 or IPv6 address, stored as raw octets in network order.
class IpAddress {
public:
  static IpAddress from_v4(const std::array<uint8_t, 4>& octets);
  static IpAddress from_v6(const std::array<uint8_t, 16>& octets);
  static IpAddress parse(std::string_view text);  // throws std::invalid_argument
  static std::optional<IpAddress> try_parse(std::string_view text);

  Family family() const { return family_; }
  size_t byte_length() const { return family_ == Family::V4 ? 4 : 16; }
  std::span<const uint8_t> bytes() const { return {bytes_.data(), byte_length()}; }
  uint8_t last_octet() const { return bytes_[byte_length() - 1]; }

  /// Address plus a small nonnegative offset, with carry across octets.
  IpAddress plus(uint64_t offset) const;

  std::string str() const;

  friend bool operator==(const IpAddress& a, const IpAddress& b) {
    return a.family_ == b.family_ && a.bytes_ == b.bytes_;
  }
  friend std::strong_ordering operator<=>(const IpAddress& a, const IpAddress& b);

private:
  IpAddress(Family family, const std::array<uint8_t, 16>& bytes)
      : family_(family), bytes_(bytes) {}

  Family family_;
  std::array<uint8_t, 16> bytes_{};  // v4 uses the first 4 octets
};

/// A CIDR prefix. The base address is canonicalized on construction:
/// host bits are masked to zero rather than rejected, since routing data
/// routinely carries plain addresses where a prefix is meant.
class Prefix {
public:
  Prefix(IpAddress base, uint8_t length);  // throws on invalid length

  const IpAddress& base() const { return base_; }
  uint8_t length() const { return length_; }
  Family family() const { return base_.family(); }

  bool contains(const IpAddress& ip) const;
  std::string str() const;  // "142.46.150.0/24"

  friend bool operator==(const Prefix&, const Prefix&) = default;
  friend std::strong_ordering operator<=>(const Prefix& a, const Prefix& b);

private:
  IpAddress base_;
  uint8_t length_;
};

/// Parses "<addr>/<len>" into a canonical Prefix.
Prefix parse_prefix(std::string_view text);  // throws std::invalid_argument
std::optional<Prefix> try_parse_prefix(std::string_view text);

/// The 254 probe targets of a /24 (.1-.254) or /48 (::1-::fe), ascending.
/// Other prefix lengths are not probeable and raise std::invalid_argument.
std::vector<IpAddress> enumerate_probe_targets(const Prefix& prefix);

/// A named router and the AS operating it.
class RouterId {
public:
  RouterId(std::string name, Asn owner);  // throws on empty name

  const std::string& name() const { return name_; }
  Asn owner() const { return owner_; }

  /// Site label for reports: "core1.tor1.he.net" -> "tor1". Names that do
  /// not follow the <host>.<site>.<domain...> convention are returned whole.
  std::string short_label() const;

  friend bool operator==(const RouterId&, const RouterId&) = default;
  friend std::strong_ordering operator<=>(const RouterId& a, const RouterId& b);

private:
  std::string name_;
  Asn owner_;
};

/// One inter-domain border link, denoted by the ingress interfaces of the
/// two border routers as seen by a forward traceroute.
class BorderLink {
public:
  BorderLink(IpAddress near_ip, IpAddress far_ip, RouterId near_router,
             RouterId far_router, std::optional<double> bandwidth_gbps = {});

  const IpAddress& near_ip() const { return near_ip_; }
  const IpAddress& far_ip() const { return far_ip_; }
  const RouterId& near_router() const { return near_router_; }
  const RouterId& far_router() const { return far_router_; }
  std::optional<double> bandwidth_gbps() const { return bandwidth_gbps_; }

private:
  IpAddress near_ip_;
  IpAddress far_ip_;
  RouterId near_router_;
  RouterId far_router_;
  std::optional<double> bandwidth_gbps_;
};

/// A unique multipath deployment: <NearAS, NearBR, FarAS, DstPrfx> plus the
/// far ends of its border links. far_ips are kept sorted and deduplicated.
class BgpmCase {
public:
  BgpmCase(Asn near_as, RouterId near_br, Asn far_as, Prefix dst_prefix,
           std::vector<IpAddress> far_ips);

  Asn near_as() const { return near_as_; }
  const RouterId& near_br() const { return near_br_; }
  Asn far_as() const { return far_as_; }
  const Prefix& dst_prefix() const { return dst_prefix_; }
  const std::vector<IpAddress>& far_ips() const { return far_ips_; }
  int link_count() const { return static_cast<int>(far_ips_.size()); }

  /// Index of far_ip within the sorted link list, or -1.
  int link_index_of(const IpAddress& far_ip) const;

  std::string str() const;  // "<AS6939, tor1, AS19752, 142.46.150.0/24>"

  /// Identity is the 4-tuple; far_ips may legitimately change over time.
  std::string tuple_key() const;

  friend bool operator==(const BgpmCase&, const BgpmCase&) = default;

private:
  Asn near_as_;
  RouterId near_br_;
  Asn far_as_;
  Prefix dst_prefix_;
  std::vector<IpAddress> far_ips_;
};

/// IXP prefix directory (PeeringDB-style): IXP name -> peering LAN prefixes.
class IxpDirectory {
public:
  struct Entry {
    std::string name;
    std::vector<Prefix> prefixes;
  };

  IxpDirectory() = default;
  explicit IxpDirectory(std::vector<Entry> entries);  // validates entries

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

private:
  std::vector<Entry> entries_;
};

/// Name of the IXP whose peering prefix contains ip, if any.
std::optional<std::string> ip_in_directory(const IpAddress& ip,
                                           const IxpDirectory& dir);

}  // namespace bgpm
