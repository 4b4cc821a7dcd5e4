#include "bgpm/core.hpp"

#include <arpa/inet.h>

#include <algorithm>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace bgpm {

Asn::Asn(uint32_t number) : number_(number) {
  if (number == 0) throw std::invalid_argument("ASN must be positive");
}

std::string Asn::str() const { return "AS" + std::to_string(number_); }

IpAddress IpAddress::from_v4(const std::array<uint8_t, 4>& octets) {
  std::array<uint8_t, 16> b{};
  std::copy(octets.begin(), octets.end(), b.begin());
  return IpAddress(Family::V4, b);
}

IpAddress IpAddress::from_v6(const std::array<uint8_t, 16>& octets) {
  return IpAddress(Family::V6, octets);
}

std::optional<IpAddress> IpAddress::try_parse(std::string_view text) {
  std::string buf(text);
  std::array<uint8_t, 16> b{};
  if (buf.find(':') != std::string::npos) {
    if (inet_pton(AF_INET6, buf.c_str(), b.data()) == 1)
      return IpAddress(Family::V6, b);
    return std::nullopt;
  }
  if (inet_pton(AF_INET, buf.c_str(), b.data()) == 1)
    return IpAddress(Family::V4, b);
  return std::nullopt;
}

IpAddress IpAddress::parse(std::string_view text) {
  auto ip = try_parse(text);
  if (!ip) throw std::invalid_argument("bad IP address: " + std::string(text));
  return *ip;
}

IpAddress IpAddress::plus(uint64_t offset) const {
  std::array<uint8_t, 16> b = bytes_;
  size_t n = byte_length();
  for (size_t i = n; i-- > 0 && offset > 0;) {
    uint64_t sum = b[i] + (offset & 0xff);
    b[i] = static_cast<uint8_t>(sum & 0xff);
    offset = (offset >> 8) + (sum >> 8);
  }
  return IpAddress(family_, b);
}

std::string IpAddress::str() const {
  char buf[INET6_ADDRSTRLEN] = {};
  if (family_ == Family::V4) {
    inet_ntop(AF_INET, bytes_.data(), buf, sizeof(buf));
  } else {
    inet_ntop(AF_INET6, bytes_.data(), buf, sizeof(buf));
  }
  return buf;
}

std::strong_ordering operator<=>(const IpAddress& a, const IpAddress& b) {
  if (a.family_ != b.family_)
    return a.family_ == Family::V4 ? std::strong_ordering::less
                                   : std::strong_ordering::greater;
  size_t n = a.byte_length();
  int c = std::memcmp(a.bytes_.data(), b.bytes_.data(), n);
  if (c < 0) return std::strong_ordering::less;
  if (c > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

namespace {

std::array<uint8_t, 16> masked_bytes(const IpAddress& ip, uint8_t length) {
  std::array<uint8_t, 16> out{};
  auto src = ip.bytes();
  for (size_t i = 0; i < src.size(); ++i) {
    unsigned bits_left = length > i * 8 ? std::min<unsigned>(8, length - i * 8) : 0;
    uint8_t mask = bits_left == 0 ? 0 : static_cast<uint8_t>(0xff << (8 - bits_left));
    out[i] = src[i] & mask;
  }
  return out;
}

}  // namespace

Prefix::Prefix(IpAddress base, uint8_t length) : base_(base), length_(length) {
  uint8_t max = base.family() == Family::V4 ? 32 : 128;
  if (length > max)
    throw std::invalid_argument("prefix length " + std::to_string(length) +
                                " out of range for family");
  auto m = masked_bytes(base, length);
  base_ = base.family() == Family::V4
              ? IpAddress::from_v4({m[0], m[1], m[2], m[3]})
              : IpAddress::from_v6(m);
}

bool Prefix::contains(const IpAddress& ip) const {
  if (ip.family() != base_.family()) return false;
  auto m = masked_bytes(ip, length_);
  auto base = base_.bytes();
  return std::equal(base.begin(), base.end(), m.begin());
}

std::string Prefix::str() const {
  return base_.str() + "/" + std::to_string(length_);
}

std::strong_ordering operator<=>(const Prefix& a, const Prefix& b) {
  if (auto c = a.base_ <=> b.base_; c != 0) return c;
  return a.length_ <=> b.length_;
}

std::optional<Prefix> try_parse_prefix(std::string_view text) {
  auto slash = text.rfind('/');
  if (slash == std::string_view::npos) return std::nullopt;
  auto ip = IpAddress::try_parse(text.substr(0, slash));
  if (!ip) return std::nullopt;
  int len = -1;
  auto digits = text.substr(slash + 1);
  if (digits.empty() || digits.size() > 3) return std::nullopt;
  len = 0;
  for (char c : digits) {
    if (c < '0' || c > '9') return std::nullopt;
    len = len * 10 + (c - '0');
  }
  uint8_t max = ip->family() == Family::V4 ? 32 : 128;
  if (len > max) return std::nullopt;
  return Prefix(*ip, static_cast<uint8_t>(len));
}

Prefix parse_prefix(std::string_view text) {
  auto p = try_parse_prefix(text);
  if (!p) throw std::invalid_argument("bad prefix: " + std::string(text));
  return *p;
}

std::vector<IpAddress> enumerate_probe_targets(const Prefix& prefix) {
  bool ok = (prefix.family() == Family::V4 && prefix.length() == 24) ||
            (prefix.family() == Family::V6 && prefix.length() == 48);
  if (!ok)
    throw std::invalid_argument("probing supports /24 and /48 only, got " +
                                prefix.str());
  std::vector<IpAddress> out;
  out.reserve(254);
  for (uint64_t i = 1; i <= 254; ++i) out.push_back(prefix.base().plus(i));
  return out;
}

RouterId::RouterId(std::string name, Asn owner)
    : name_(std::move(name)), owner_(owner) {
  if (name_.empty()) throw std::invalid_argument("router name must be nonempty");
}

std::string RouterId::short_label() const {
  // core1.tor1.he.net -> tor1, provided the second label is alphanumeric
  // site code + index and at least one more label follows.
  auto first = name_.find('.');
  if (first == std::string::npos) return name_;
  auto second = name_.find('.', first + 1);
  if (second == std::string::npos) return name_;
  std::string site = name_.substr(first + 1, second - first - 1);
  if (site.empty()) return name_;
  for (char c : site)
    if (!std::isalnum(static_cast<unsigned char>(c))) return name_;
  return site;
}

std::strong_ordering operator<=>(const RouterId& a, const RouterId& b) {
  if (auto c = a.name_ <=> b.name_; c != 0) return c;
  return a.owner_ <=> b.owner_;
}

BorderLink::BorderLink(IpAddress near_ip, IpAddress far_ip, RouterId near_router,
                       RouterId far_router, std::optional<double> bandwidth_gbps)
    : near_ip_(near_ip),
      far_ip_(far_ip),
      near_router_(std::move(near_router)),
      far_router_(std::move(far_router)),
      bandwidth_gbps_(bandwidth_gbps) {
  if (near_ip_.family() != far_ip_.family())
    throw std::invalid_argument("border link endpoints must share a family");
  if (near_router_.owner() == far_router_.owner())
    throw std::invalid_argument("border link must cross an AS boundary");
  if (bandwidth_gbps_ && *bandwidth_gbps_ <= 0)
    throw std::invalid_argument("bandwidth must be positive");
}

BgpmCase::BgpmCase(Asn near_as, RouterId near_br, Asn far_as, Prefix dst_prefix,
                   std::vector<IpAddress> far_ips)
    : near_as_(near_as),
      near_br_(std::move(near_br)),
      far_as_(far_as),
      dst_prefix_(dst_prefix),
      far_ips_(std::move(far_ips)) {
  if (near_br_.owner() != near_as_)
    throw std::invalid_argument("NearBR must belong to NearAS");
  std::sort(far_ips_.begin(), far_ips_.end());
  far_ips_.erase(std::unique(far_ips_.begin(), far_ips_.end()), far_ips_.end());
  if (far_ips_.size() < 2)
    throw std::invalid_argument("a multipath case needs at least 2 border links");
  for (const auto& ip : far_ips_)
    if (ip.family() != dst_prefix_.family())
      throw std::invalid_argument("FarIP family must match DstPrfx family");
}

int BgpmCase::link_index_of(const IpAddress& far_ip) const {
  auto it = std::lower_bound(far_ips_.begin(), far_ips_.end(), far_ip);
  if (it == far_ips_.end() || *it != far_ip) return -1;
  return static_cast<int>(it - far_ips_.begin());
}

std::string BgpmCase::str() const {
  std::ostringstream os;
  os << "<" << near_as_.str() << ", " << near_br_.short_label() << ", "
     << far_as_.str() << ", " << dst_prefix_.str() << ">";
  return os.str();
}

std::string BgpmCase::tuple_key() const {
  return near_as_.str() + "|" + near_br_.name() + "|" + far_as_.str() + "|" +
         dst_prefix_.str();
}

IxpDirectory::IxpDirectory(std::vector<Entry> entries)
    : entries_(std::move(entries)) {
  for (const auto& e : entries_) {
    for (size_t i = 0; i < e.prefixes.size(); ++i)
      for (size_t j = i + 1; j < e.prefixes.size(); ++j) {
        const auto& a = e.prefixes[i];
        const auto& b = e.prefixes[j];
        if (a.contains(b.base()) || b.contains(a.base()))
          throw std::invalid_argument("overlapping prefixes in IXP entry " +
                                      e.name);
      }
  }
}

std::optional<std::string> ip_in_directory(const IpAddress& ip,
                                           const IxpDirectory& dir) {
  for (const auto& e : dir.entries())
    for (const auto& p : e.prefixes)
      if (p.contains(ip)) return e.name;
  return std::nullopt;
}

}  // namespace bgpm
