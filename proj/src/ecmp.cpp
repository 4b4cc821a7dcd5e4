#include "bgpm/ecmp.hpp"

#include <stdexcept>
#include <vector>

#include "bgpm/detail/mix.hpp"

namespace bgpm {

using detail::fnv1a64;
using detail::fnv1a64_str;
using detail::mix64;

const char* protocol_name(Protocol p) {
  switch (p) {
    case Protocol::Icmp: return "ICMP";
    case Protocol::Udp: return "UDP";
    case Protocol::Tcp: return "TCP";
  }
  return "?";
}

const char* ecmp_algorithm_name(EcmpAlgorithm a) {
  switch (a) {
    case EcmpAlgorithm::HashThreshold: return "hash-threshold";
    case EcmpAlgorithm::Universal: return "universal";
    case EcmpAlgorithm::IncludePorts: return "include-ports";
    case EcmpAlgorithm::RoundRobin: return "round-robin";
  }
  return "?";
}

std::optional<EcmpAlgorithm> parse_ecmp_algorithm(std::string_view name) {
  if (name == "hash-threshold") return EcmpAlgorithm::HashThreshold;
  if (name == "universal") return EcmpAlgorithm::Universal;
  if (name == "include-ports") return EcmpAlgorithm::IncludePorts;
  if (name == "round-robin") return EcmpAlgorithm::RoundRobin;
  return std::nullopt;
}

FlowKey make_icmp_key(const IpAddress& src, const IpAddress& dst) {
  return FlowKey{src, dst, std::nullopt, std::nullopt, Protocol::Icmp};
}

FlowKey make_udp_key(const IpAddress& src, const IpAddress& dst,
                     uint16_t src_port, uint16_t dst_port) {
  return FlowKey{src, dst, src_port, dst_port, Protocol::Udp};
}

namespace {

uint64_t serialize_and_hash(const FlowKey& key) {
  uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](uint8_t b) {
    h ^= b;
    h *= 0x100000001b3ULL;
  };
  feed(key.src.family() == Family::V4 ? 4 : 6);
  for (uint8_t b : key.src.bytes()) feed(b);
  feed(key.dst.family() == Family::V4 ? 4 : 6);
  for (uint8_t b : key.dst.bytes()) feed(b);
  feed(static_cast<uint8_t>(key.protocol));
  feed(key.src_port || key.dst_port ? 1 : 0);
  auto feed16 = [&feed](uint16_t v) {
    feed(static_cast<uint8_t>(v >> 8));
    feed(static_cast<uint8_t>(v & 0xff));
  };
  feed16(key.src_port.value_or(0));
  feed16(key.dst_port.value_or(0));
  return h;
}

uint64_t keyed_hash64(uint64_t payload, const EcmpPolicy& policy) {
  return mix64(payload ^ mix64(policy.seed) ^
               mix64(policy.router_salt * 0x9e3779b97f4a7c15ULL + 1));
}

}  // namespace

uint16_t flow_hash16(const FlowKey& key, const EcmpPolicy& policy) {
  return static_cast<uint16_t>(keyed_hash64(serialize_and_hash(key), policy) >> 48);
}

int hash_threshold_region(uint16_t hash, int n_links) {
  if (n_links < 1) throw std::invalid_argument("n_links must be >= 1");
  if (n_links > 65536) throw std::invalid_argument("n_links exceeds hash space");
  uint32_t base = 65536u / static_cast<uint32_t>(n_links);
  uint32_t rem = 65536u % static_cast<uint32_t>(n_links);
  uint32_t wide_span = rem * (base + 1);  // leftmost regions get the remainder
  uint32_t h = hash;
  if (h < wide_span) return static_cast<int>(h / (base + 1));
  return static_cast<int>(rem + (h - wide_span) / base);
}

int hash_threshold_select(const FlowKey& key, int n_links,
                          const EcmpPolicy& policy) {
  return hash_threshold_region(flow_hash16(key, policy), n_links);
}

int universal_source_parity(const IpAddress& src, const EcmpPolicy& policy) {
  uint64_t h = fnv1a64_str("universal-parity");
  h = fnv1a64(src.bytes(), h);
  return static_cast<int>(keyed_hash64(h, policy) & 1);
}

int universal_select(const IpAddress& src, const IpAddress& dst, int n_links,
                     const EcmpPolicy& policy) {
  if (n_links == 1) return 0;
  if (n_links != 2)
    return hash_threshold_select(make_icmp_key(src, dst), n_links, policy);
  // Bit 2 of the final octet flips every 4 consecutive addresses; the source
  // only flips the whole pattern.
  int block = (dst.last_octet() >> 2) & 1;
  return block ^ universal_source_parity(src, policy);
}

int include_ports_select(const FlowKey& key, int n_links,
                         const EcmpPolicy& policy) {
  if (!key.src_port || !key.dst_port)
    throw std::invalid_argument("include-ports selection needs port numbers");
  return hash_threshold_select(key, n_links, policy);
}

std::pair<int, uint64_t> round_robin_next(uint64_t counter, int n_links) {
  if (n_links < 1) throw std::invalid_argument("n_links must be >= 1");
  return {static_cast<int>(counter % static_cast<uint64_t>(n_links)),
          counter + 1};
}

uint16_t derive_udp_src_port(uint64_t seed, const IpAddress& dst,
                             int64_t time) {
  uint64_t h = fnv1a64_str("udp-src-port");
  h = fnv1a64(dst.bytes(), h);
  h = mix64(h ^ mix64(seed) ^ mix64(static_cast<uint64_t>(time) * 0x9e3779b97f4a7c15ULL + 3));
  // Ephemeral range above the traceroute base port.
  return static_cast<uint16_t>(33435 + h % (65535 - 33435));
}

int select_link_for_probe(const EcmpPolicy& policy, const IpAddress& src,
                          const IpAddress& dst, Protocol protocol,
                          int64_t time, int n_links, uint64_t& rr_counter) {
  switch (policy.algorithm) {
    case EcmpAlgorithm::RoundRobin: {
      auto [link, next] = round_robin_next(rr_counter, n_links);
      rr_counter = next;
      return link;
    }
    case EcmpAlgorithm::HashThreshold:
      return hash_threshold_select(make_icmp_key(src, dst), n_links, policy);
    case EcmpAlgorithm::Universal:
    case EcmpAlgorithm::IncludePorts:
      // Cisco-style pairing: address-only flows hash with the universal
      // scheme, ported flows with include-ports.
      if (protocol == Protocol::Icmp)
        return universal_select(src, dst, n_links, policy);
      return include_ports_select(
          make_udp_key(src, dst, derive_udp_src_port(policy.seed, dst, time),
                       kTracerouteDstPort),
          n_links, policy);
  }
  throw std::logic_error("unhandled ECMP algorithm");
}

std::vector<int> AllocationMap::link_totals() const {
  std::vector<int> totals(bgpm_case.far_ips().size(), 0);
  for (const auto& [dst, link] : assignment)
    totals.at(static_cast<size_t>(link))++;
  return totals;
}

void AllocationMap::write_csv(std::ostream& os) const {
  os << "dst_ip,link_index,far_ip\n";
  for (const auto& [dst, link] : assignment)
    os << dst.str() << ',' << link << ',' << far_ip_for(link).str() << '\n';
}

AllocationMap build_allocation_map_for_targets(
    const BgpmCase& bgpm_case, std::span<const IpAddress> targets,
    const IpAddress& src, Protocol protocol, int64_t time,
    const EcmpPolicy& policy) {
  AllocationMap map{bgpm_case, src, protocol, time, {}};
  int n = bgpm_case.link_count();
  // Round robin over a whole map: the counter phase is pinned by the tick so
  // repeated builds of the same tick agree.
  uint64_t rr_counter =
      mix64(policy.seed ^ mix64(static_cast<uint64_t>(time))) % static_cast<uint64_t>(n);
  for (const auto& dst : targets) {
    if (!bgpm_case.dst_prefix().contains(dst))
      throw std::invalid_argument("target " + dst.str() + " outside " +
                                  bgpm_case.dst_prefix().str());
    int link = select_link_for_probe(policy, src, dst, protocol, time, n, rr_counter);
    map.assignment.emplace(dst, link);
  }
  return map;
}

AllocationMap build_allocation_map(const BgpmCase& bgpm_case,
                                   const IpAddress& src, Protocol protocol,
                                   int64_t time, const EcmpPolicy& policy) {
  auto targets = enumerate_probe_targets(bgpm_case.dst_prefix());
  return build_allocation_map_for_targets(bgpm_case, targets, src, protocol,
                                          time, policy);
}

}  // namespace bgpm
