#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <utility>

#include "bgpm/core.hpp"

// ECMP next-hop selection: RFC2992-style hash-threshold, the two Cisco
// per-flow schemes observed at border routers (addresses-only "universal"
// and "include-ports"), and per-packet round robin.

namespace bgpm {

enum class Protocol : uint8_t { Icmp, Udp, Tcp };

const char* protocol_name(Protocol p);  // "ICMP" / "UDP" / "TCP"

/// The fields a per-flow load balancer may hash. Ports are present exactly
/// when the protocol has them.
struct FlowKey {
  IpAddress src;
  IpAddress dst;
  std::optional<uint16_t> src_port;
  std::optional<uint16_t> dst_port;
  Protocol protocol = Protocol::Icmp;
};

FlowKey make_icmp_key(const IpAddress& src, const IpAddress& dst);
FlowKey make_udp_key(const IpAddress& src, const IpAddress& dst,
                     uint16_t src_port, uint16_t dst_port);

enum class EcmpAlgorithm : uint8_t {
  HashThreshold,
  Universal,
  IncludePorts,
  RoundRobin,
};

const char* ecmp_algorithm_name(EcmpAlgorithm a);
std::optional<EcmpAlgorithm> parse_ecmp_algorithm(std::string_view name);

/// Per-router hashing parameters. The seed is fixed for a simulation run;
/// the salt distinguishes routers so their flow hashes decorrelate.
struct EcmpPolicy {
  EcmpAlgorithm algorithm = EcmpAlgorithm::Universal;
  uint64_t seed = 0;
  uint64_t router_salt = 0;
};

/// 16-bit keyed hash of the serialized flow key. The mix (FNV-1a over the
/// serialized key, folded with seed and salt through a splitmix finalizer)
/// is fixed so identical inputs hash identically everywhere.
uint16_t flow_hash16(const FlowKey& key, const EcmpPolicy& policy);

/// RFC2992 hash-threshold: the 16-bit hash space is split into n_links
/// contiguous regions of near-equal size (any remainder is spread one per
/// leftmost region) and the region containing the key's hash wins.
int hash_threshold_select(const FlowKey& key, int n_links,
                          const EcmpPolicy& policy);

/// Region index of a raw 16-bit hash value; exposed for the partition tests.
int hash_threshold_region(uint16_t hash, int n_links);

/// Addresses-only per-session selection, modeling the observed behavior for
/// two links: runs of 4 consecutive destinations go to one link, the next 4
/// to the other, and the source contributes only a parity bit, so exactly
/// two complementary allocation patterns exist. This reproduces the observed
/// phenomena; the vendor's actual hash is not public. For n_links != 2 it
/// falls back to hash-threshold over the addresses alone.
int universal_select(const IpAddress& src, const IpAddress& dst, int n_links,
                     const EcmpPolicy& policy);

/// Source parity bit used by universal_select; two sources collide or
/// complement according to this bit.
int universal_source_parity(const IpAddress& src, const EcmpPolicy& policy);

/// Per-flow selection over the full 5-field key. Requires ports.
int include_ports_select(const FlowKey& key, int n_links,
                         const EcmpPolicy& policy);

/// Per-packet round robin: (counter mod n_links, counter + 1).
std::pair<int, uint64_t> round_robin_next(uint64_t counter, int n_links);

/// Traceroute-style UDP source port for one (destination, time) pair,
/// derived from the run seed. Fresh per measurement tick, constant within
/// one destination's probes, Paris style.
uint16_t derive_udp_src_port(uint64_t seed, const IpAddress& dst, int64_t time);

constexpr uint16_t kTracerouteDstPort = 33434;

/// Single dispatch point for "which border link does this probe take":
/// the mapping used by the allocation-map builder and the traceroute
/// simulator alike. rr_counter is consumed only by round-robin policies.
int select_link_for_probe(const EcmpPolicy& policy, const IpAddress& src,
                          const IpAddress& dst, Protocol protocol,
                          int64_t time, int n_links, uint64_t& rr_counter);

/// For one case, source and time: destination -> border link index.
struct AllocationMap {
  BgpmCase bgpm_case;
  IpAddress source;
  Protocol protocol = Protocol::Icmp;
  int64_t time = 0;
  std::map<IpAddress, int> assignment;

  const IpAddress& far_ip_for(int link_index) const {
    return bgpm_case.far_ips().at(static_cast<size_t>(link_index));
  }
  /// Destinations per link index.
  std::vector<int> link_totals() const;
  /// CSV rows: dst_ip,link_index,far_ip
  void write_csv(std::ostream& os) const;
};

/// Applies the policy to every enumerable probe target of the case prefix.
/// ICMP probes have no ports and use the universal scheme; UDP probes get a
/// per-(destination, time) source port and use include-ports. A HashThreshold
/// or RoundRobin policy overrides both.
AllocationMap build_allocation_map(const BgpmCase& bgpm_case,
                                   const IpAddress& src, Protocol protocol,
                                   int64_t time, const EcmpPolicy& policy);

/// Same, over an explicit target list (empty list -> empty map).
AllocationMap build_allocation_map_for_targets(
    const BgpmCase& bgpm_case, std::span<const IpAddress> targets,
    const IpAddress& src, Protocol protocol, int64_t time,
    const EcmpPolicy& policy);

}  // namespace bgpm
