#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bgpm/core.hpp"

// BGP route representation, the seven-rule best-path comparison and
// multipath group selection for equal-attribute eBGP routes.

namespace bgpm {

enum class Origin : uint8_t { Igp = 0, Egp = 1, Incomplete = 2 };
enum class LearnedVia : uint8_t { Ebgp, Ibgp };

// Route status flags, mirroring the letters shown by the LG route output.
enum RouteFlag : uint8_t {
  kFlagBest = 1,       // B
  kFlagMultipath = 2,  // M
  kFlagEbgp = 4,       // E (I when absent and learned via iBGP)
  kFlagLabeled = 8,    // L
};

const char* origin_name(Origin o);  // "igp" / "egp" / "incomplete"

/// One learned BGP path with the attributes the best-path algorithm reads.
struct RouteEntry {
  Prefix dst_prefix;
  IpAddress next_hop;
  int local_pref = 100;
  std::vector<Asn> as_path;
  Origin origin = Origin::Igp;
  int med = 0;
  LearnedVia learned_via = LearnedVia::Ebgp;
  int igp_metric = 0;
  IpAddress peer_router_id;
  int64_t age_seconds = 0;
  uint8_t flags = 0;

  friend bool operator==(const RouteEntry&, const RouteEntry&) = default;
};

enum class RouteOrder { FirstBetter, SecondBetter, Tie };

/// Best-path comparison in rule order: local preference (higher), AS path
/// (shorter), origin (lower), MED (lower), eBGP over iBGP, IGP metric
/// (lower), then router ID (lower) as the last-resort tie-break. Tie means
/// equal through all seven rules. Throws if the prefixes differ.
RouteOrder compare_routes(const RouteEntry& a, const RouteEntry& b);

/// True when a and b tie on the first six rules, i.e. everything up to the
/// router-ID tie-break. This is the equality multipath selection relies on.
bool equal_on_first_six(const RouteEntry& a, const RouteEntry& b);

/// The routes installed for one prefix: the best path plus any further
/// paths equal to it on the first six attributes.
struct MultipathGroup {
  Prefix dst_prefix;
  RouteEntry best;
  std::vector<RouteEntry> members;  // includes best, peer-router-id ascending

  int size() const { return static_cast<int>(members.size()); }
  bool is_multipath() const { return members.size() >= 2; }
  std::vector<IpAddress> next_hops() const;
};

/// Picks the best route and the multipath members among `routes`.
/// Members tie with best on the first six attributes and have pairwise
/// distinct next hops; when they exceed max_paths the lowest peer router
/// IDs are kept. Flags are set on the returned copies: B on best, M on all
/// members iff the group has >= 2, E on eBGP-learned members.
MultipathGroup select_multipath(std::span<const RouteEntry> routes,
                                int max_paths);

/// Routing table of one router: at most one group per prefix.
class RoutingTable {
public:
  void install(MultipathGroup group);
  const MultipathGroup* find(const Prefix& prefix) const;
  /// Longest-prefix match for a destination address.
  const MultipathGroup* lookup(const IpAddress& dst) const;
  size_t size() const { return groups_.size(); }
  const std::map<Prefix, MultipathGroup>& groups() const { return groups_; }

private:
  std::map<Prefix, MultipathGroup> groups_;
};

/// What a router would need for multipath toward one neighbor.
struct RouterBgpConfig {
  bool ecmp_supported = false;
  int max_paths = 1;
  std::map<Asn, std::vector<BorderLink>> links_by_neighbor;
  std::vector<RouteEntry> learned_routes;
};

struct BgpmConditionCheck {
  bool ok = false;
  int failed_condition = 0;  // 1..4 when !ok
  std::string reason;
};

/// Checks the four deployment conditions for multipath toward `neighbor`
/// and `prefix`: (1) ECMP available, (2) >= 2 border links to the neighbor,
/// (3) >= 2 routes to the prefix learned via different links, (4) those
/// routes equal on the first six attributes. Reports the first failure.
/// Throws if the router has no session to `neighbor` at all.
BgpmConditionCheck check_bgpm_conditions(const RouterBgpConfig& config,
                                         Asn neighbor, const Prefix& prefix);

}  // namespace bgpm
