#include "bgpm/bgp.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace bgpm {

const char* origin_name(Origin o) {
  switch (o) {
    case Origin::Igp: return "igp";
    case Origin::Egp: return "egp";
    case Origin::Incomplete: return "incomplete";
  }
  return "?";
}

namespace {

// <0: a better, >0: b better, 0: tie on this rule.
int cmp_first_six(const RouteEntry& a, const RouteEntry& b) {
  if (a.local_pref != b.local_pref) return a.local_pref > b.local_pref ? -1 : 1;
  if (a.as_path.size() != b.as_path.size())
    return a.as_path.size() < b.as_path.size() ? -1 : 1;
  if (a.origin != b.origin) return a.origin < b.origin ? -1 : 1;
  if (a.med != b.med) return a.med < b.med ? -1 : 1;
  if (a.learned_via != b.learned_via)
    return a.learned_via == LearnedVia::Ebgp ? -1 : 1;
  if (a.igp_metric != b.igp_metric) return a.igp_metric < b.igp_metric ? -1 : 1;
  return 0;
}

}  // namespace

RouteOrder compare_routes(const RouteEntry& a, const RouteEntry& b) {
  if (a.dst_prefix != b.dst_prefix)
    throw std::invalid_argument("compare_routes: mismatched prefixes " +
                                a.dst_prefix.str() + " vs " + b.dst_prefix.str());
  int c = cmp_first_six(a, b);
  if (c == 0) {
    if (a.peer_router_id == b.peer_router_id) return RouteOrder::Tie;
    c = a.peer_router_id < b.peer_router_id ? -1 : 1;
  }
  return c < 0 ? RouteOrder::FirstBetter : RouteOrder::SecondBetter;
}

bool equal_on_first_six(const RouteEntry& a, const RouteEntry& b) {
  return a.dst_prefix == b.dst_prefix && cmp_first_six(a, b) == 0;
}

std::vector<IpAddress> MultipathGroup::next_hops() const {
  std::vector<IpAddress> out;
  out.reserve(members.size());
  for (const auto& r : members) out.push_back(r.next_hop);
  return out;
}

MultipathGroup select_multipath(std::span<const RouteEntry> routes,
                                int max_paths) {
  if (routes.empty())
    throw std::invalid_argument("select_multipath: no routes");
  if (max_paths < 1)
    throw std::invalid_argument("select_multipath: max_paths must be >= 1");
  for (const auto& r : routes)
    if (r.dst_prefix != routes.front().dst_prefix)
      throw std::invalid_argument("select_multipath: mismatched prefixes");

  const RouteEntry* best = &routes.front();
  for (const auto& r : routes)
    if (compare_routes(r, *best) == RouteOrder::FirstBetter) best = &r;

  // Candidates tie with best on the first six attributes; order them by
  // peer router ID so truncation and next-hop dedup are deterministic.
  std::vector<RouteEntry> candidates;
  for (const auto& r : routes)
    if (equal_on_first_six(r, *best)) candidates.push_back(r);
  std::sort(candidates.begin(), candidates.end(),
            [](const RouteEntry& a, const RouteEntry& b) {
              return a.peer_router_id < b.peer_router_id;
            });

  MultipathGroup group{routes.front().dst_prefix, *best, {}};
  std::set<IpAddress> hops_seen;
  for (const auto& r : candidates) {
    if (static_cast<int>(group.members.size()) >= max_paths) break;
    if (!hops_seen.insert(r.next_hop).second) continue;
    group.members.push_back(r);
  }

  bool multi = group.members.size() >= 2;
  for (auto& m : group.members) {
    m.flags = 0;
    if (multi) m.flags |= kFlagMultipath;
    if (m.learned_via == LearnedVia::Ebgp) m.flags |= kFlagEbgp;
  }
  // Best carries the lowest peer router ID among the candidates, so it is
  // the first member after the sort above.
  group.members.front().flags |= kFlagBest;
  group.best = group.members.front();
  return group;
}

void RoutingTable::install(MultipathGroup group) {
  auto prefix = group.dst_prefix;
  groups_.insert_or_assign(prefix, std::move(group));
}

const MultipathGroup* RoutingTable::find(const Prefix& prefix) const {
  auto it = groups_.find(prefix);
  return it == groups_.end() ? nullptr : &it->second;
}

const MultipathGroup* RoutingTable::lookup(const IpAddress& dst) const {
  const MultipathGroup* hit = nullptr;
  for (const auto& [prefix, group] : groups_) {
    if (!prefix.contains(dst)) continue;
    if (!hit || prefix.length() > hit->dst_prefix.length()) hit = &group;
  }
  return hit;
}

BgpmConditionCheck check_bgpm_conditions(const RouterBgpConfig& config,
                                         Asn neighbor, const Prefix& prefix) {
  auto it = config.links_by_neighbor.find(neighbor);
  if (it == config.links_by_neighbor.end())
    throw std::invalid_argument("unknown neighbor " + neighbor.str());

  if (!config.ecmp_supported || config.max_paths < 2)
    return {false, 1, "ECMP not available (maximum-paths " +
                          std::to_string(config.max_paths) + ")"};

  const auto& links = it->second;
  if (links.size() < 2)
    return {false, 2, "only " + std::to_string(links.size()) +
                          " border link(s) to " + neighbor.str()};

  std::set<IpAddress> link_far_ips;
  for (const auto& l : links) link_far_ips.insert(l.far_ip());

  std::vector<RouteEntry> via_links;
  std::set<IpAddress> distinct_hops;
  for (const auto& r : config.learned_routes)
    if (r.dst_prefix == prefix && link_far_ips.count(r.next_hop)) {
      via_links.push_back(r);
      distinct_hops.insert(r.next_hop);
    }
  if (distinct_hops.size() < 2)
    return {false, 3, "fewer than 2 routes to " + prefix.str() +
                          " learned via different links"};

  auto group = select_multipath(via_links, config.max_paths);
  if (!group.is_multipath())
    return {false, 4, "routes to " + prefix.str() +
                          " differ in the first six attributes"};
  return {true, 0, ""};
}

}  // namespace bgpm
