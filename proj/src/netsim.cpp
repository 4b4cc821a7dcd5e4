#include "bgpm/netsim.hpp"

#include <algorithm>
#include <sstream>

#include "bgpm/detail/mix.hpp"

namespace bgpm {

using detail::fnv1a64;
using detail::fnv1a64_str;
using detail::mix64;
using detail::MixStream;

const char* faras_kind_name(FarasKind k) {
  switch (k) {
    case FarasKind::SplitPerLink: return "split-per-link";
    case FarasKind::Parallel: return "parallel";
    case FarasKind::Merge: return "merge";
    case FarasKind::Complex: return "complex";
    case FarasKind::Unresponsive: return "unresponsive";
  }
  return "?";
}

std::optional<FarasKind> parse_faras_kind(std::string_view name) {
  if (name == "split-per-link") return FarasKind::SplitPerLink;
  if (name == "parallel") return FarasKind::Parallel;
  if (name == "merge") return FarasKind::Merge;
  if (name == "complex") return FarasKind::Complex;
  if (name == "unresponsive") return FarasKind::Unresponsive;
  return std::nullopt;
}

void DelayModel::register_link(const IpAddress& link_far_ip,
                               std::optional<DelayParams> override_params) {
  links_.emplace(link_far_ip, override_params.value_or(defaults_));
}

bool DelayModel::knows(const IpAddress& link_far_ip) const {
  return links_.count(link_far_ip) > 0;
}

const DelayParams& DelayModel::params_for(const IpAddress& link_far_ip) const {
  auto it = links_.find(link_far_ip);
  if (it == links_.end())
    throw std::invalid_argument("unknown border link " + link_far_ip.str());
  return it->second;
}

double sample_link_delay(const DelayModel& model, const IpAddress& link_far_ip,
                         int64_t time) {
  const DelayParams& p = model.params_for(link_far_ip);
  uint64_t key = fnv1a64_str("border-delay");
  key = fnv1a64(link_far_ip.bytes(), key);
  MixStream rng(key ^ mix64(model.seed()) ^
                mix64(static_cast<uint64_t>(time) * 0x9e3779b97f4a7c15ULL + 11));
  double d = p.base_ms + rng.next_lognormal(p.queue_median_ms, p.queue_sigma);
  if (rng.next_unit() < p.spike_probability)
    d += rng.next_lognormal(p.spike_median_ms, p.spike_sigma);
  return d;
}

double sample_link_delay(const DelayModel& model, const BorderLink& link,
                         int64_t time) {
  return sample_link_delay(model, link.far_ip(), time);
}

const RouterSpec* Topology::find_router(const std::string& name) const {
  auto it = routers.find(name);
  return it == routers.end() ? nullptr : &it->second;
}

const ProbeSource* Topology::find_probe(const IpAddress& src) const {
  for (const auto& p : probes)
    if (p.ip == src) return &p;
  return nullptr;
}

std::vector<const BorderLink*> Topology::links_at(const std::string& router,
                                                  Asn far_as) const {
  std::vector<const BorderLink*> out;
  for (const auto& l : links)
    if (l.near_router().name() == router && l.far_router().owner() == far_as)
      out.push_back(&l);
  std::sort(out.begin(), out.end(), [](const BorderLink* a, const BorderLink* b) {
    return a->far_ip() < b->far_ip();
  });
  return out;
}

std::map<IpAddress, std::string> Topology::dns_map() const {
  std::map<IpAddress, std::string> out;
  for (const auto& [name, spec] : routers)
    for (const auto& iface : spec.interfaces) out.emplace(iface, name);
  return out;
}

DelayModel Topology::make_delay_model() const {
  DelayModel model(delay_defaults, seed);
  for (const auto& l : links) {
    auto it = delay_overrides.find(l.far_ip());
    model.register_link(l.far_ip(), it == delay_overrides.end()
                                        ? std::nullopt
                                        : std::optional(it->second));
  }
  return model;
}

namespace {

// Synthetic anonymous-core pools. Interface addresses may not fall in these.
const Prefix& intra_pool_v4() {
  static Prefix p = parse_prefix("198.18.0.0/15");
  return p;
}
const Prefix& faras_pool_v4() {
  static Prefix p = parse_prefix("198.19.0.0/16");
  return p;
}

IpAddress synth_intra_hop(Family family, Asn near_as, const IpAddress& src,
                          int hop_index) {
  uint64_t h = fnv1a64_str("intra-hop");
  h = fnv1a64(src.bytes(), h);
  h = mix64(h ^ (static_cast<uint64_t>(near_as.number()) << 8) ^
            static_cast<uint64_t>(hop_index));
  if (family == Family::V4) {
    // 198.18.0.0/16 with the low byte pinned to the hop index
    return IpAddress::from_v4({198, 18, static_cast<uint8_t>(h >> 8),
                               static_cast<uint8_t>(1 + hop_index)});
  }
  std::array<uint8_t, 16> b{0x20, 0x01, 0x0d, 0xb8, 0xff, 0xfe, 0, 0,
                            0,    0,    0,    0,    0,    0,    0, 0};
  b[6] = static_cast<uint8_t>(h >> 8);
  b[15] = static_cast<uint8_t>(1 + hop_index);
  return IpAddress::from_v6(b);
}

// Hop address allocator for synthesized farside chains: one /24-sized slot
// per (case index, lane).
IpAddress faras_hop_ip(Family family, int case_index, int lane, int pos) {
  if (family == Family::V4)
    return IpAddress::from_v4({198, 19, static_cast<uint8_t>(case_index),
                               static_cast<uint8_t>(lane * 16 + pos + 1)});
  std::array<uint8_t, 16> b{0x20, 0x01, 0x0d, 0xb8, 0xff, 0xff, 0, 0,
                            0,    0,    0,    0,    0,    0,    0, 0};
  b[6] = static_cast<uint8_t>(case_index);
  b[15] = static_cast<uint8_t>(lane * 16 + pos + 1);
  return IpAddress::from_v6(b);
}

FarasPattern make_faras_pattern(FarasKind kind, Family family, int case_index,
                                int n_links) {
  FarasPattern pat;
  pat.kind = kind;
  pat.per_link_hops.resize(static_cast<size_t>(n_links));
  auto ip = [&](int lane, int pos) {
    return std::optional<IpAddress>(faras_hop_ip(family, case_index, lane, pos));
  };
  for (int l = 0; l < n_links; ++l) {
    auto& chain = pat.per_link_hops[static_cast<size_t>(l)];
    switch (kind) {
      case FarasKind::Parallel:
        chain.push_back({{ip(l, 0)}});
        chain.push_back({{ip(l, 1)}});
        break;
      case FarasKind::SplitPerLink:
        // first hop fans out onto two internal links, then rejoins a
        // per-lane aggregator
        chain.push_back({{ip(l, 0), ip(l, 1)}});
        chain.push_back({{ip(l, 2)}});
        break;
      case FarasKind::Merge:
        // all lanes share the same two-hop tail
        chain.push_back({{ip(15, 0)}});
        chain.push_back({{ip(15, 1)}});
        break;
      case FarasKind::Complex:
        if (l == 0) {
          chain.push_back({{ip(0, 0), ip(0, 1)}});  // lane 0 fans out
          chain.push_back({{ip(0, 2)}});
        } else {
          chain.push_back({{ip(l, 0)}});  // other lanes stay single chains
          chain.push_back({{ip(l, 1)}});
        }
        break;
      case FarasKind::Unresponsive:
        if (l == n_links - 1) {
          chain.push_back({{std::nullopt}});  // silent hop
          chain.push_back({{ip(l, 1)}});
        } else {
          chain.push_back({{ip(l, 0)}});
          chain.push_back({{ip(l, 1)}});
        }
        break;
    }
  }
  return pat;
}

int64_t synth_uptime_seconds(const std::string& router,
                             const IpAddress& neighbor_ip) {
  uint64_t h = fnv1a64_str(router);
  h = fnv1a64(neighbor_ip.bytes(), h);
  // between ~1 hour and ~200 days, minute granularity
  return static_cast<int64_t>(60 + mix64(h) % (200 * 24 * 60)) * 60;
}

int64_t synth_route_age(const std::string& router, const Prefix& prefix) {
  uint64_t h = fnv1a64_str(router);
  h = fnv1a64_str(prefix.str(), h);
  return static_cast<int64_t>(30 + mix64(h ^ 0x51ed) % (90 * 24 * 60)) * 60;
}

}  // namespace

Topology build_topology(const TopologyConfig& config) {
  Topology topo;
  topo.near_as = config.near_as;
  topo.seed = config.seed;
  topo.intra_hops = config.intra_hops;
  topo.base_epoch = config.base_epoch;
  topo.tick_seconds = config.tick_seconds;
  topo.ases = config.ases;
  topo.ixp_directory = config.ixps;
  topo.probes = config.probes;
  topo.unreachable = config.unreachable;
  topo.delay_defaults = config.delay;

  if (!topo.ases.count(config.near_as))
    throw ConfigError("near AS " + config.near_as.str() + " not declared");

  std::map<IpAddress, std::string> iface_owner;
  for (const auto& r : config.routers) {
    if (!topo.ases.count(r.id.owner()))
      throw ConfigError("router " + r.id.name() + " owned by undeclared " +
                        r.id.owner().str());
    if (!topo.routers.emplace(r.id.name(), r).second)
      throw ConfigError("duplicate router name " + r.id.name());
    for (const auto& iface : r.interfaces) {
      if (iface.family() == Family::V4 && intra_pool_v4().contains(iface))
        throw ConfigError("interface " + iface.str() +
                          " collides with the synthetic hop pool");
      if (!iface_owner.emplace(iface, r.id.name()).second)
        throw ConfigError("interface " + iface.str() + " declared twice");
    }
  }

  for (const auto& ls : config.links) {
    auto* near_r = topo.find_router(ls.router);
    auto* far_r = topo.find_router(ls.far_router);
    if (!near_r) throw ConfigError("link references unknown router " + ls.router);
    if (!far_r)
      throw ConfigError("link references unknown router " + ls.far_router);
    auto has_iface = [](const RouterSpec& r, const IpAddress& ip) {
      return std::find(r.interfaces.begin(), r.interfaces.end(), ip) !=
             r.interfaces.end();
    };
    if (!has_iface(*near_r, ls.near_ip))
      throw ConfigError("near_ip " + ls.near_ip.str() +
                        " is not an interface of " + ls.router);
    if (!has_iface(*far_r, ls.far_ip))
      throw ConfigError("far_ip " + ls.far_ip.str() +
                        " is not an interface of " + ls.far_router);
    topo.links.emplace_back(ls.near_ip, ls.far_ip, near_r->id, far_r->id,
                            ls.bandwidth_gbps);
    if (ls.delay) topo.delay_overrides.emplace(ls.far_ip, *ls.delay);
  }

  // Planted cases, validated against the declared links and announcements.
  int case_index = 0;
  std::set<std::string> case_keys;
  for (const auto& cs : config.cases) {
    auto* router = topo.find_router(cs.router);
    if (!router) throw ConfigError("case references unknown router " + cs.router);
    auto as_it = topo.ases.find(cs.far_as);
    if (as_it == topo.ases.end())
      throw ConfigError("case references undeclared " + cs.far_as.str());
    const auto& announced = as_it->second.announced;
    if (std::find(announced.begin(), announced.end(), cs.prefix) ==
        announced.end())
      throw ConfigError("case prefix " + cs.prefix.str() +
                        " is not announced by " + cs.far_as.str());
    auto links = topo.links_at(cs.router, cs.far_as);
    for (const auto& fip : cs.far_ips) {
      bool found = false;
      for (auto* l : links) found |= l->far_ip() == fip;
      if (!found)
        throw ConfigError("case FarIP " + fip.str() + " has no link at " +
                          cs.router + " toward " + cs.far_as.str());
    }
    BgpmCase planted(router->id.owner(), router->id, cs.far_as, cs.prefix,
                     cs.far_ips);
    if (!case_keys.insert(planted.tuple_key()).second)
      throw ConfigError("duplicate case " + planted.str());
    topo.faras_patterns.emplace(
        planted.tuple_key(),
        make_faras_pattern(cs.pattern, cs.prefix.family(), case_index++,
                           planted.link_count()));
    topo.planted_cases.push_back(std::move(planted));
  }

  // RIB installation: one group per (router, neighbor prefix).
  auto planted_for = [&](const std::string& router, Asn far_as,
                         const Prefix& prefix) -> const BgpmCase* {
    for (const auto& c : topo.planted_cases)
      if (c.near_br().name() == router && c.far_as() == far_as &&
          c.dst_prefix() == prefix)
        return &c;
    return nullptr;
  };
  auto decoy_for = [&](const std::string& router, Asn far_as,
                       const Prefix& prefix) -> const DecoySpec* {
    for (const auto& d : config.decoys)
      if (d.router == router && d.far_as == far_as && d.prefix == prefix)
        return &d;
    return nullptr;
  };

  for (auto& [name, router] : topo.routers) {
    RoutingTable table;
    std::set<Asn> neighbor_ases;
    for (const auto& l : topo.links)
      if (l.near_router().name() == name)
        neighbor_ases.insert(l.far_router().owner());
    for (Asn far_as : neighbor_ases) {
      auto links = topo.links_at(name, far_as);
      for (const auto& prefix : topo.ases.at(far_as).announced) {
        auto make_route = [&](const IpAddress& far_ip) {
          return RouteEntry{prefix,
                            far_ip,
                            100,
                            {far_as},
                            Origin::Igp,
                            0,
                            LearnedVia::Ebgp,
                            0,
                            far_ip,
                            synth_route_age(name, prefix),
                            0};
        };
        std::vector<RouteEntry> routes;
        if (const BgpmCase* c = planted_for(name, far_as, prefix)) {
          for (const auto& fip : c->far_ips()) routes.push_back(make_route(fip));
        } else if (const DecoySpec* d = decoy_for(name, far_as, prefix)) {
          if (links.size() < 2)
            throw ConfigError("decoy at " + name + " for " + prefix.str() +
                              " needs two links");
          routes.push_back(make_route(links[0]->far_ip()));
          routes.push_back(make_route(links[1]->far_ip()));
          if (d->kind == DecoyKind::UnequalMed) {
            routes[1].med = 10;
          } else {
            for (auto& r : routes) r.learned_via = LearnedVia::Ibgp;
          }
        } else {
          routes.push_back(make_route(links.front()->far_ip()));
        }
        table.install(select_multipath(routes, std::max(router.max_paths, 1)));
      }
    }
    topo.rib.emplace(name, std::move(table));
  }

  // Ground-truth consistency: each planted case must clear the deployment
  // conditions and appear in the RIB with exactly its FarIPs.
  for (const auto& c : topo.planted_cases) {
    const auto& router = topo.routers.at(c.near_br().name());
    RouterBgpConfig rc;
    rc.ecmp_supported = router.ecmp_supported;
    rc.max_paths = router.max_paths;
    for (const auto& l : topo.links)
      if (l.near_router().name() == c.near_br().name())
        rc.links_by_neighbor[l.far_router().owner()].push_back(l);
    for (const auto& [prefix, group] : topo.rib.at(c.near_br().name()).groups())
      for (const auto& m : group.members) rc.learned_routes.push_back(m);
    // Re-learn the case routes pre-selection for the condition check.
    for (const auto& fip : c.far_ips())
      rc.learned_routes.push_back(RouteEntry{
          c.dst_prefix(), fip, 100, {c.far_as()}, Origin::Igp, 0,
          LearnedVia::Ebgp, 0, fip, 0, 0});
    auto check = check_bgpm_conditions(rc, c.far_as(), c.dst_prefix());
    if (!check.ok)
      throw ConfigError("planted case " + c.str() + " fails condition " +
                        std::to_string(check.failed_condition) + ": " +
                        check.reason);
    auto* group = topo.rib.at(c.near_br().name()).find(c.dst_prefix());
    if (!group || group->next_hops() != c.far_ips())
      throw ConfigError("planted case " + c.str() +
                        " not installed as its multipath group");
  }

  for (const auto& p : topo.probes) {
    if (!topo.ases.count(p.asn))
      throw ConfigError("probe " + p.ip.str() + " in undeclared " + p.asn.str());
    for (const auto& [router, iface] : p.ingress_iface) {
      auto* r = topo.find_router(router);
      if (!r || iface < 0 || static_cast<size_t>(iface) >= r->interfaces.size())
        throw ConfigError("probe " + p.ip.str() + " ingress for " + router +
                          " is out of range");
    }
    for (const auto& [prefix, router] : p.egress_router)
      if (!topo.find_router(router))
        throw ConfigError("probe egress override references unknown router " +
                          router);
  }

  return topo;
}

namespace {

// Per-hop responder choice within a farside template.
const std::optional<IpAddress>& pick_option(const FarHopTemplate& tmpl,
                                            const IpAddress& dst) {
  if (tmpl.options.size() == 1) return tmpl.options.front();
  uint64_t h = fnv1a64(dst.bytes(), fnv1a64_str("faras-fan"));
  return tmpl.options[mix64(h) % tmpl.options.size()];
}

double intra_hop_delay(uint64_t seed, const IpAddress& hop, int64_t time,
                       double median_ms) {
  uint64_t key = fnv1a64(hop.bytes(), fnv1a64_str("intra-delay"));
  MixStream rng(key ^ mix64(seed) ^ mix64(static_cast<uint64_t>(time) + 17));
  return rng.next_lognormal(median_ms, 0.3);
}

double far_hop_delay(uint64_t seed, const IpAddress& hop, int64_t time) {
  uint64_t key = fnv1a64(hop.bytes(), fnv1a64_str("far-delay"));
  MixStream rng(key ^ mix64(seed) ^ mix64(static_cast<uint64_t>(time) + 23));
  return rng.next_lognormal(1.5, 0.3);
}

}  // namespace

TraceRecord NetSimulator::run_traceroute(const ProbeSpec& probe) {
  const Topology& topo = topo_;
  const ProbeSource* src = topo.find_probe(probe.src);
  if (!src)
    throw std::invalid_argument("probe source " + probe.src.str() +
                                " is not placed in the topology");
  if (probe.src.family() != probe.dst.family())
    throw std::invalid_argument("probe families must match");

  TraceRecord rec{probe, {}};
  int ttl = 0;
  double cum_ms = 0.0;
  auto push_hop = [&](const std::optional<IpAddress>& responder) {
    Hop hop{++ttl, responder, {}};
    if (responder) {
      uint64_t key = fnv1a64(probe.dst.bytes(), fnv1a64_str("pkt-jitter"));
      key = fnv1a64(responder->bytes(), key);
      MixStream rng(key ^ mix64(topo.seed) ^
                    mix64(static_cast<uint64_t>(probe.time) * 31 + ttl));
      hop.rtt_ms.push_back(cum_ms);  // first packet at the modeled delay
      for (int p = 1; p < probe.packets_per_hop; ++p)
        hop.rtt_ms.push_back(cum_ms + rng.next_lognormal(0.12, 0.5));
    }
    rec.hops.push_back(std::move(hop));
  };

  // Intra-domain approach to the border.
  for (int i = 0; i < topo.intra_hops; ++i) {
    auto hop = synth_intra_hop(probe.dst.family(), src->asn, probe.src, i);
    cum_ms += intra_hop_delay(topo.seed, hop, probe.time,
                              topo.delay_defaults.intra_hop_ms);
    push_hop(hop);
  }

  // Egress router for this destination.
  std::vector<std::string> candidates;
  for (const auto& [name, router] : topo.routers)
    if (router.id.owner() == src->asn && topo.rib.at(name).lookup(probe.dst))
      candidates.push_back(name);
  std::string egress;
  for (const auto& [prefix, router] : src->egress_router)
    if (prefix.contains(probe.dst) &&
        std::find(candidates.begin(), candidates.end(), router) !=
            candidates.end())
      egress = router;
  if (egress.empty() && !candidates.empty())
    egress = *std::min_element(candidates.begin(), candidates.end());
  if (egress.empty()) {
    push_hop(std::nullopt);  // unroutable: trailing unresponsive hops
    push_hop(std::nullopt);
    return rec;
  }

  const RouterSpec& router = topo.routers.at(egress);
  int iface_idx = 0;
  if (auto it = src->ingress_iface.find(egress); it != src->ingress_iface.end())
    iface_idx = it->second;
  IpAddress near_ip = router.interfaces.at(static_cast<size_t>(iface_idx));
  if (near_ip.family() != probe.dst.family()) {
    for (const auto& iface : router.interfaces)
      if (iface.family() == probe.dst.family()) {
        near_ip = iface;
        break;
      }
  }
  cum_ms += intra_hop_delay(topo.seed, near_ip, probe.time,
                            topo.delay_defaults.intra_hop_ms);
  push_hop(near_ip);

  if (topo.unreachable.count(probe.dst)) {
    push_hop(std::nullopt);
    push_hop(std::nullopt);
    return rec;
  }

  const MultipathGroup* group = topo.rib.at(egress).lookup(probe.dst);
  int link_idx = 0;
  if (group->size() > 1) {
    uint64_t& counter = rr_counters_[egress];
    link_idx = select_link_for_probe(router.policy, probe.src, probe.dst,
                                     probe.protocol, probe.time, group->size(),
                                     counter);
  }
  const IpAddress far_ip = group->members[static_cast<size_t>(link_idx)].next_hop;
  cum_ms += sample_link_delay(delays_, far_ip, probe.time);
  push_hop(far_ip);

  // Farside chain: a planted pattern when one exists, a single
  // penultimate hop otherwise.
  const FarasPattern* pattern = nullptr;
  int case_link_idx = 0;
  for (const auto& c : topo.planted_cases)
    if (c.near_br().name() == egress && c.dst_prefix() == group->dst_prefix) {
      auto it = topo.faras_patterns.find(c.tuple_key());
      if (it != topo.faras_patterns.end()) {
        pattern = &it->second;
        case_link_idx = c.link_index_of(far_ip);
      }
      break;
    }
  if (pattern && case_link_idx >= 0 &&
      static_cast<size_t>(case_link_idx) < pattern->per_link_hops.size()) {
    for (const auto& tmpl : pattern->per_link_hops[static_cast<size_t>(case_link_idx)]) {
      const auto& pick = pick_option(tmpl, probe.dst);
      if (pick) {
        cum_ms += far_hop_delay(topo.seed, *pick, probe.time);
        push_hop(*pick);
      } else {
        push_hop(std::nullopt);
        cum_ms += 0.8;  // the silent hop still forwards
      }
    }
  } else {
    auto hop = faras_hop_ip(probe.dst.family(), 255, 0, 0);
    cum_ms += far_hop_delay(topo.seed, hop, probe.time);
    push_hop(hop);
  }

  cum_ms += far_hop_delay(topo.seed, probe.dst, probe.time);
  push_hop(probe.dst);
  return rec;
}

TraceRecord run_traceroute(const Topology& topo, const ProbeSpec& probe,
                           const DelayModel& delays) {
  NetSimulator sim(topo, delays);
  return sim.run_traceroute(probe);
}

LgView lg_snapshot(const Topology& topo, const std::string& router_name) {
  LgView view;
  const RouterSpec* router = topo.find_router(router_name);
  if (!router) {
    view.exists = false;
    view.router_name = router_name;
    return view;
  }
  view.router_name = router_name;
  view.local_as = router->id.owner().number();
  std::vector<const BorderLink*> sessions;
  for (const auto& l : topo.links)
    if (l.near_router().name() == router_name) sessions.push_back(&l);
  std::sort(sessions.begin(), sessions.end(),
            [](const BorderLink* a, const BorderLink* b) {
              return a->far_ip() < b->far_ip();
            });
  for (const auto* l : sessions)
    view.sessions.push_back(SummaryRow{
        l->far_ip(), l->far_router().owner(), "Established",
        synth_uptime_seconds(router_name, l->far_ip())});
  view.table = topo.rib.at(router_name);
  return view;
}

std::string SimLgSource::routes(const RouterId& router,
                                const IpAddress& target) {
  return render_routes_detail(lg_snapshot(topo_, router.name()), target);
}

std::optional<std::string> SimLgSource::summary(const RouterId& router) {
  if (!topo_.find_router(router.name())) return std::nullopt;
  return render_summary(lg_snapshot(topo_, router.name()));
}

}  // namespace bgpm
