#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bgpm/bgp.hpp"
#include "bgpm/core.hpp"
#include "bgpm/ecmp.hpp"
#include "bgpm/lg.hpp"

// Deterministic topology and measurement simulator. A topology carries
// planted multipath cases as ground truth; the simulator answers LG queries
// and traceroute probes about it, with link delays drawn from a seeded
// queuing model. Identical config and seed give bit-identical output.

namespace bgpm {

enum class AsRole : uint8_t { Transit, Stub, Content };

enum class FarasKind : uint8_t {
  SplitPerLink,   // each border link fans out onto >= 2 internal links
  Parallel,       // disjoint single chains per border link
  Merge,          // all border links converge on a shared hop
  Complex,        // none of the above or mixtures
  Unresponsive,   // >= 1 downstream hop never answers
};

const char* faras_kind_name(FarasKind k);
std::optional<FarasKind> parse_faras_kind(std::string_view name);

/// One downstream hop position on one border link: the responding address
/// is picked among `options` by a destination hash. An unset option is a
/// hop that never responds.
struct FarHopTemplate {
  std::vector<std::optional<IpAddress>> options;
};

struct FarasPattern {
  FarasKind kind = FarasKind::Parallel;
  // Indexed by border-link index; each inner vector is the hop chain
  // between the FarIP and the destination.
  std::vector<std::vector<FarHopTemplate>> per_link_hops;
};

struct AsSpec {
  AsRole role = AsRole::Stub;
  std::vector<Prefix> announced;  // announcement order is meaningful
};

struct RouterSpec {
  RouterId id;
  bool ecmp_supported = true;
  int max_paths = 1;
  EcmpPolicy policy;
  std::vector<IpAddress> interfaces;
};

/// Placement of one vantage point and how its traffic reaches the border.
struct ProbeSource {
  IpAddress ip;
  Asn asn;
  std::map<std::string, int> ingress_iface;     // router -> interface index
  std::map<Prefix, std::string> egress_router;  // override: prefix -> router
};

/// Test hooks that degrade a (router, prefix) from a clean multipath or
/// singleton installation.
enum class DecoyKind : uint8_t {
  UnequalMed,  // two eBGP routes over two links, MED differs: best-only
  IbgpPair,    // two equal iBGP routes: multipath without the E flag
};

struct DecoySpec {
  std::string router;
  Asn far_as;
  Prefix prefix;
  DecoyKind kind = DecoyKind::UnequalMed;
};

struct DelayParams {
  double base_ms = 18.0;
  double queue_median_ms = 10.0;
  double queue_sigma = 0.6;
  double spike_probability = 0.05;
  double spike_median_ms = 500.0;
  double spike_sigma = 1.0;
  double intra_hop_ms = 2.0;
};

/// Seeded per-link delay sampler. One draw per (link, time): the border
/// delay every probe crossing that link at that time observes.
class DelayModel {
public:
  DelayModel(DelayParams defaults, uint64_t seed)
      : defaults_(defaults), seed_(seed) {}

  void register_link(const IpAddress& link_far_ip,
                     std::optional<DelayParams> override_params = {});
  bool knows(const IpAddress& link_far_ip) const;
  const DelayParams& params_for(const IpAddress& link_far_ip) const;
  uint64_t seed() const { return seed_; }

private:
  DelayParams defaults_;
  uint64_t seed_;
  std::map<IpAddress, DelayParams> links_;
};

/// base + queuing draw, plus a spike draw with the configured probability.
/// Deterministic in (model seed, link, time). Throws on unknown links.
double sample_link_delay(const DelayModel& model, const BorderLink& link,
                         int64_t time);
double sample_link_delay(const DelayModel& model, const IpAddress& link_far_ip,
                         int64_t time);

struct PlantedCaseSpec {
  std::string router;
  Asn far_as;
  Prefix prefix;
  std::vector<IpAddress> far_ips;
  FarasKind pattern = FarasKind::Parallel;
};

/// Parsed, not yet validated simulator input. Mirrors the JSON schema in
/// docs/formats.md.
struct TopologyConfig {
  Asn near_as{1};
  uint64_t seed = 0;
  int intra_hops = 2;
  int64_t base_epoch = 1623801600;  // 2021-06-16 00:00 UTC
  int tick_seconds = 900;
  std::map<Asn, AsSpec> ases;
  std::vector<RouterSpec> routers;
  struct LinkSpec {
    std::string router;
    IpAddress near_ip;
    std::string far_router;
    IpAddress far_ip;
    std::optional<double> bandwidth_gbps;
    std::optional<DelayParams> delay;
  };
  std::vector<LinkSpec> links;
  IxpDirectory ixps;
  std::vector<PlantedCaseSpec> cases;
  std::vector<DecoySpec> decoys;
  std::vector<ProbeSource> probes;
  DelayParams delay;
  std::set<IpAddress> unreachable;

  static TopologyConfig from_json_text(const std::string& text);
  static TopologyConfig from_json_file(const std::string& path);
  std::string to_json_text() const;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Fully validated topology with per-router RIBs installed.
struct Topology {
  Asn near_as{1};
  uint64_t seed = 0;
  int intra_hops = 2;
  int64_t base_epoch = 0;
  int tick_seconds = 900;
  std::map<Asn, AsSpec> ases;
  std::map<std::string, RouterSpec> routers;
  std::vector<BorderLink> links;
  IxpDirectory ixp_directory;
  std::vector<BgpmCase> planted_cases;
  std::map<std::string, FarasPattern> faras_patterns;  // case tuple_key -> pattern
  std::map<std::string, RoutingTable> rib;             // router name -> table
  std::vector<ProbeSource> probes;
  std::set<IpAddress> unreachable;
  DelayParams delay_defaults;
  std::map<IpAddress, DelayParams> delay_overrides;  // by link far_ip

  const RouterSpec* find_router(const std::string& name) const;
  const ProbeSource* find_probe(const IpAddress& src) const;
  std::vector<const BorderLink*> links_at(const std::string& router,
                                          Asn far_as) const;
  /// Interface address -> router name, for the DNS oracle and fixtures.
  std::map<IpAddress, std::string> dns_map() const;
  DelayModel make_delay_model() const;
  int64_t tick_time(int64_t tick) const {
    return base_epoch + tick * tick_seconds;
  }
};

/// Validates the config and installs all RIBs: planted cases become
/// multipath groups, everything else singletons (or decoys). Throws
/// ConfigError on dangling references or cases that fail the deployment
/// conditions.
Topology build_topology(const TopologyConfig& config);

struct ProbeSpec {
  IpAddress src;
  IpAddress dst;
  Protocol protocol = Protocol::Icmp;
  int64_t time = 0;  // epoch seconds of the measurement tick
  int packets_per_hop = 3;
  int paris_variation = 16;
};

struct Hop {
  int ttl = 0;
  std::optional<IpAddress> responder;
  std::vector<double> rtt_ms;
};

struct TraceRecord {
  ProbeSpec probe;
  std::vector<Hop> hops;
};

std::string trace_to_json_line(const TraceRecord& trace);
TraceRecord trace_from_json_line(const std::string& line);

/// Runs probes against a topology. Owns the per-router round-robin
/// counters, which advance once per probe session.
class NetSimulator {
public:
  NetSimulator(const Topology& topo)
      : topo_(topo), delays_(topo.make_delay_model()) {}
  NetSimulator(const Topology& topo, DelayModel delays)
      : topo_(topo), delays_(std::move(delays)) {}

  TraceRecord run_traceroute(const ProbeSpec& probe);
  const Topology& topology() const { return topo_; }
  const DelayModel& delay_model() const { return delays_; }

private:
  const Topology& topo_;
  DelayModel delays_;
  std::map<std::string, uint64_t> rr_counters_;
};

/// Single-shot convenience wrapper (fresh round-robin state per call).
TraceRecord run_traceroute(const Topology& topo, const ProbeSpec& probe,
                           const DelayModel& delays);

/// Immutable router state for the LG renderers. Unknown routers yield a
/// view with exists == false, which renders as the not-existing sentinel.
LgView lg_snapshot(const Topology& topo, const std::string& router_name);

/// LG response source answering from a topology.
class SimLgSource : public LgSource {
public:
  explicit SimLgSource(const Topology& topo) : topo_(topo) {}
  std::string routes(const RouterId& router, const IpAddress& target) override;
  std::optional<std::string> summary(const RouterId& router) override;
  int64_t epoch() const override { return topo_.base_epoch; }

private:
  const Topology& topo_;
};

}  // namespace bgpm
