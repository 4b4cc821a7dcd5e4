#include <fstream>
#include <sstream>

#include "bgpm/netsim.hpp"
#include "json.hpp"

// JSON bindings for the simulator config and the traceroute record stream.
// Schemas are documented in docs/formats.md.

namespace bgpm {

using nlohmann::json;

namespace {

AsRole parse_role(const std::string& s) {
  if (s == "transit") return AsRole::Transit;
  if (s == "stub") return AsRole::Stub;
  if (s == "content") return AsRole::Content;
  throw ConfigError("unknown AS role '" + s + "'");
}

const char* role_name(AsRole r) {
  switch (r) {
    case AsRole::Transit: return "transit";
    case AsRole::Stub: return "stub";
    case AsRole::Content: return "content";
  }
  return "?";
}

DelayParams parse_delay(const json& j, DelayParams base) {
  base.base_ms = j.value("base_ms", base.base_ms);
  base.queue_median_ms = j.value("queue_median_ms", base.queue_median_ms);
  base.queue_sigma = j.value("queue_sigma", base.queue_sigma);
  base.spike_probability = j.value("spike_probability", base.spike_probability);
  base.spike_median_ms = j.value("spike_median_ms", base.spike_median_ms);
  base.spike_sigma = j.value("spike_sigma", base.spike_sigma);
  base.intra_hop_ms = j.value("intra_hop_ms", base.intra_hop_ms);
  if (base.base_ms < 0 || base.queue_median_ms < 0 || base.queue_sigma < 0 ||
      base.spike_probability < 0 || base.spike_probability > 1 ||
      base.spike_median_ms < 0 || base.spike_sigma < 0 || base.intra_hop_ms < 0)
    throw ConfigError("delay parameters must be nonnegative, spike_probability in [0,1]");
  return base;
}

json delay_to_json(const DelayParams& p) {
  return json{{"base_ms", p.base_ms},
              {"queue_median_ms", p.queue_median_ms},
              {"queue_sigma", p.queue_sigma},
              {"spike_probability", p.spike_probability},
              {"spike_median_ms", p.spike_median_ms},
              {"spike_sigma", p.spike_sigma},
              {"intra_hop_ms", p.intra_hop_ms}};
}

}  // namespace

TopologyConfig TopologyConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    TopologyConfig cfg;
    cfg.near_as = Asn(j.at("near_as").get<uint32_t>());
    cfg.seed = j.value("seed", 0ULL);
    cfg.intra_hops = j.value("intra_hops", 2);
    cfg.base_epoch = j.value("base_epoch", cfg.base_epoch);
    cfg.tick_seconds = j.value("tick_seconds", 900);
    if (cfg.intra_hops < 0 || cfg.tick_seconds <= 0)
      throw ConfigError("intra_hops must be >= 0 and tick_seconds > 0");

    for (const auto& a : j.value("ases", json::array())) {
      AsSpec spec;
      spec.role = parse_role(a.value("role", "stub"));
      for (const auto& p : a.value("prefixes", json::array()))
        spec.announced.push_back(parse_prefix(p.get<std::string>()));
      cfg.ases.emplace(Asn(a.at("asn").get<uint32_t>()), std::move(spec));
    }

    for (const auto& r : j.value("routers", json::array())) {
      RouterSpec spec{RouterId(r.at("name").get<std::string>(),
                               Asn(r.at("owner").get<uint32_t>())),
                      r.value("ecmp", true), r.value("max_paths", 1),
                      EcmpPolicy{}, {}};
      auto alg = parse_ecmp_algorithm(r.value("algorithm", "universal"));
      if (!alg) throw ConfigError("unknown ECMP algorithm in router " +
                                  spec.id.name());
      spec.policy.algorithm = *alg;
      spec.policy.seed = cfg.seed;
      spec.policy.router_salt = r.value("salt", 0ULL);
      for (const auto& iface : r.value("interfaces", json::array()))
        spec.interfaces.push_back(IpAddress::parse(iface.get<std::string>()));
      cfg.routers.push_back(std::move(spec));
    }

    for (const auto& l : j.value("links", json::array())) {
      LinkSpec spec{l.at("router").get<std::string>(),
                    IpAddress::parse(l.at("near_ip").get<std::string>()),
                    l.at("far_router").get<std::string>(),
                    IpAddress::parse(l.at("far_ip").get<std::string>()),
                    std::nullopt, std::nullopt};
      if (l.contains("bandwidth_gbps"))
        spec.bandwidth_gbps = l["bandwidth_gbps"].get<double>();
      if (l.contains("delay")) spec.delay = parse_delay(l["delay"], cfg.delay);
      cfg.links.push_back(std::move(spec));
    }

    std::vector<IxpDirectory::Entry> ixp_entries;
    for (const auto& x : j.value("ixps", json::array())) {
      IxpDirectory::Entry e;
      e.name = x.at("name").get<std::string>();
      for (const auto& p : x.at("prefixes"))
        e.prefixes.push_back(parse_prefix(p.get<std::string>()));
      ixp_entries.push_back(std::move(e));
    }
    cfg.ixps = IxpDirectory(std::move(ixp_entries));

    for (const auto& c : j.value("cases", json::array())) {
      PlantedCaseSpec spec;
      spec.router = c.at("router").get<std::string>();
      spec.far_as = Asn(c.at("far_as").get<uint32_t>());
      spec.prefix = parse_prefix(c.at("prefix").get<std::string>());
      for (const auto& f : c.at("far_ips"))
        spec.far_ips.push_back(IpAddress::parse(f.get<std::string>()));
      auto kind = parse_faras_kind(c.value("pattern", "parallel"));
      if (!kind) throw ConfigError("unknown farside pattern in case for " +
                                   spec.prefix.str());
      spec.pattern = *kind;
      cfg.cases.push_back(std::move(spec));
    }

    for (const auto& d : j.value("decoys", json::array())) {
      DecoySpec spec{d.at("router").get<std::string>(),
                     Asn(d.at("far_as").get<uint32_t>()),
                     parse_prefix(d.at("prefix").get<std::string>()),
                     DecoyKind::UnequalMed};
      std::string kind = d.value("kind", "unequal-med");
      if (kind == "unequal-med") spec.kind = DecoyKind::UnequalMed;
      else if (kind == "ibgp-pair") spec.kind = DecoyKind::IbgpPair;
      else throw ConfigError("unknown decoy kind '" + kind + "'");
      cfg.decoys.push_back(std::move(spec));
    }

    for (const auto& p : j.value("probes", json::array())) {
      ProbeSource probe{IpAddress::parse(p.at("ip").get<std::string>()),
                        Asn(p.at("asn").get<uint32_t>()), {}, {}};
      for (const auto& [router, idx] : p.value("ingress", json::object()).items())
        probe.ingress_iface.emplace(router, idx.get<int>());
      for (const auto& [prefix, router] : p.value("egress", json::object()).items())
        probe.egress_router.emplace(parse_prefix(prefix),
                                    router.get<std::string>());
      cfg.probes.push_back(std::move(probe));
    }

    if (j.contains("delay")) cfg.delay = parse_delay(j["delay"], DelayParams{});
    for (const auto& u : j.value("unreachable", json::array()))
      cfg.unreachable.insert(IpAddress::parse(u.get<std::string>()));
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config value error: ") + e.what());
  }
}

TopologyConfig TopologyConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

std::string TopologyConfig::to_json_text() const {
  json j;
  j["near_as"] = near_as.number();
  j["seed"] = seed;
  j["intra_hops"] = intra_hops;
  j["base_epoch"] = base_epoch;
  j["tick_seconds"] = tick_seconds;
  j["ases"] = json::array();
  for (const auto& [asn, spec] : ases) {
    json a{{"asn", asn.number()}, {"role", role_name(spec.role)}};
    a["prefixes"] = json::array();
    for (const auto& p : spec.announced) a["prefixes"].push_back(p.str());
    j["ases"].push_back(std::move(a));
  }
  j["routers"] = json::array();
  for (const auto& r : routers) {
    json rj{{"name", r.id.name()},
            {"owner", r.id.owner().number()},
            {"ecmp", r.ecmp_supported},
            {"max_paths", r.max_paths},
            {"algorithm", ecmp_algorithm_name(r.policy.algorithm)},
            {"salt", r.policy.router_salt}};
    rj["interfaces"] = json::array();
    for (const auto& iface : r.interfaces) rj["interfaces"].push_back(iface.str());
    j["routers"].push_back(std::move(rj));
  }
  j["links"] = json::array();
  for (const auto& l : links) {
    json lj{{"router", l.router},
            {"near_ip", l.near_ip.str()},
            {"far_router", l.far_router},
            {"far_ip", l.far_ip.str()}};
    if (l.bandwidth_gbps) lj["bandwidth_gbps"] = *l.bandwidth_gbps;
    if (l.delay) lj["delay"] = delay_to_json(*l.delay);
    j["links"].push_back(std::move(lj));
  }
  j["ixps"] = json::array();
  for (const auto& e : ixps.entries()) {
    json ej{{"name", e.name}};
    ej["prefixes"] = json::array();
    for (const auto& p : e.prefixes) ej["prefixes"].push_back(p.str());
    j["ixps"].push_back(std::move(ej));
  }
  j["cases"] = json::array();
  for (const auto& c : cases) {
    json cj{{"router", c.router},
            {"far_as", c.far_as.number()},
            {"prefix", c.prefix.str()},
            {"pattern", faras_kind_name(c.pattern)}};
    cj["far_ips"] = json::array();
    for (const auto& f : c.far_ips) cj["far_ips"].push_back(f.str());
    j["cases"].push_back(std::move(cj));
  }
  j["decoys"] = json::array();
  for (const auto& d : decoys)
    j["decoys"].push_back(
        json{{"router", d.router},
             {"far_as", d.far_as.number()},
             {"prefix", d.prefix.str()},
             {"kind", d.kind == DecoyKind::UnequalMed ? "unequal-med"
                                                      : "ibgp-pair"}});
  j["probes"] = json::array();
  for (const auto& p : probes) {
    json pj{{"ip", p.ip.str()}, {"asn", p.asn.number()}};
    pj["ingress"] = json::object();
    for (const auto& [router, idx] : p.ingress_iface) pj["ingress"][router] = idx;
    pj["egress"] = json::object();
    for (const auto& [prefix, router] : p.egress_router)
      pj["egress"][prefix.str()] = router;
    j["probes"].push_back(std::move(pj));
  }
  j["delay"] = delay_to_json(delay);
  j["unreachable"] = json::array();
  for (const auto& u : unreachable) j["unreachable"].push_back(u.str());
  return j.dump(2) + "\n";
}

std::string trace_to_json_line(const TraceRecord& trace) {
  json j;
  j["timestamp"] = trace.probe.time;
  j["src"] = trace.probe.src.str();
  j["dst"] = trace.probe.dst.str();
  j["proto"] = protocol_name(trace.probe.protocol);
  j["paris_id"] = trace.probe.paris_variation > 0
                      ? static_cast<int>(trace.probe.time %
                                         trace.probe.paris_variation)
                      : 0;
  j["hops"] = json::array();
  for (const auto& h : trace.hops) {
    json hj{{"ttl", h.ttl}};
    if (h.responder) hj["ip"] = h.responder->str();
    else hj["ip"] = nullptr;
    hj["rtts"] = h.rtt_ms;
    j["hops"].push_back(std::move(hj));
  }
  return j.dump();
}

TraceRecord trace_from_json_line(const std::string& line) {
  json j = json::parse(line);
  TraceRecord rec;
  rec.probe.time = j.at("timestamp").get<int64_t>();
  rec.probe.src = IpAddress::parse(j.at("src").get<std::string>());
  rec.probe.dst = IpAddress::parse(j.at("dst").get<std::string>());
  std::string proto = j.at("proto").get<std::string>();
  rec.probe.protocol = proto == "UDP"    ? Protocol::Udp
                       : proto == "TCP"  ? Protocol::Tcp
                                         : Protocol::Icmp;
  for (const auto& hj : j.at("hops")) {
    Hop hop;
    hop.ttl = hj.at("ttl").get<int>();
    if (!hj.at("ip").is_null())
      hop.responder = IpAddress::parse(hj["ip"].get<std::string>());
    for (const auto& r : hj.value("rtts", json::array()))
      hop.rtt_ms.push_back(r.get<double>());
    rec.hops.push_back(std::move(hop));
  }
  rec.probe.packets_per_hop =
      rec.hops.empty() ? 3 : std::max<int>(1, static_cast<int>(rec.hops.front().rtt_ms.size()));
  return rec;
}

}  // namespace bgpm
