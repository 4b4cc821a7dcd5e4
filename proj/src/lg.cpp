#include "bgpm/lg.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace bgpm {

namespace {

constexpr std::string_view kNoRoutes = "No routes";
constexpr std::string_view kNotExisting = "Router not existing";
constexpr std::string_view kLegend =
    "Status codes: A:AGGREGATE B:BEST D:DAMPED E:EBGP H:HISTORY I:IBGP "
    "L:LABELED M:MULTIPATH S:SUPPRESSED";

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream is{std::string(line)};
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::string strip_trailing_comma(std::string s) {
  while (!s.empty() && (s.back() == ',' || s.back() == ';')) s.pop_back();
  return s;
}

bool is_skippable(std::string_view line) {
  size_t i = line.find_first_not_of(" \t\r");
  return i == std::string_view::npos || line[i] == '#';
}

// Lines of `text` with 1-based numbering, comments and blanks dropped.
std::vector<std::pair<int, std::string>> content_lines(std::string_view text) {
  std::vector<std::pair<int, std::string>> out;
  int n = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    std::string_view line =
        eol == std::string_view::npos ? text.substr(pos) : text.substr(pos, eol - pos);
    ++n;
    if (!is_skippable(line)) {
      std::string s(line);
      while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
      out.emplace_back(n, s);
    }
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return out;
}

uint32_t parse_u32(const std::string& tok, int line, const char* what) {
  try {
    size_t used = 0;
    unsigned long v = std::stoul(tok, &used);
    if (used != tok.size() || v > 0xffffffffUL) throw std::invalid_argument("");
    return static_cast<uint32_t>(v);
  } catch (...) {
    throw LgParseError(line, std::string("bad ") + what + ": '" + tok + "'");
  }
}

int parse_int(const std::string& tok, int line, const char* what) {
  try {
    size_t used = 0;
    int v = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw LgParseError(line, std::string("bad ") + what + ": '" + tok + "'");
  }
}

IpAddress parse_ip(const std::string& tok, int line, const char* what) {
  auto ip = IpAddress::try_parse(tok);
  if (!ip) throw LgParseError(line, std::string("bad ") + what + ": '" + tok + "'");
  return *ip;
}

std::string render_flags(const RouteEntry& r) {
  std::string s;
  if (r.flags & kFlagBest) s += 'B';
  if (r.flags & kFlagMultipath) s += 'M';
  s += r.learned_via == LearnedVia::Ebgp ? 'E' : 'I';
  if (r.flags & kFlagLabeled) s += 'L';
  return s;
}

}  // namespace

std::string render_duration(int64_t seconds) {
  if (seconds < 0) seconds = 0;
  int64_t minutes = seconds / 60;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%lldd%02lldh%02lldm",
                static_cast<long long>(minutes / (24 * 60)),
                static_cast<long long>(minutes / 60 % 24),
                static_cast<long long>(minutes % 60));
  return buf;
}

int64_t parse_duration(std::string_view text) {
  int64_t days = 0, hours = 0, mins = 0;
  int64_t* slots[3] = {&days, &hours, &mins};
  const char units[3] = {'d', 'h', 'm'};
  size_t pos = 0;
  for (int part = 0; part < 3; ++part) {
    size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == start || pos >= text.size() || text[pos] != units[part])
      throw std::invalid_argument("bad duration: " + std::string(text));
    *slots[part] = std::stoll(std::string(text.substr(start, pos - start)));
    ++pos;
  }
  if (pos != text.size())
    throw std::invalid_argument("bad duration: " + std::string(text));
  return ((days * 24 + hours) * 60 + mins) * 60;
}

std::string render_summary(const LgView& view) {
  if (!view.exists) return std::string(kNotExisting) + "\n";
  std::ostringstream os;
  os << "BGP summary, router " << view.router_name << ", local AS "
     << view.local_as << "\n";
  char line[160];
  std::snprintf(line, sizeof(line), "%-40s %s %11s %12s  %s", "Neighbor", "V",
                "AS", "Up/Down", "State");
  os << line << "\n";
  for (const auto& row : view.sessions) {
    std::snprintf(line, sizeof(line), "%-40s %d %11u %12s  %s",
                  row.neighbor_ip.str().c_str(), 4, row.neighbor_as.number(),
                  render_duration(row.uptime_seconds).c_str(),
                  row.state.c_str());
    os << line << "\n";
  }
  return os.str();
}

std::vector<SummaryRow> parse_summary(std::string_view text) {
  auto lines = content_lines(text);
  if (lines.empty()) throw LgParseError(0, "empty summary response");
  size_t i = 0;
  if (lines[i].second.rfind("BGP summary", 0) != 0)
    throw LgParseError(lines[i].first, "missing summary banner");
  ++i;
  if (i >= lines.size() || split_ws(lines[i].second).empty() ||
      split_ws(lines[i].second)[0] != "Neighbor")
    throw LgParseError(i < lines.size() ? lines[i].first : 0,
                       "missing summary header row");
  ++i;
  std::vector<SummaryRow> rows;
  for (; i < lines.size(); ++i) {
    auto [no, line] = lines[i];
    auto toks = split_ws(line);
    if (toks.size() != 5)
      throw LgParseError(no, "expected 5 columns, got " +
                                 std::to_string(toks.size()));
    SummaryRow row{parse_ip(toks[0], no, "neighbor address"),
                   Asn(parse_u32(toks[2], no, "neighbor AS")), toks[4], 0};
    if (toks[1] != "4") throw LgParseError(no, "bad BGP version: '" + toks[1] + "'");
    try {
      row.uptime_seconds = parse_duration(toks[3]);
    } catch (const std::invalid_argument& e) {
      throw LgParseError(no, e.what());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string render_routes_detail(const LgView& view, const IpAddress& dst) {
  if (!view.exists) return std::string(kNotExisting) + "\n";
  const MultipathGroup* group = view.table.lookup(dst);
  if (!group) return std::string(kNoRoutes) + "\n";
  std::ostringstream os;
  os << "Number of BGP Routes matching display condition : "
     << group->members.size() << "\n";
  os << kLegend << "\n";
  int idx = 0;
  char buf[64];
  for (const auto& r : group->members) {
    std::snprintf(buf, sizeof(buf), "%-8d", ++idx);
    os << buf << "Prefix: " << r.dst_prefix.str() << ",  Status: "
       << render_flags(r) << ",  Age: " << render_duration(r.age_seconds)
       << "\n";
    uint32_t peer_as = r.as_path.empty() ? view.local_as
                                         : r.as_path.front().number();
    os << "        NEXT_HOP: " << r.next_hop.str()
       << ", Learned from Peer: " << r.peer_router_id.str() << " (" << peer_as
       << ")\n";
    os << "        LOCAL_PREF: " << r.local_pref << ",  MED: " << r.med
       << ",  ORIGIN: " << origin_name(r.origin) << ",  Metric: "
       << r.igp_metric << "\n";
    os << "        AS_PATH:";
    for (const auto& asn : r.as_path) os << ' ' << asn.number();
    os << "\n";
  }
  return os.str();
}

bool is_no_routes(std::string_view response) {
  for (auto& [no, line] : content_lines(response)) {
    (void)no;
    return line == kNoRoutes;
  }
  return false;
}

bool is_router_not_existing(std::string_view response) {
  for (auto& [no, line] : content_lines(response)) {
    (void)no;
    return line == kNotExisting;
  }
  return false;
}

std::vector<ParsedRoute> parse_routes_detail(std::string_view text) {
  auto lines = content_lines(text);
  if (lines.empty()) throw LgParseError(0, "empty routes response");
  if (lines[0].second == kNoRoutes || lines[0].second == kNotExisting)
    return {};
  size_t i = 0;
  if (lines[i].second.rfind("Number of BGP Routes", 0) != 0)
    throw LgParseError(lines[i].first, "missing route count banner");
  ++i;
  if (i < lines.size() && lines[i].second.rfind("Status codes:", 0) == 0) ++i;

  std::vector<ParsedRoute> out;
  while (i < lines.size()) {
    if (lines.size() - i < 4)
      throw LgParseError(lines[i].first, "truncated route block");
    auto [no1, l1] = lines[i];
    auto [no2, l2] = lines[i + 1];
    auto [no3, l3] = lines[i + 2];
    auto [no4, l4] = lines[i + 3];
    i += 4;

    ParsedRoute pr{RouteEntry{Prefix(IpAddress::from_v4({0, 0, 0, 0}), 0),
                              IpAddress::from_v4({0, 0, 0, 0}),
                              100,
                              {},
                              Origin::Igp,
                              0,
                              LearnedVia::Ebgp,
                              0,
                              IpAddress::from_v4({0, 0, 0, 0}),
                              0,
                              0},
                   "", 0, true};

    // "<n>  Prefix: <p>,  Status: <flags>,  Age: <DdHhMm>"
    auto t1 = split_ws(l1);
    if (t1.size() != 7 || t1[1] != "Prefix:" || t1[3] != "Status:" ||
        t1[5] != "Age:")
      throw LgParseError(no1, "malformed route status line");
    auto prefix = try_parse_prefix(strip_trailing_comma(t1[2]));
    if (!prefix) throw LgParseError(no1, "bad prefix: '" + t1[2] + "'");
    pr.entry.dst_prefix = *prefix;
    pr.raw_flags = strip_trailing_comma(t1[4]);
    bool saw_via = false;
    for (char c : pr.raw_flags) {
      switch (c) {
        case 'B': pr.entry.flags |= kFlagBest; break;
        case 'M': pr.entry.flags |= kFlagMultipath; break;
        case 'E': pr.entry.flags |= kFlagEbgp;
                  pr.entry.learned_via = LearnedVia::Ebgp; saw_via = true; break;
        case 'I': pr.entry.learned_via = LearnedVia::Ibgp; saw_via = true; break;
        case 'L': pr.entry.flags |= kFlagLabeled; break;
        case 'A': case 'D': case 'H': case 'S': break;  // preserved, uninterpreted
        default:
          throw LgParseError(no1, std::string("unknown flag character '") + c + "'");
      }
    }
    if (!saw_via) throw LgParseError(no1, "status lacks E/I origin-of-learning");
    try {
      pr.last_update_age = parse_duration(t1[6]);
      pr.entry.age_seconds = pr.last_update_age;
    } catch (const std::invalid_argument& e) {
      throw LgParseError(no1, e.what());
    }

    // "NEXT_HOP: <ip>, Learned from Peer: <ip> (<asn>)"
    auto t2 = split_ws(l2);
    if (t2.size() != 7 || t2[0] != "NEXT_HOP:" || t2[4] != "Peer:" ||
        t2[6].size() < 3 || t2[6].front() != '(' || t2[6].back() != ')')
      throw LgParseError(no2, "malformed next-hop line");
    pr.entry.next_hop = parse_ip(strip_trailing_comma(t2[1]), no2, "next hop");
    pr.entry.peer_router_id = parse_ip(t2[5], no2, "peer router id");

    // "LOCAL_PREF: <n>,  MED: <n>,  ORIGIN: <o>,  Metric: <n>"
    auto t3 = split_ws(l3);
    if (t3.size() != 8 || t3[0] != "LOCAL_PREF:" || t3[2] != "MED:" ||
        t3[4] != "ORIGIN:" || t3[6] != "Metric:")
      throw LgParseError(no3, "malformed attribute line");
    pr.entry.local_pref = parse_int(strip_trailing_comma(t3[1]), no3, "local pref");
    pr.entry.med = parse_int(strip_trailing_comma(t3[3]), no3, "MED");
    std::string origin = strip_trailing_comma(t3[5]);
    std::transform(origin.begin(), origin.end(), origin.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (origin == "igp") pr.entry.origin = Origin::Igp;
    else if (origin == "egp") pr.entry.origin = Origin::Egp;
    else if (origin == "incomplete") pr.entry.origin = Origin::Incomplete;
    else throw LgParseError(no3, "bad origin: '" + t3[5] + "'");
    pr.entry.igp_metric = parse_int(t3[7], no3, "metric");

    // "AS_PATH: a b c"
    auto t4 = split_ws(l4);
    if (t4.empty() || t4[0] != "AS_PATH:")
      throw LgParseError(no4, "malformed AS path line");
    for (size_t k = 1; k < t4.size(); ++k)
      pr.entry.as_path.emplace_back(parse_u32(t4[k], no4, "AS path hop"));
    if (pr.entry.learned_via == LearnedVia::Ebgp && pr.entry.as_path.empty())
      throw LgParseError(no4, "eBGP route with empty AS path");

    out.push_back(std::move(pr));
  }
  return out;
}

std::optional<BgpmEvidence> detect_multipath(
    const std::vector<ParsedRoute>& routes) {
  std::vector<const ParsedRoute*> cand;
  for (const auto& r : routes)
    if ((r.entry.flags & kFlagMultipath) && (r.entry.flags & kFlagEbgp) &&
        !r.entry.as_path.empty())
      cand.push_back(&r);
  if (cand.size() < 2) return std::nullopt;

  // Partition the M+E routes into first-six equality classes and look for a
  // class reaching two distinct next hops from one neighbor AS.
  std::vector<std::vector<const ParsedRoute*>> classes;
  for (auto* r : cand) {
    bool placed = false;
    for (auto& cls : classes)
      if (equal_on_first_six(cls.front()->entry, r->entry) &&
          cls.front()->entry.as_path.front() == r->entry.as_path.front()) {
        cls.push_back(r);
        placed = true;
        break;
      }
    if (!placed) classes.push_back({r});
  }

  const std::vector<const ParsedRoute*>* winner = nullptr;
  for (const auto& cls : classes) {
    std::vector<IpAddress> hops;
    for (auto* r : cls) hops.push_back(r->entry.next_hop);
    std::sort(hops.begin(), hops.end());
    hops.erase(std::unique(hops.begin(), hops.end()), hops.end());
    if (hops.size() >= 2 && (!winner || cls.size() > winner->size()))
      winner = &cls;
  }

  std::vector<IpAddress> all_hops;
  for (auto* r : cand) all_hops.push_back(r->entry.next_hop);
  std::sort(all_hops.begin(), all_hops.end());
  all_hops.erase(std::unique(all_hops.begin(), all_hops.end()), all_hops.end());
  if (all_hops.size() < 2) return std::nullopt;

  if (!winner) {
    // Multiple M+E routes over distinct links, but not attribute-equal.
    return BgpmEvidence{cand.front()->entry.dst_prefix,
                        cand.front()->entry.as_path.front(), all_hops, false};
  }
  std::vector<IpAddress> hops;
  for (auto* r : *winner) hops.push_back(r->entry.next_hop);
  std::sort(hops.begin(), hops.end());
  hops.erase(std::unique(hops.begin(), hops.end()), hops.end());
  return BgpmEvidence{winner->front()->entry.dst_prefix,
                      winner->front()->entry.as_path.front(), hops, true};
}

std::string MemoryLgSource::routes(const RouterId& router,
                                   const IpAddress& target) {
  auto it = route_texts.find(router.name() + "|" + target.str());
  if (it != route_texts.end()) return it->second;
  if (summaries.count(router.name())) return "No routes\n";
  for (const auto& [key, _] : route_texts)
    if (key.rfind(router.name() + "|", 0) == 0) return "No routes\n";
  return "Router not existing\n";
}

std::optional<std::string> MemoryLgSource::summary(const RouterId& router) {
  auto it = summaries.find(router.name());
  if (it == summaries.end()) return std::nullopt;
  return it->second;
}

}  // namespace bgpm
