#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bgpm/bgp.hpp"
#include "bgpm/core.hpp"

// Rendering and parsing of the route-server responses this toolkit speaks:
// the `summary` neighbor table and the `routes detail` per-prefix output.
// The exact column geometry is documented in docs/formats.md; parsers are
// token-based and tolerate spacing variants, comment lines and blank lines.

namespace bgpm {

/// One BGP session row of the summary table.
struct SummaryRow {
  IpAddress neighbor_ip;
  Asn neighbor_as;
  std::string state;
  int64_t uptime_seconds = 0;

  friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

/// Immutable router state handed to the renderers; produced by the
/// simulator's lg_snapshot or built directly in tests.
struct LgView {
  bool exists = true;
  std::string router_name;
  uint32_t local_as = 0;
  std::vector<SummaryRow> sessions;
  RoutingTable table;
};

/// One path block parsed back out of a routes-detail response.
struct ParsedRoute {
  RouteEntry entry;
  std::string raw_flags;       // status letters as printed, e.g. "BME"
  int64_t last_update_age = 0; // seconds, normalized from DdHhMm
  // In this dialect the Metric column is the IGP metric; MED is printed
  // separately. Recorded so consumers need not re-derive the mapping.
  bool metric_is_igp = true;

  friend bool operator==(const ParsedRoute&, const ParsedRoute&) = default;
};

/// Ground-truth-grade multipath evidence extracted from one response.
/// Positive evidence (attributes_equal == true) needs >= 2 routes flagged
/// both M and E with distinct next hops and equal first-six attributes.
struct BgpmEvidence {
  Prefix dst_prefix;
  Asn far_as;
  std::vector<IpAddress> next_hops;
  bool attributes_equal = false;

  bool positive() const { return attributes_equal && next_hops.size() >= 2; }
};

struct LgParseError : std::runtime_error {
  LgParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_number(line) {}
  int line_number;
};

/// "10d21h05m" <-> seconds (minute granularity).
std::string render_duration(int64_t seconds);
int64_t parse_duration(std::string_view text);  // throws std::invalid_argument

std::string render_summary(const LgView& view);
std::vector<SummaryRow> parse_summary(std::string_view text);

std::string render_routes_detail(const LgView& view, const IpAddress& dst);
std::vector<ParsedRoute> parse_routes_detail(std::string_view text);

/// Sentinel bodies, also understood by the parsers (both parse to empty).
bool is_no_routes(std::string_view response);
bool is_router_not_existing(std::string_view response);

/// Scans routes parsed for one destination for multipath evidence. Returns
/// nothing when fewer than two M+E routes with distinct next hops exist;
/// returns non-positive evidence (attributes_equal == false) when such
/// routes exist but disagree on the first six attributes. The neighbor AS
/// is the first hop of the AS path.
std::optional<BgpmEvidence> detect_multipath(
    const std::vector<ParsedRoute>& routes);

/// Abstract source of LG responses: the simulator, a fixture directory or
/// an in-memory map. routes() always yields a response body (sentinels
/// included); transport problems raise LgTransportError.
class LgSource {
public:
  virtual ~LgSource() = default;
  virtual std::string routes(const RouterId& router, const IpAddress& target) = 0;
  virtual std::optional<std::string> summary(const RouterId& router) = 0;
  /// Epoch stamped onto discoveries made through this source.
  virtual int64_t epoch() const { return 0; }
};

struct LgTransportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Fixture-style source backed by explicit response maps; keys are
/// router name and "router|target".
class MemoryLgSource : public LgSource {
public:
  std::map<std::string, std::string> summaries;   // router name -> body
  std::map<std::string, std::string> route_texts; // "router|ip" -> body
  int64_t epoch_seconds = 0;

  std::string routes(const RouterId& router, const IpAddress& target) override;
  std::optional<std::string> summary(const RouterId& router) override;
  int64_t epoch() const override { return epoch_seconds; }
};

}  // namespace bgpm
