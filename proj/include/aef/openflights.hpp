#pragma once

// Ingestion of OpenFlights-style airports/routes tables and construction of
// the seat-weighted airline network.

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "aef/error.hpp"
#include "aef/graph.hpp"

namespace aef {

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline bool is_null_marker(std::string_view s) { return s.empty() || s == "\\N"; }

inline std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace detail

// Splits one line of comma-separated text. Double-quoted fields may contain
// commas; inside quotes both `""` and `\"` stand for a literal quote.
// Throws ParseError on an unterminated quote.
inline std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no = 0) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '\\' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"' && !quoted && detail::trim(cur).empty()) {
      cur.clear();
      quoted = true;
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(quoted ? cur : std::string(detail::trim(cur)));
      cur.clear();
      quoted = false;
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  if (in_quotes) throw ParseError(line_no, "unterminated quoted field");
  fields.push_back(quoted ? cur : std::string(detail::trim(cur)));
  return fields;
}

struct AirportTable {
  std::vector<AirportRecord> records;
  std::size_t skipped_placeholder = 0;    // lines without a usable IATA code
  std::vector<std::string> diagnostics;   // rejected lines, with line numbers

  std::optional<std::size_t> find_iata(std::string_view code) const {
    auto it = by_iata_.find(std::string(code));
    if (it == by_iata_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<std::size_t> find_icao(std::string_view code) const {
    auto it = by_icao_.find(std::string(code));
    if (it == by_icao_.end()) return std::nullopt;
    return it->second;
  }

  // Index a record; returns false (and leaves the table unchanged) on a
  // duplicate IATA code.
  bool add(AirportRecord rec) {
    if (by_iata_.count(rec.iata)) return false;
    by_iata_.emplace(rec.iata, records.size());
    if (!rec.icao.empty()) by_icao_.emplace(rec.icao, records.size());
    records.push_back(std::move(rec));
    return true;
  }

 private:
  std::unordered_map<std::string, std::size_t> by_iata_;
  std::unordered_map<std::string, std::size_t> by_icao_;
};

inline bool is_iata_code(std::string_view s) {
  return s.size() == 3 && std::all_of(s.begin(), s.end(), [](char c) {
           return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
         });
}

// Parses OpenFlights airports.dat. Fields used: name (2), city (3),
// country (4), IATA (5), ICAO (6), latitude (7), longitude (8). Older 12-field
// releases are accepted as well as the 14-field layout.
inline AirportTable parse_airports(std::istream& in) {
  AirportTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    std::vector<std::string> f;
    try {
      f = split_csv_line(line, line_no);
    } catch (const ParseError& e) {
      table.diagnostics.push_back(e.what());
      continue;
    }
    if (f.size() < 8) {
      table.diagnostics.push_back(ParseError(line_no, "expected at least 8 fields, got " + std::to_string(f.size())).what());
      continue;
    }
    if (detail::is_null_marker(f[4])) {
      ++table.skipped_placeholder;
      continue;
    }
    if (!is_iata_code(f[4])) {
      table.diagnostics.push_back(ParseError(line_no, "invalid IATA code '" + f[4] + "'").what());
      continue;
    }
    auto lat = detail::to_double(f[6]);
    auto lon = detail::to_double(f[7]);
    if (!lat || !lon) {
      table.diagnostics.push_back(ParseError(line_no, "unreadable coordinates").what());
      continue;
    }
    if (*lat < -90.0 || *lat > 90.0) {
      table.diagnostics.push_back(ParseError(line_no, "latitude " + f[6] + " outside [-90, 90]").what());
      continue;
    }
    if (*lon < -180.0 || *lon > 180.0) {
      table.diagnostics.push_back(ParseError(line_no, "longitude " + f[7] + " outside [-180, 180]").what());
      continue;
    }
    AirportRecord rec;
    rec.name = f[1];
    rec.city = f[2];
    rec.country = f[3];
    rec.iata = f[4];
    rec.icao = detail::is_null_marker(f[5]) ? std::string() : f[5];
    rec.latitude = *lat;
    rec.longitude = *lon;
    if (!table.add(std::move(rec)))
      table.diagnostics.push_back(ParseError(line_no, "duplicate IATA code '" + f[4] + "'").what());
  }
  if (table.records.empty()) throw Error("no airports with IATA codes found");
  return table;
}

inline AirportTable parse_airports(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_airports(in);
}

struct RouteRecord {
  std::string source_iata;
  std::string destination_iata;
  std::vector<std::string> aircraft_codes;

  friend bool operator==(const RouteRecord&, const RouteRecord&) = default;
};

struct RouteTable {
  std::vector<RouteRecord> records;
  std::size_t dropped_unresolved = 0;
  std::size_t dropped_self_loop = 0;
  std::vector<std::string> diagnostics;
};

// Parses OpenFlights routes.dat against an airport table. Endpoints (fields 3
// and 5) are resolved by IATA code, falling back to ICAO; routes with an
// unresolvable endpoint are dropped and counted.
inline RouteTable parse_routes(std::istream& in, const AirportTable& airports) {
  RouteTable table;
  std::string line;
  std::size_t line_no = 0;
  auto resolve = [&](const std::string& code) -> std::optional<std::string> {
    if (auto i = airports.find_iata(code)) return airports.records[*i].iata;
    if (code.size() == 4)
      if (auto i = airports.find_icao(code)) return airports.records[*i].iata;
    return std::nullopt;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    std::vector<std::string> f;
    try {
      f = split_csv_line(line, line_no);
    } catch (const ParseError& e) {
      table.diagnostics.push_back(e.what());
      continue;
    }
    if (f.size() < 9) {
      table.diagnostics.push_back(ParseError(line_no, "expected 9 fields, got " + std::to_string(f.size())).what());
      continue;
    }
    auto src = resolve(f[2]);
    auto dst = resolve(f[4]);
    if (!src || !dst) {
      ++table.dropped_unresolved;
      table.diagnostics.push_back(
          ParseError(line_no, "unresolvable endpoint '" + (src ? f[4] : f[2]) + "'").what());
      continue;
    }
    if (*src == *dst) {
      ++table.dropped_self_loop;
      table.diagnostics.push_back(ParseError(line_no, "route from " + *src + " to itself").what());
      continue;
    }
    RouteRecord r;
    r.source_iata = *src;
    r.destination_iata = *dst;
    std::istringstream eq(f[8]);
    std::string code;
    while (eq >> code)
      if (code != "\\N") r.aircraft_codes.push_back(code);
    table.records.push_back(std::move(r));
  }
  return table;
}

inline RouteTable parse_routes(std::string_view text, const AirportTable& airports) {
  std::istringstream in{std::string(text)};
  return parse_routes(in, airports);
}

// Seats per IATA aircraft code, with a fallback capacity for unknown codes.
class SeatTable {
 public:
  static constexpr double kDefaultCapacity = 150.0;

  SeatTable() = default;
  explicit SeatTable(std::map<std::string, int> seats, double default_capacity = kDefaultCapacity)
      : seats_(std::move(seats)), default_capacity_(default_capacity) {
    if (!(default_capacity_ > 0.0)) throw Error("default seat capacity must be positive");
    for (const auto& [code, n] : seats_)
      if (n <= 0) throw Error("non-positive seat capacity for aircraft code '" + code + "'");
  }

  // Tab-separated `code<TAB>seats`, '#' starts a comment line.
  static SeatTable parse(std::istream& in, double default_capacity = kDefaultCapacity) {
    std::map<std::string, int> seats;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      auto t = detail::trim(line);
      if (t.empty() || t.front() == '#') continue;
      auto tab = t.find('\t');
      if (tab == std::string_view::npos) throw ParseError(line_no, "expected code<TAB>seats");
      auto code = detail::trim(t.substr(0, tab));
      auto value = detail::trim(t.substr(tab + 1));
      int n = 0;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
      if (ec != std::errc() || ptr != value.data() + value.size() || n <= 0)
        throw ParseError(line_no, "seat capacity must be a positive integer");
      seats[std::string(code)] = n;
    }
    return SeatTable(std::move(seats), default_capacity);
  }

  static SeatTable parse(std::string_view text, double default_capacity = kDefaultCapacity) {
    std::istringstream in{std::string(text)};
    return parse(in, default_capacity);
  }

  std::optional<int> find(std::string_view code) const {
    auto it = seats_.find(std::string(code));
    if (it == seats_.end()) return std::nullopt;
    return it->second;
  }

  // Entries of `overrides` replace or extend this table.
  SeatTable merged(const SeatTable& overrides) const {
    auto seats = seats_;
    for (const auto& [code, n] : overrides.seats_) seats[code] = n;
    return SeatTable(std::move(seats), default_capacity_);
  }

  double default_capacity() const noexcept { return default_capacity_; }
  std::size_t size() const noexcept { return seats_.size(); }

 private:
  std::map<std::string, int> seats_;
  double default_capacity_ = kDefaultCapacity;
};

// Seats offered by one route: the sum over its aircraft codes. Unknown codes
// count as the default capacity and are appended to `unknown` when given; a
// route without codes counts as one aircraft of default capacity.
inline double resolve_route_weight(const RouteRecord& route, const SeatTable& seats,
                                   std::vector<std::string>* unknown = nullptr) {
  if (route.aircraft_codes.empty()) return seats.default_capacity();
  double total = 0.0;
  for (const auto& code : route.aircraft_codes) {
    if (auto n = seats.find(code)) {
      total += *n;
    } else {
      total += seats.default_capacity();
      if (unknown) unknown->push_back(code);
    }
  }
  return total;
}

struct BuildSummary {
  std::size_t airports_in = 0;
  std::size_t routes_in = 0;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t airports_without_routes = 0;
  std::size_t routes_without_equipment = 0;
  std::map<std::string, std::size_t> unknown_aircraft;  // code -> occurrences
};

// Collapses routes into one undirected edge per airport pair weighted by the
// seats flown in either direction. Airports without routes are left out.
inline WanGraph build_network(const AirportTable& airports, const std::vector<RouteRecord>& routes,
                              const SeatTable& seats, BuildSummary* summary = nullptr) {
  std::map<std::pair<std::size_t, std::size_t>, double> pair_weight;
  std::vector<std::string> unknown;
  std::size_t no_equipment = 0;
  for (const auto& r : routes) {
    auto a = airports.find_iata(r.source_iata);
    auto b = airports.find_iata(r.destination_iata);
    if (!a || !b) throw Error("route " + r.source_iata + "-" + r.destination_iata + " refers to unknown airport");
    if (*a == *b) throw Error("route from " + r.source_iata + " to itself");
    if (r.aircraft_codes.empty()) ++no_equipment;
    pair_weight[std::minmax(*a, *b)] += resolve_route_weight(r, seats, &unknown);
  }
  std::vector<std::size_t> node_of(airports.records.size(), SIZE_MAX);
  std::vector<AirportRecord> nodes;
  auto node = [&](std::size_t i) {
    if (node_of[i] == SIZE_MAX) {
      node_of[i] = nodes.size();
      nodes.push_back(airports.records[i]);
    }
    return static_cast<NodeId>(node_of[i]);
  };
  std::vector<WeightedEdge> edges;
  edges.reserve(pair_weight.size());
  for (const auto& [key, w] : pair_weight) {
    const NodeId u = node(key.first);
    const NodeId v = node(key.second);
    edges.push_back({u, v, w});
  }
  if (edges.empty()) throw Error("network has no edges");
  if (summary) {
    summary->airports_in = airports.records.size();
    summary->routes_in = routes.size();
    summary->nodes = nodes.size();
    summary->edges = edges.size();
    summary->airports_without_routes = airports.records.size() - nodes.size();
    summary->routes_without_equipment = no_equipment;
    summary->unknown_aircraft.clear();
    for (const auto& c : unknown) ++summary->unknown_aircraft[c];
  }
  return WanGraph::from_edges(std::move(nodes), edges);
}

}  // namespace aef
