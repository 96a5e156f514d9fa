#pragma once

// Graph export: edge-list CSV and a versioned JSON bundle.

#include <cstddef>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "aef/error.hpp"
#include "aef/graph.hpp"

namespace aef {

inline constexpr int kBundleVersion = 1;
inline constexpr const char* kBundleFormat = "aef-wan-bundle";

// `src_iata,dst_iata,weight`, one row per edge with src < dst by node id.
inline void write_edge_list_csv(const WanGraph& g, std::ostream& out) {
  out << "src_iata,dst_iata,weight\n";
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (const auto& e : g.edges()) out << g.airport(e.u).iata << ',' << g.airport(e.v).iata << ',' << e.weight << '\n';
  out.precision(old_precision);
}

inline nlohmann::json to_bundle(const WanGraph& g, const nlohmann::json& metadata = nlohmann::json::object()) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& a : g.airports()) {
    nodes.push_back({{"iata", a.iata},
                     {"icao", a.icao},
                     {"name", a.name},
                     {"city", a.city},
                     {"country", a.country},
                     {"latitude", a.latitude},
                     {"longitude", a.longitude}});
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : g.edges())
    edges.push_back({{"src", g.airport(e.u).iata}, {"dst", g.airport(e.v).iata}, {"weight", e.weight}});
  return {{"format", kBundleFormat},
          {"version", kBundleVersion},
          {"metadata", metadata},
          {"nodes", std::move(nodes)},
          {"edges", std::move(edges)}};
}

inline WanGraph from_bundle(const nlohmann::json& doc) {
  try {
    if (doc.at("format").get<std::string>() != kBundleFormat) throw Error("not a graph bundle");
    const int version = doc.at("version").get<int>();
    if (version != kBundleVersion) throw Error("unsupported bundle version " + std::to_string(version));
    std::vector<AirportRecord> airports;
    std::unordered_map<std::string, NodeId> index;
    for (const auto& n : doc.at("nodes")) {
      AirportRecord a;
      a.iata = n.at("iata").get<std::string>();
      a.icao = n.value("icao", "");
      a.name = n.value("name", "");
      a.city = n.value("city", "");
      a.country = n.value("country", "");
      a.latitude = n.value("latitude", 0.0);
      a.longitude = n.value("longitude", 0.0);
      index.emplace(a.iata, static_cast<NodeId>(airports.size()));
      airports.push_back(std::move(a));
    }
    std::vector<WeightedEdge> edges;
    for (const auto& e : doc.at("edges")) {
      const auto src = e.at("src").get<std::string>();
      const auto dst = e.at("dst").get<std::string>();
      auto s = index.find(src);
      auto d = index.find(dst);
      if (s == index.end() || d == index.end()) throw Error("bundle edge " + src + "-" + dst + " names an unknown node");
      edges.push_back({s->second, d->second, e.at("weight").get<double>()});
    }
    return WanGraph::from_edges(std::move(airports), edges);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed graph bundle: ") + e.what());
  }
}

}  // namespace aef
