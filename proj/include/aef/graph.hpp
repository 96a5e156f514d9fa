#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "aef/error.hpp"

namespace aef {

using NodeId = std::uint32_t;

struct AirportRecord {
  std::string iata;
  std::string icao;  // empty when unknown
  std::string name;
  std::string city;
  std::string country;
  double latitude = 0.0;
  double longitude = 0.0;

  friend bool operator==(const AirportRecord&, const AirportRecord&) = default;
};

struct WeightedEdge {
  NodeId u = 0;
  NodeId v = 0;
  double weight = 0.0;
};

// Immutable undirected weighted graph of airports.
//
// Nodes are ordered by IATA code, adjacency is stored in compressed rows with
// neighbours sorted by id. Every edge weight is strictly positive; there are no
// self-loops and no parallel edges.
class WanGraph {
 public:
  WanGraph() = default;

  // Builds a graph from airport records and an edge list that refers to
  // positions in `airports`. Nodes are re-indexed by IATA order. Throws
  // aef::Error on self-loops, parallel edges, non-positive weights, duplicate
  // IATA codes or out-of-range endpoints.
  static WanGraph from_edges(std::vector<AirportRecord> airports, std::span<const WeightedEdge> edges) {
    const std::size_t n = airports.size();
    std::vector<NodeId> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<NodeId>(i);
    std::sort(order.begin(), order.end(),
              [&](NodeId a, NodeId b) { return airports[a].iata < airports[b].iata; });
    std::vector<NodeId> remap(n);
    for (std::size_t i = 0; i < n; ++i) remap[order[i]] = static_cast<NodeId>(i);

    WanGraph g;
    g.airports_.reserve(n);
    for (NodeId old : order) g.airports_.push_back(std::move(airports[old]));
    for (std::size_t i = 0; i < n; ++i) {
      auto [it, inserted] = g.index_.emplace(g.airports_[i].iata, static_cast<NodeId>(i));
      if (!inserted) throw Error("duplicate IATA code '" + g.airports_[i].iata + "'");
    }

    std::vector<std::size_t> degree(n, 0);
    for (const auto& e : edges) {
      if (e.u >= n || e.v >= n) throw Error("edge endpoint out of range");
      if (e.u == e.v) throw Error("self-loop at " + g.airports_[remap[e.u]].iata);
      if (!(e.weight > 0.0) || !std::isfinite(e.weight))
        throw Error("non-positive edge weight between " + g.airports_[remap[e.u]].iata + " and " +
                    g.airports_[remap[e.v]].iata);
      ++degree[remap[e.u]];
      ++degree[remap[e.v]];
    }
    g.offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] = g.offsets_[i] + degree[i];
    g.targets_.resize(g.offsets_[n]);
    g.weights_.resize(g.offsets_[n]);
    std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const auto& e : edges) {
      const NodeId u = remap[e.u];
      const NodeId v = remap[e.v];
      g.targets_[fill[u]] = v;
      g.weights_[fill[u]++] = e.weight;
      g.targets_[fill[v]] = u;
      g.weights_[fill[v]++] = e.weight;
    }
    g.strength_.assign(n, 0.0);
    std::vector<std::pair<NodeId, double>> row;
    for (std::size_t i = 0; i < n; ++i) {
      row.clear();
      for (std::size_t k = g.offsets_[i]; k < g.offsets_[i + 1]; ++k) row.emplace_back(g.targets_[k], g.weights_[k]);
      std::sort(row.begin(), row.end());
      for (std::size_t k = 1; k < row.size(); ++k) {
        if (row[k].first == row[k - 1].first)
          throw Error("parallel edge between " + g.airports_[i].iata + " and " + g.airports_[row[k].first].iata);
      }
      double s = 0.0;
      for (std::size_t k = 0; k < row.size(); ++k) {
        g.targets_[g.offsets_[i] + k] = row[k].first;
        g.weights_[g.offsets_[i] + k] = row[k].second;
        s += row[k].second;
      }
      g.strength_[i] = s;
    }
    return g;
  }

  std::size_t node_count() const noexcept { return airports_.size(); }
  std::size_t edge_count() const noexcept { return targets_.size() / 2; }
  bool empty() const noexcept { return airports_.empty(); }

  const AirportRecord& airport(NodeId u) const { return airports_.at(u); }
  std::span<const AirportRecord> airports() const noexcept { return airports_; }

  std::optional<NodeId> find(std::string_view iata) const {
    auto it = index_.find(std::string(iata));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::span<const NodeId> neighbors(NodeId u) const noexcept {
    return {targets_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
  }
  std::span<const double> neighbor_weights(NodeId u) const noexcept {
    return {weights_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
  }

  std::size_t degree(NodeId u) const noexcept { return offsets_[u + 1] - offsets_[u]; }
  // Sum of incident edge weights.
  double strength(NodeId u) const noexcept { return strength_[u]; }

  // Weight of edge {u, v}, or 0 when the nodes are not adjacent.
  double weight(NodeId u, NodeId v) const noexcept {
    auto nb = neighbors(u);
    auto it = std::lower_bound(nb.begin(), nb.end(), v);
    if (it == nb.end() || *it != v) return 0.0;
    return weights_[offsets_[u] + static_cast<std::size_t>(it - nb.begin())];
  }

  // Every edge once, with u < v, ordered by (u, v).
  std::vector<WeightedEdge> edges() const {
    std::vector<WeightedEdge> out;
    out.reserve(edge_count());
    for (NodeId u = 0; u < node_count(); ++u) {
      auto nb = neighbors(u);
      auto w = neighbor_weights(u);
      for (std::size_t k = 0; k < nb.size(); ++k)
        if (u < nb[k]) out.push_back({u, nb[k], w[k]});
    }
    return out;
  }

  // Nodes whose airport country equals `country`, in id order.
  std::vector<NodeId> nodes_in_country(std::string_view country) const {
    std::vector<NodeId> out;
    for (NodeId u = 0; u < node_count(); ++u)
      if (airports_[u].country == country) out.push_back(u);
    return out;
  }

  // New graph without the given nodes and their incident edges. Nodes left
  // with no edges are dropped as well, since isolated airports are not part of
  // the network.
  WanGraph without(std::span<const NodeId> removed) const {
    std::vector<char> gone(node_count(), 0);
    for (NodeId r : removed) gone.at(r) = 1;
    std::vector<char> keep(node_count(), 0);
    for (NodeId u = 0; u < node_count(); ++u) {
      if (gone[u]) continue;
      for (NodeId v : neighbors(u))
        if (!gone[v]) {
          keep[u] = 1;
          break;
        }
    }
    std::vector<NodeId> next(node_count(), 0);
    std::vector<AirportRecord> kept;
    for (NodeId u = 0; u < node_count(); ++u)
      if (keep[u]) {
        next[u] = static_cast<NodeId>(kept.size());
        kept.push_back(airports_[u]);
      }
    std::vector<WeightedEdge> es;
    for (const auto& e : edges())
      if (keep[e.u] && keep[e.v]) es.push_back({next[e.u], next[e.v], e.weight});
    return from_edges(std::move(kept), es);
  }

  // Same topology with every weight multiplied by `factor` (> 0).
  WanGraph scaled(double factor) const {
    if (!(factor > 0.0)) throw Error("scale factor must be positive");
    WanGraph g = *this;
    for (double& w : g.weights_) w *= factor;
    for (double& s : g.strength_) s *= factor;
    return g;
  }

 private:
  std::vector<AirportRecord> airports_;
  std::unordered_map<std::string, NodeId> index_;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> targets_;
  std::vector<double> weights_;
  std::vector<double> strength_;
};

// Convenience for tests and synthetic networks: nodes named by code only.
inline AirportRecord make_airport(std::string iata, std::string country = "Nowhere") {
  AirportRecord a;
  a.iata = std::move(iata);
  a.name = a.iata;
  a.city = a.iata;
  a.country = std::move(country);
  return a;
}

}  // namespace aef
