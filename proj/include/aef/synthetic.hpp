#pragma once

// Airline-like random networks for experiments that cannot use real data:
// growth with preferential attachment, biased towards airports of the same
// region, and seat weights that grow with the endpoints' degrees.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "aef/episim.hpp"
#include "aef/error.hpp"
#include "aef/graph.hpp"
#include "aef/random.hpp"

namespace aef {

struct SyntheticNetworkOptions {
  std::size_t nodes = 200;
  std::size_t regions = kRegionCount;
  double local_fraction = 0.75;  // chance that a new link stays in the node's region
  std::size_t max_links = 3;     // new nodes bring 1..max_links links
  double seat_scale = 60.0;      // seats per sqrt(k_u k_v)
  double seat_noise = 0.4;       // sd of the log-normal weight noise
  std::uint64_t seed = 20150323;
};

struct SyntheticNetwork {
  WanGraph graph;
  RegionTable regions;
};

// Three-letter code for index i: AAA, AAB, ...
inline std::string synthetic_code(std::size_t i) {
  std::string s(3, 'A');
  for (int k = 2; k >= 0; --k) {
    s[static_cast<std::size_t>(k)] = static_cast<char>('A' + i % 26);
    i /= 26;
  }
  return s;
}

inline std::string synthetic_country(std::size_t region) {
  return "Synthetic Region " + std::string(region < 9 ? "0" : "") + std::to_string(region + 1);
}

inline SyntheticNetwork synthetic_airline_network(const SyntheticNetworkOptions& opt = {}) {
  if (opt.nodes < 8) throw Error("synthetic network needs at least 8 nodes");
  if (opt.regions < 1 || opt.regions > kRegionCount) throw Error("region count must lie in 1..16");
  if (opt.max_links < 1) throw Error("max_links must be positive");
  Rng rng = derive_rng(opt.seed, "synthetic-network");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t n = opt.nodes;

  std::vector<std::size_t> region(n);
  for (std::size_t i = 0; i < n; ++i)
    region[i] = i < opt.regions ? i : std::uniform_int_distribution<std::size_t>(0, opt.regions - 1)(rng);

  std::vector<std::set<std::size_t>> adj(n);
  std::vector<std::vector<std::size_t>> by_region(opt.regions);
  auto link = [&](std::size_t a, std::size_t b) {
    adj[a].insert(b);
    adj[b].insert(a);
  };
  // Seed core: the first node of every region, joined in a ring with chords.
  const std::size_t core = opt.regions;
  for (std::size_t i = 0; i < core; ++i) {
    by_region[region[i]].push_back(i);
    if (core > 1) link(i, (i + 1) % core);
    if (core > 3) link(i, (i + core / 2) % core);
  }
  for (std::size_t i = core; i < n; ++i) {
    const std::size_t links = 1 + std::uniform_int_distribution<std::size_t>(0, opt.max_links - 1)(rng);
    for (std::size_t l = 0; l < links; ++l) {
      const bool local = unit(rng) < opt.local_fraction && !by_region[region[i]].empty();
      std::vector<std::size_t> candidates;
      if (local) {
        candidates = by_region[region[i]];
      } else {
        candidates.resize(i);
        for (std::size_t j = 0; j < i; ++j) candidates[j] = j;
      }
      std::erase_if(candidates, [&](std::size_t j) { return adj[i].count(j) > 0; });
      if (candidates.empty()) continue;
      double total = 0.0;
      for (std::size_t j : candidates) total += static_cast<double>(adj[j].size());
      double target = unit(rng) * total;
      std::size_t pick = candidates.back();
      for (std::size_t j : candidates) {
        target -= static_cast<double>(adj[j].size());
        if (target < 0.0) {
          pick = j;
          break;
        }
      }
      link(i, pick);
    }
    by_region[region[i]].push_back(i);
  }

  std::vector<AirportRecord> airports;
  airports.reserve(n);
  for (std::size_t i = 0; i < n; ++i) airports.push_back(make_airport(synthetic_code(i), synthetic_country(region[i])));
  std::lognormal_distribution<double> noise(0.0, opt.seat_noise);
  std::vector<WeightedEdge> edges;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b : adj[a]) {
      if (b < a) continue;
      const double base = opt.seat_scale * std::sqrt(static_cast<double>(adj[a].size() * adj[b].size()));
      edges.push_back({static_cast<NodeId>(a), static_cast<NodeId>(b), base * noise(rng)});
    }
  std::map<std::string, int> table;
  for (std::size_t r = 0; r < opt.regions; ++r) table[synthetic_country(r)] = static_cast<int>(r + 1);
  return {WanGraph::from_edges(std::move(airports), edges), RegionTable(std::move(table))};
}

}  // namespace aef
