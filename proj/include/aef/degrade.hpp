#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "aef/error.hpp"
#include "aef/graph.hpp"
#include "aef/random.hpp"

namespace aef {

enum class RemovalScheme { Uniform, DegreeWeighted, AefWeighted };

inline const char* to_string(RemovalScheme s) {
  switch (s) {
    case RemovalScheme::Uniform: return "uniform";
    case RemovalScheme::DegreeWeighted: return "degree";
    case RemovalScheme::AefWeighted: return "aef";
  }
  return "?";
}

inline RemovalScheme parse_removal_scheme(const std::string& s) {
  if (s == "uniform") return RemovalScheme::Uniform;
  if (s == "degree" || s == "degree-weighted") return RemovalScheme::DegreeWeighted;
  if (s == "aef" || s == "aef-weighted") return RemovalScheme::AefWeighted;
  throw Error("unknown removal scheme '" + s + "'");
}

// ceil(fraction * subset_size), robust to representation error in `fraction`.
inline std::size_t removal_count(double fraction, std::size_t subset_size) {
  return static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(subset_size) - 1e-9));
}

// Draws `count` distinct entries of `candidates` with probability proportional
// to `weights` (successive sampling without replacement). When every remaining
// weight is zero the rest are drawn uniformly.
inline std::vector<NodeId> weighted_sample_without_replacement(std::span<const NodeId> candidates,
                                                               std::span<const double> weights, std::size_t count,
                                                               Rng& rng) {
  if (candidates.size() != weights.size()) throw Error("candidate and weight lists differ in length");
  if (count > candidates.size()) throw Error("cannot draw more items than candidates");
  std::vector<NodeId> pool(candidates.begin(), candidates.end());
  std::vector<double> w(weights.begin(), weights.end());
  for (double x : w)
    if (!(x >= 0.0)) throw Error("sampling weights must be non-negative");
  std::vector<NodeId> picked;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t k = 0; k < count; ++k) {
    double total = 0.0;
    for (double x : w) total += x;
    std::size_t chosen = pool.size() - 1;
    if (total > 0.0) {
      double target = unit(rng) * total;
      for (std::size_t i = 0; i < pool.size(); ++i) {
        if (w[i] <= 0.0) continue;
        chosen = i;
        if (target < w[i]) break;
        target -= w[i];
      }
    } else {
      chosen = std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng);
    }
    picked.push_back(pool[chosen]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(chosen));
    w.erase(w.begin() + static_cast<std::ptrdiff_t>(chosen));
  }
  return picked;
}

struct DegradedNetwork {
  WanGraph graph;
  std::vector<NodeId> removed;  // ids in the original graph
};

// Removes ceil(fraction * |subset|) airports of `subset` with their edges.
// Selection is uniform, proportional to degree, or proportional to
// `aef_weights` (indexed by node id of `graph`, required for the AEF scheme).
// Fraction 0 returns an unchanged copy.
inline DegradedNetwork degrade_network(const WanGraph& graph, std::span<const NodeId> subset, double fraction,
                                       RemovalScheme scheme, Rng& rng, std::span<const double> aef_weights = {}) {
  if (subset.empty()) throw Error("degradation subset is empty");
  if (!(fraction >= 0.0 && fraction < 1.0)) throw Error("removal fraction must lie in [0, 1)");
  const std::size_t count = removal_count(fraction, subset.size());
  if (count > subset.size()) throw Error("subset smaller than removal count");
  if (count == 0) return {graph, {}};
  std::vector<double> w(subset.size(), 1.0);
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (subset[i] >= graph.node_count()) throw Error("subset node out of range");
    if (scheme == RemovalScheme::DegreeWeighted) w[i] = static_cast<double>(graph.degree(subset[i]));
    if (scheme == RemovalScheme::AefWeighted) {
      if (aef_weights.size() != graph.node_count()) throw Error("AEF-weighted removal needs one score per node");
      w[i] = aef_weights[subset[i]];
    }
  }
  auto removed = weighted_sample_without_replacement(subset, w, count, rng);
  return {graph.without(removed), std::move(removed)};
}

}  // namespace aef
