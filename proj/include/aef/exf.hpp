#pragma once

// Airport Expected Force.
//
// A transmission pattern is one ordered way the first two infections can
// happen from a seed s: s infects a neighbour a (probability w(s,a) / W(s)),
// then some edge from {s, a} to a susceptible node b transmits (probability
// w(edge) / Omega(s,a), Omega being the total weight of edges leaving {s, a}).
// The pattern's force of infection is the weight of edges leaving the
// infected cluster {s, a, b}. The expected force is the entropy of
// d_j = foi_j * p_j after normalising the d_j to sum to one.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "aef/error.hpp"
#include "aef/graph.hpp"
#include "aef/parallel.hpp"

namespace aef {

struct TransmissionPattern {
  NodeId first_target = 0;     // a
  NodeId second_source = 0;    // seed or a
  NodeId second_target = 0;    // b
  double probability = 0.0;    // p_j
  double cluster_foi = 0.0;    // weight leaving {seed, a, b}
};

// Weight of edges with exactly one endpoint in `cluster`. Duplicate ids are
// ignored.
inline double cluster_foi(const WanGraph& g, std::span<const NodeId> cluster) {
  std::vector<NodeId> members(cluster.begin(), cluster.end());
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  double total = 0.0;
  for (NodeId u : members) {
    if (u >= g.node_count()) throw Error("cluster node out of range");
    auto nb = g.neighbors(u);
    auto w = g.neighbor_weights(u);
    for (std::size_t k = 0; k < nb.size(); ++k)
      if (!std::binary_search(members.begin(), members.end(), nb[k])) total += w[k];
  }
  return total;
}

// Dense per-node scratch reused across seeds; one per worker.
class PatternScratch {
 public:
  explicit PatternScratch(std::size_t n) : seed_w_(n, 0.0), first_w_(n, 0.0) {}

  // Visits every transmission pattern of `seed` as visit(a, x, b, p, foi).
  // Returns the number of patterns visited.
  template <typename Visit>
  std::size_t for_each_pattern(const WanGraph& g, NodeId seed, Visit&& visit) {
    if (seed >= g.node_count()) throw Error("seed out of range");
    if (g.degree(seed) == 0) throw Error("seed " + g.airport(seed).iata + " has no connections");
    const auto s_nb = g.neighbors(seed);
    const auto s_w = g.neighbor_weights(seed);
    const double w_s = g.strength(seed);
    for (std::size_t k = 0; k < s_nb.size(); ++k) seed_w_[s_nb[k]] = s_w[k];

    std::size_t visited = 0;
    for (std::size_t i = 0; i < s_nb.size(); ++i) {
      const NodeId a = s_nb[i];
      const double w_sa = s_w[i];
      const double w_a = g.strength(a);
      const double omega = (w_s - w_sa) + (w_a - w_sa);
      // Only an isolated dyad has nothing to transmit to after the first step.
      if (!(omega > 0.0)) continue;
      const double p_first = w_sa / w_s;
      const auto a_nb = g.neighbors(a);
      const auto a_w = g.neighbor_weights(a);
      for (std::size_t k = 0; k < a_nb.size(); ++k) first_w_[a_nb[k]] = a_w[k];

      auto emit = [&](NodeId source, NodeId b, double w_edge, double w_sb, double w_ab) {
        const double strength_sum = w_s + w_a + g.strength(b);
        double foi = strength_sum - 2.0 * (w_sa + w_sb + w_ab);
        if (foi < 1e-12 * strength_sum) foi = 0.0;
        visit(a, source, b, p_first * (w_edge / omega), foi);
        ++visited;
      };
      for (std::size_t k = 0; k < s_nb.size(); ++k) {
        const NodeId b = s_nb[k];
        if (b == a) continue;
        emit(seed, b, s_w[k], s_w[k], first_w_[b]);
      }
      for (std::size_t k = 0; k < a_nb.size(); ++k) {
        const NodeId b = a_nb[k];
        if (b == seed) continue;
        emit(a, b, a_w[k], seed_w_[b], a_w[k]);
      }
      for (NodeId x : a_nb) first_w_[x] = 0.0;
    }
    for (NodeId x : s_nb) seed_w_[x] = 0.0;
    return visited;
  }

 private:
  std::vector<double> seed_w_;
  std::vector<double> first_w_;
};

// All ordered two-transmission patterns from `seed`. Empty for an isolated
// dyad. Throws for a seed without edges.
inline std::vector<TransmissionPattern> enumerate_patterns(const WanGraph& g, NodeId seed) {
  PatternScratch scratch(g.node_count());
  std::vector<TransmissionPattern> out;
  scratch.for_each_pattern(g, seed, [&](NodeId a, NodeId x, NodeId b, double p, double foi) {
    out.push_back({a, x, b, p, foi});
  });
  return out;
}

struct ExpectedForce {
  double raw = 0.0;         // natural-log entropy
  bool degenerate = false;  // no pattern carries positive force of infection
};

// Entropy of the normalised d_j = foi_j * p_j. Zero terms contribute nothing.
inline ExpectedForce entropy_of_forces(std::span<const double> d) {
  double total = 0.0;
  for (double x : d) total += x;
  if (!(total > 0.0)) return {0.0, true};
  double h = 0.0;
  for (double x : d) {
    if (x <= 0.0) continue;
    const double q = x / total;
    h -= q * std::log(q);
  }
  return {std::max(0.0, h), false};
}

inline ExpectedForce expected_force(const WanGraph& g, NodeId seed, PatternScratch& scratch,
                                    std::vector<double>& buffer) {
  buffer.clear();
  scratch.for_each_pattern(g, seed, [&](NodeId, NodeId, NodeId, double p, double foi) {
    buffer.push_back(p * foi);
  });
  return entropy_of_forces(buffer);
}

inline ExpectedForce expected_force(const WanGraph& g, NodeId seed) {
  PatternScratch scratch(g.node_count());
  std::vector<double> buffer;
  return expected_force(g, seed, scratch, buffer);
}

struct AefScore {
  double raw_entropy = 0.0;
  double normalized = 0.0;  // in [0, 100]
  bool degenerate = false;
};

// Min-max rescaling of raw entropies onto [0, 100]; a flat range maps to 0.
inline std::vector<AefScore> normalize_scores(std::span<const ExpectedForce> raw) {
  if (raw.empty()) throw Error("cannot normalise an empty score set");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& r : raw) {
    lo = std::min(lo, r.raw);
    hi = std::max(hi, r.raw);
  }
  std::vector<AefScore> out;
  out.reserve(raw.size());
  const double range = hi - lo;
  for (const auto& r : raw) {
    double n = range > 0.0 ? 100.0 * (r.raw - lo) / range : 0.0;
    out.push_back({r.raw, std::clamp(n, 0.0, 100.0), r.degenerate});
  }
  return out;
}

// Raw expected force of every node, indexed by node id.
inline std::vector<ExpectedForce> all_expected_force(const WanGraph& g, std::size_t workers = default_workers()) {
  std::vector<ExpectedForce> raw(g.node_count());
  struct State {
    PatternScratch scratch;
    std::vector<double> buffer;
  };
  parallel_for_stateful(
      g.node_count(), workers, [&] { return State{PatternScratch(g.node_count()), {}}; },
      [&](State& st, std::size_t u) {
        raw[u] = expected_force(g, static_cast<NodeId>(u), st.scratch, st.buffer);
      });
  return raw;
}

// Normalised AEF of every node, indexed by node id.
inline std::vector<AefScore> all_aef(const WanGraph& g, std::size_t workers = default_workers()) {
  if (g.empty()) throw Error("graph is empty");
  auto raw = all_expected_force(g, workers);
  return normalize_scores(raw);
}

}  // namespace aef
