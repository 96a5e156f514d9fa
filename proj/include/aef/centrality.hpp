#pragma once

// Comparison centralities: degree, eigenvector, betweenness, clustering and
// triangle core (t-core), each in unweighted and weighted form where one
// exists.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

#include "aef/error.hpp"
#include "aef/graph.hpp"
#include "aef/parallel.hpp"

namespace aef {

struct DegreeCentrality {
  std::vector<std::size_t> degree;
  std::vector<double> weighted;
};

inline DegreeCentrality degree_centralities(const WanGraph& g) {
  DegreeCentrality out;
  out.degree.resize(g.node_count());
  out.weighted.resize(g.node_count());
  for (NodeId u = 0; u < g.node_count(); ++u) {
    out.degree[u] = g.degree(u);
    out.weighted[u] = g.strength(u);
  }
  return out;
}

// Connected component labels; components are numbered in order of their
// lowest node id.
inline std::vector<std::size_t> component_labels(const WanGraph& g, std::size_t* count = nullptr) {
  constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> label(g.node_count(), kUnset);
  std::size_t next = 0;
  std::vector<NodeId> stack;
  for (NodeId s = 0; s < g.node_count(); ++s) {
    if (label[s] != kUnset) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      for (NodeId v : g.neighbors(u))
        if (label[v] == kUnset) {
          label[v] = next;
          stack.push_back(v);
        }
    }
    ++next;
  }
  if (count) *count = next;
  return label;
}

struct EigenvectorOptions {
  bool weighted = false;
  double tolerance = 1e-10;
  std::size_t max_iterations = 100000;
};

// Perron vector of the (weighted) adjacency matrix on the largest connected
// component, max-normalised to 1; nodes outside that component score 0.
//
// Iterates v <- (A + I) v, which shares A's eigenvectors but has a unique
// dominant eigenvalue even on bipartite components. Stops when successive
// max-normalised vectors differ by less than `tolerance` in max norm.
inline std::vector<double> eigenvector_centrality(const WanGraph& g, const EigenvectorOptions& opt = {}) {
  const std::size_t n = g.node_count();
  std::vector<double> v(n, 0.0);
  if (n == 0) return v;
  std::size_t ncomp = 0;
  auto label = component_labels(g, &ncomp);
  std::vector<std::size_t> size(ncomp, 0);
  for (auto l : label) ++size[l];
  const std::size_t giant =
      static_cast<std::size_t>(std::max_element(size.begin(), size.end()) - size.begin());
  std::vector<NodeId> members;
  for (NodeId u = 0; u < n; ++u)
    if (label[u] == giant) members.push_back(u);

  for (NodeId u : members) v[u] = 1.0;
  std::vector<double> next(n, 0.0);
  double diff = std::numeric_limits<double>::infinity();
  for (std::size_t it = 1; it <= opt.max_iterations; ++it) {
    double peak = 0.0;
    for (NodeId u : members) {
      double acc = v[u];
      auto nb = g.neighbors(u);
      auto w = g.neighbor_weights(u);
      for (std::size_t k = 0; k < nb.size(); ++k) acc += (opt.weighted ? w[k] : 1.0) * v[nb[k]];
      next[u] = acc;
      peak = std::max(peak, acc);
    }
    diff = 0.0;
    for (NodeId u : members) {
      next[u] /= peak;
      diff = std::max(diff, std::abs(next[u] - v[u]));
    }
    std::swap(v, next);
    if (diff < opt.tolerance) return v;
  }
  throw ConvergenceError("eigenvector centrality did not converge", opt.max_iterations, diff);
}

namespace detail {

// Single-source dependency accumulation (Brandes). Adds the dependencies of
// `source` on every other node into `acc`.
struct BrandesWork {
  explicit BrandesWork(std::size_t n) : sigma(n), dist(n), delta(n), preds(n) {}
  std::vector<double> sigma;
  std::vector<double> dist;
  std::vector<double> delta;
  std::vector<std::vector<NodeId>> preds;
  std::vector<NodeId> order;

  void run(const WanGraph& g, NodeId source, bool weighted, std::vector<double>& acc) {
    const std::size_t n = g.node_count();
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(delta.begin(), delta.end(), 0.0);
    for (auto& p : preds) p.clear();
    order.clear();
    sigma[source] = 1.0;
    dist[source] = 0.0;
    if (!weighted) {
      std::size_t head = 0;
      order.push_back(source);
      while (head < order.size()) {
        const NodeId u = order[head++];
        for (NodeId v : g.neighbors(u)) {
          if (dist[v] == kInf) {
            dist[v] = dist[u] + 1.0;
            order.push_back(v);
          }
          if (dist[v] == dist[u] + 1.0) {
            sigma[v] += sigma[u];
            preds[v].push_back(u);
          }
        }
      }
    } else {
      using Item = std::pair<double, NodeId>;
      std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
      std::vector<char> settled(n, 0);
      heap.push({0.0, source});
      while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (settled[u]) continue;
        settled[u] = 1;
        order.push_back(u);
        auto nb = g.neighbors(u);
        auto w = g.neighbor_weights(u);
        for (std::size_t k = 0; k < nb.size(); ++k) {
          const NodeId v = nb[k];
          if (settled[v]) continue;
          const double len = d + 1.0 / w[k];
          const double tol = 1e-12 * std::max(len, dist[v] == kInf ? len : dist[v]);
          if (len < dist[v] - tol) {
            dist[v] = len;
            sigma[v] = sigma[u];
            preds[v].assign(1, u);
            heap.push({len, v});
          } else if (std::abs(len - dist[v]) <= tol) {
            sigma[v] += sigma[u];
            preds[v].push_back(u);
          }
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const NodeId w = *it;
      for (NodeId v : preds[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      if (w != source) acc[w] += delta[w];
    }
  }
};

}  // namespace detail

// Exact shortest-path betweenness, unnormalised: for an undirected graph each
// unordered pair {s, t} contributes the fraction of its shortest paths through
// the node. Weighted distances use edge length 1 / weight. Sources are
// processed in fixed blocks and reduced in block order, so the result does not
// depend on the worker count.
inline std::vector<double> betweenness_centrality(const WanGraph& g, bool weighted,
                                                  std::size_t workers = default_workers()) {
  const std::size_t n = g.node_count();
  if (weighted)
    for (const auto& e : g.edges())
      if (!(e.weight > 0.0)) throw Error("betweenness requires positive weights");
  constexpr std::size_t kBlock = 64;
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  std::vector<std::vector<double>> partial(blocks);
  parallel_for_stateful(
      blocks, workers, [&] { return detail::BrandesWork(n); },
      [&](detail::BrandesWork& work, std::size_t b) {
        std::vector<double> acc(n, 0.0);
        const std::size_t end = std::min(n, (b + 1) * kBlock);
        for (std::size_t s = b * kBlock; s < end; ++s) work.run(g, static_cast<NodeId>(s), weighted, acc);
        partial[b] = std::move(acc);
      });
  std::vector<double> total(n, 0.0);
  for (const auto& p : partial)
    for (std::size_t u = 0; u < n; ++u) total[u] += p[u];
  for (double& x : total) x *= 0.5;
  return total;
}

// Unweighted local clustering: triangles / (k (k - 1) / 2); 0 when k < 2.
// Barrat weighted form:
//   C_i = sum over adjacent neighbour pairs {j, h} of (w_ij + w_ih)
//         / (s_i (k_i - 1)).
inline std::vector<double> clustering_coefficient(const WanGraph& g, bool weighted) {
  const std::size_t n = g.node_count();
  std::vector<double> out(n, 0.0);
  std::vector<double> mark(n, 0.0);  // weight to the current node, 0 if not a neighbour
  for (NodeId i = 0; i < n; ++i) {
    const std::size_t k = g.degree(i);
    if (k < 2) continue;
    auto nb = g.neighbors(i);
    auto w = g.neighbor_weights(i);
    for (std::size_t a = 0; a < nb.size(); ++a) mark[nb[a]] = w[a];
    double triangles = 0.0;
    double weighted_sum = 0.0;
    for (std::size_t a = 0; a < nb.size(); ++a) {
      const NodeId j = nb[a];
      for (NodeId h : g.neighbors(j)) {
        if (h <= j || mark[h] == 0.0) continue;
        triangles += 1.0;
        weighted_sum += w[a] + mark[h];
      }
    }
    for (NodeId j : nb) mark[j] = 0.0;
    const double kd = static_cast<double>(k);
    out[i] = weighted ? weighted_sum / (g.strength(i) * (kd - 1.0)) : triangles / (kd * (kd - 1.0) / 2.0);
  }
  return out;
}

// Triangles each node takes part in.
inline std::vector<std::size_t> triangle_counts(const WanGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::size_t> tri(n, 0);
  std::vector<char> mark(n, 0);
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v : g.neighbors(u)) mark[v] = 1;
    for (NodeId v : g.neighbors(u)) {
      if (v <= u) continue;
      for (NodeId x : g.neighbors(v))
        if (x > v && mark[x]) {
          ++tri[u];
          ++tri[v];
          ++tri[x];
        }
    }
    for (NodeId v : g.neighbors(u)) mark[v] = 0;
  }
  return tri;
}

// Triangle core numbers. A node's t-core is the largest t such that it lies in
// the maximal subgraph in which every node is part of at least t triangles of
// that subgraph. Computed by peeling: at level t every node with at most t
// triangles is removed in simultaneous batches, counts are updated, and the
// removed nodes get core number t.
inline std::vector<std::size_t> t_core(const WanGraph& g) {
  const std::size_t n = g.node_count();
  auto tri = triangle_counts(g);
  std::vector<std::size_t> core(n, 0);
  std::vector<char> alive(n, 1);
  std::vector<char> leaving(n, 0);
  std::vector<char> mark(n, 0);
  std::size_t remaining = n;
  std::vector<NodeId> batch;
  while (remaining > 0) {
    std::size_t level = std::numeric_limits<std::size_t>::max();
    for (NodeId u = 0; u < n; ++u)
      if (alive[u]) level = std::min(level, tri[u]);
    for (;;) {
      batch.clear();
      for (NodeId u = 0; u < n; ++u)
        if (alive[u] && tri[u] <= level) batch.push_back(u);
      if (batch.empty()) break;
      for (NodeId v : batch) leaving[v] = 1;
      // Each triangle touching the batch is handled once, from its
      // lowest-id leaving vertex; surviving vertices lose one triangle.
      for (NodeId v : batch) {
        for (NodeId x : g.neighbors(v))
          if (alive[x]) mark[x] = 1;
        for (NodeId x : g.neighbors(v)) {
          if (!alive[x] || (leaving[x] && x < v)) continue;
          for (NodeId y : g.neighbors(x)) {
            if (y <= x || !mark[y] || (leaving[y] && y < v)) continue;
            if (!leaving[x]) --tri[x];
            if (!leaving[y]) --tri[y];
          }
        }
        for (NodeId x : g.neighbors(v)) mark[x] = 0;
      }
      for (NodeId v : batch) {
        alive[v] = 0;
        leaving[v] = 0;
        core[v] = level;
        --remaining;
      }
    }
  }
  return core;
}

struct CentralityReport {
  std::vector<std::size_t> degree;
  std::vector<double> weighted_degree;
  std::vector<double> eigenvector;
  std::vector<double> weighted_eigenvector;
  std::vector<double> betweenness;
  std::vector<double> weighted_betweenness;
  std::vector<double> clustering;
  std::vector<double> weighted_clustering;
  std::vector<std::size_t> t_core;
};

inline CentralityReport all_centralities(const WanGraph& g, std::size_t workers = default_workers()) {
  CentralityReport r;
  auto deg = degree_centralities(g);
  r.degree = std::move(deg.degree);
  r.weighted_degree = std::move(deg.weighted);
  r.eigenvector = eigenvector_centrality(g, {.weighted = false});
  r.weighted_eigenvector = eigenvector_centrality(g, {.weighted = true});
  r.betweenness = betweenness_centrality(g, false, workers);
  r.weighted_betweenness = betweenness_centrality(g, true, workers);
  r.clustering = clustering_coefficient(g, false);
  r.weighted_clustering = clustering_coefficient(g, true);
  r.t_core = aef::t_core(g);
  return r;
}

}  // namespace aef
