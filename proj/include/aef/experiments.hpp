#pragma once

// End-to-end studies relating AEF to simulated pandemic outcomes, the
// robustness of AEF to missing airports, and the branching-process figure.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aef/centrality.hpp"
#include "aef/degrade.hpp"
#include "aef/episim.hpp"
#include "aef/error.hpp"
#include "aef/exf.hpp"
#include "aef/graph.hpp"
#include "aef/parallel.hpp"
#include "aef/random.hpp"
#include "aef/reed_frost.hpp"
#include "aef/stats.hpp"

namespace aef {

// ---------------------------------------------------------------------------
// Seed selection

struct DecileSelection {
  std::vector<NodeId> seeds;       // one per interval, interval order
  std::vector<std::string> notes;  // fill-ins for empty intervals
};

// Splits [0, 100] into ten equal intervals (the last one closed) and draws one
// airport uniformly from each. An empty interval borrows an unchosen airport
// from the nearest populated interval, preferring the lower one on ties.
inline DecileSelection select_decile_seeds(std::span<const AefScore> scores, Rng& rng) {
  if (scores.size() < 10) throw Error("decile selection needs at least 10 airports");
  std::vector<std::vector<NodeId>> bins(10);
  for (NodeId u = 0; u < scores.size(); ++u) {
    const auto b = std::min<std::size_t>(9, static_cast<std::size_t>(std::floor(scores[u].normalized / 10.0)));
    bins[b].push_back(u);
  }
  DecileSelection out;
  std::set<NodeId> chosen;
  auto draw = [&](std::size_t b) -> std::optional<NodeId> {
    std::vector<NodeId> free;
    for (NodeId u : bins[b])
      if (!chosen.count(u)) free.push_back(u);
    if (free.empty()) return std::nullopt;
    return free[std::uniform_int_distribution<std::size_t>(0, free.size() - 1)(rng)];
  };
  // Populated intervals draw first so a fill-in never takes the only airport
  // of a later interval.
  std::vector<std::optional<NodeId>> picks(10);
  for (std::size_t b = 0; b < 10; ++b) {
    if (!bins[b].empty()) {
      picks[b] = draw(b);
      chosen.insert(*picks[b]);
    }
  }
  for (std::size_t b = 0; b < 10; ++b) {
    auto& pick = picks[b];
    for (std::size_t d = 1; d < 10 && !pick; ++d) {
      if (b >= d && !bins[b - d].empty() && (pick = draw(b - d))) {
        out.notes.push_back("interval " + std::to_string(b) + " empty; filled from interval " + std::to_string(b - d));
      } else if (b + d < 10 && !bins[b + d].empty() && (pick = draw(b + d))) {
        out.notes.push_back("interval " + std::to_string(b) + " empty; filled from interval " + std::to_string(b + d));
      }
    }
    if (!pick) throw Error("not enough airports to fill ten intervals");
    chosen.insert(*pick);
    out.seeds.push_back(*pick);
  }
  return out;
}

// `count` targets evenly spaced over [min, max] of the normalised scores; each
// target takes the nearest unchosen airport, lowest IATA code (node id) on
// ties. Returned in target order.
inline std::vector<NodeId> select_range_covering_seeds(std::span<const AefScore> scores, std::size_t count = 100) {
  if (count == 0) return {};
  if (scores.size() < count) throw Error("not enough airports for range-covering selection");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : scores) {
    lo = std::min(lo, s.normalized);
    hi = std::max(hi, s.normalized);
  }
  std::vector<char> taken(scores.size(), 0);
  std::vector<NodeId> out;
  for (std::size_t k = 0; k < count; ++k) {
    const double target = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
    std::optional<NodeId> best;
    double best_gap = std::numeric_limits<double>::infinity();
    for (NodeId u = 0; u < scores.size(); ++u) {
      if (taken[u]) continue;
      const double gap = std::abs(scores[u].normalized - target);
      if (gap < best_gap) {
        best_gap = gap;
        best = u;
      }
    }
    taken[*best] = 1;
    out.push_back(*best);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Invasion threshold

struct SweepPoint {
  double beta = 0.0;
  std::size_t pandemic_runs = 0;
  bool pandemic = false;                      // the ensemble median is a pandemic
  std::optional<double> median_pandemic_day;
};

struct SeedSweep {
  NodeId seed = 0;
  std::vector<SweepPoint> points;  // one per grid beta
  std::optional<double> minimal_beta;
};

inline std::vector<double> default_beta_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(0.40 + 0.01 * i);
  return grid;
}

// For every seed and grid beta runs an ensemble with the simple SEIR model;
// the minimal beta is the smallest grid value whose median run is a pandemic.
inline std::vector<SeedSweep> invasion_threshold_sweep(const World& world, std::span<const NodeId> seeds,
                                                       std::span<const double> beta_grid,
                                                       const DiseaseModel& base, EnsembleOptions opt) {
  if (!base.is_simple()) throw Error("invasion sweep uses the simple SEIR model");
  if (beta_grid.empty()) throw Error("beta grid is empty");
  for (std::size_t i = 1; i < beta_grid.size(); ++i)
    if (!(beta_grid[i] > beta_grid[i - 1])) throw Error("beta grid must be strictly ascending");
  opt.simulation.stop_at_pandemic = true;
  opt.keep_outcomes = false;
  const std::size_t cells = seeds.size() * beta_grid.size();
  std::vector<SweepPoint> points(cells);
  const std::size_t workers = opt.workers;
  opt.workers = 1;
  parallel_for(cells, workers, [&](std::size_t c) {
    const std::size_t s = c / beta_grid.size();
    const std::size_t b = c % beta_grid.size();
    DiseaseModel d = base;
    d.beta = beta_grid[b];
    EnsembleOptions o = opt;
    o.base_seed = derive_seed(opt.base_seed, "sweep-beta", {b});
    const auto summary = run_ensemble(world, d, seeds[s], o);
    points[c] = {beta_grid[b], summary.pandemic_count(), summary.median_pandemic_day.has_value(),
                 summary.median_pandemic_day};
  });
  std::vector<SeedSweep> out;
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    SeedSweep row;
    row.seed = seeds[s];
    for (std::size_t b = 0; b < beta_grid.size(); ++b) {
      row.points.push_back(points[s * beta_grid.size() + b]);
      if (!row.minimal_beta && row.points.back().pandemic) row.minimal_beta = beta_grid[b];
    }
    out.push_back(std::move(row));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Time to pandemic

struct MeasureCorrelation {
  std::string measure;
  std::optional<stats::CorrelationResult> pandemic;  // none when undefined
  std::optional<stats::CorrelationResult> peak;
};

struct TimeToPandemicRow {
  NodeId seed = 0;
  std::size_t pandemic_runs = 0;
  std::optional<double> median_pandemic_day;
  std::optional<double> median_peak_day;
};

struct TimeToPandemicReport {
  std::vector<TimeToPandemicRow> rows;
  std::vector<MeasureCorrelation> correlations;  // one row per measure
  std::vector<NodeId> excluded;                  // seeds without a pandemic median
  std::optional<stats::ShapiroWilk> pandemic_normality;
  std::optional<stats::ShapiroWilk> peak_normality;
};

// Per-node value of each comparison measure, in reporting order.
inline std::vector<std::pair<std::string, std::vector<double>>> measure_columns(std::span<const AefScore> aef,
                                                                                const CentralityReport& c) {
  auto as_double = [](const auto& v) { return std::vector<double>(v.begin(), v.end()); };
  std::vector<double> a;
  for (const auto& s : aef) a.push_back(s.normalized);
  return {{"AEF", a},
          {"t-core", as_double(c.t_core)},
          {"Degree", as_double(c.degree)},
          {"W degree", c.weighted_degree},
          {"Eigenvalue", c.eigenvector},
          {"W eigenvalue", c.weighted_eigenvector},
          {"Betweenness", c.betweenness},
          {"W betweenness", c.weighted_betweenness},
          {"Clustering coef.", c.clustering},
          {"W Clust. coef.", c.weighted_clustering}};
}

inline std::optional<stats::CorrelationResult> try_pearson(std::span<const double> x, std::span<const double> y) {
  try {
    return stats::pearson_ci(x, y);
  } catch (const UndefinedResult&) {
    return std::nullopt;
  }
}

inline TimeToPandemicReport time_to_pandemic_study(const World& world, std::span<const NodeId> seeds,
                                                   const DiseaseModel& disease, std::span<const AefScore> aef,
                                                   const CentralityReport& centralities, EnsembleOptions opt) {
  TimeToPandemicReport rep;
  rep.rows.resize(seeds.size());
  const std::size_t workers = opt.workers;
  opt.workers = 1;
  opt.simulation.stop_at_pandemic = false;
  parallel_for(seeds.size(), workers, [&](std::size_t i) {
    const auto s = run_ensemble(world, disease, seeds[i], opt);
    rep.rows[i] = {seeds[i], s.pandemic_count(), s.median_pandemic_day, s.median_peak_day};
  });
  std::vector<NodeId> kept;
  std::vector<double> pand, peak;
  for (const auto& r : rep.rows) {
    if (!r.median_pandemic_day || !r.median_peak_day) {
      rep.excluded.push_back(r.seed);
      continue;
    }
    kept.push_back(r.seed);
    pand.push_back(*r.median_pandemic_day);
    peak.push_back(*r.median_peak_day);
  }
  for (const auto& [name, column] : measure_columns(aef, centralities)) {
    std::vector<double> x;
    for (NodeId u : kept) x.push_back(column[u]);
    rep.correlations.push_back({name, try_pearson(x, pand), try_pearson(x, peak)});
  }
  auto normality = [](const std::vector<double>& v) -> std::optional<stats::ShapiroWilk> {
    try {
      return stats::shapiro_wilk(v);
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  rep.pandemic_normality = normality(pand);
  rep.peak_normality = normality(peak);
  return rep;
}

// ---------------------------------------------------------------------------
// Robustness to missing airports

struct RobustnessRow {
  double fraction = 0.0;
  RemovalScheme scheme = RemovalScheme::Uniform;
  std::size_t repeats = 0;
  double removed = 0.0;            // mean airports removed
  double subset_compared = 0.0;    // mean surviving subset airports
  double other_compared = 0.0;     // mean airports outside the subset
  double subset_over_1pct = 0.0;   // mean counts of airports changed by more than 1% / 5%
  double subset_over_5pct = 0.0;
  double other_over_1pct = 0.0;
  double other_over_5pct = 0.0;

  double subset_share_over_1pct() const { return subset_compared > 0 ? subset_over_1pct / subset_compared : 0.0; }
  double subset_share_over_5pct() const { return subset_compared > 0 ? subset_over_5pct / subset_compared : 0.0; }
  double other_share_over_1pct() const { return other_compared > 0 ? other_over_1pct / other_compared : 0.0; }
  double other_share_over_5pct() const { return other_compared > 0 ? other_over_5pct / other_compared : 0.0; }
};

struct RobustnessOptions {
  std::string country = "United States";
  std::vector<double> fractions;  // defaults to 0.01 .. 0.15
  std::vector<RemovalScheme> schemes{RemovalScheme::Uniform, RemovalScheme::DegreeWeighted,
                                     RemovalScheme::AefWeighted};
  std::size_t repeats = 10;
  std::uint64_t base_seed = 1;
  std::size_t workers = 1;
};

struct ChangeCounts {
  std::size_t subset_compared = 0, other_compared = 0;
  std::size_t subset_over_1 = 0, subset_over_5 = 0, other_over_1 = 0, other_over_5 = 0;
};

// Compares raw AEF of every airport of `original` that was not deliberately
// removed with its value on `degraded`. Airports missing from `degraded`
// (left without edges) count as changed beyond both thresholds.
inline ChangeCounts compare_aef(const WanGraph& original, std::span<const ExpectedForce> original_raw,
                                const WanGraph& degraded, std::span<const ExpectedForce> degraded_raw,
                                std::span<const NodeId> removed, const std::string& country) {
  std::vector<char> gone(original.node_count(), 0);
  for (NodeId r : removed) gone[r] = 1;
  ChangeCounts c;
  for (NodeId u = 0; u < original.node_count(); ++u) {
    if (gone[u]) continue;
    const auto& a = original.airport(u);
    const bool in_subset = a.country == country;
    double change = std::numeric_limits<double>::infinity();
    if (auto v = degraded.find(a.iata)) change = stats::relative_change(original_raw[u].raw, degraded_raw[*v].raw);
    (in_subset ? c.subset_compared : c.other_compared)++;
    if (change > 0.01) (in_subset ? c.subset_over_1 : c.other_over_1)++;
    if (change > 0.05) (in_subset ? c.subset_over_5 : c.other_over_5)++;
  }
  return c;
}

inline std::vector<double> default_removal_fractions() {
  std::vector<double> f;
  for (int i = 1; i <= 15; ++i) f.push_back(i / 100.0);
  return f;
}

inline std::vector<RobustnessRow> robustness_study(const WanGraph& graph, std::span<const ExpectedForce> raw,
                                                   RobustnessOptions opt) {
  if (raw.size() != graph.node_count()) throw Error("one raw AEF per node required");
  if (opt.fractions.empty()) opt.fractions = default_removal_fractions();
  if (opt.repeats < 1) throw Error("at least one repeat required");
  const auto subset = graph.nodes_in_country(opt.country);
  if (subset.empty()) throw Error("no airports in '" + opt.country + "'");
  std::vector<double> aef_weights;
  for (const auto& r : raw) aef_weights.push_back(r.raw);

  std::vector<RobustnessRow> rows;
  for (std::size_t fi = 0; fi < opt.fractions.size(); ++fi) {
    for (std::size_t si = 0; si < opt.schemes.size(); ++si) {
      RobustnessRow row;
      row.fraction = opt.fractions[fi];
      row.scheme = opt.schemes[si];
      row.repeats = opt.repeats;
      for (std::size_t rep = 0; rep < opt.repeats; ++rep) {
        Rng rng = derive_rng(opt.base_seed, "robustness", {fi, si, rep});
        auto degraded = degrade_network(graph, subset, row.fraction, row.scheme, rng, aef_weights);
        ChangeCounts c;
        if (degraded.removed.empty()) {
          c = compare_aef(graph, raw, graph, raw, {}, opt.country);
        } else {
          const auto new_raw = all_expected_force(degraded.graph, opt.workers);
          c = compare_aef(graph, raw, degraded.graph, new_raw, degraded.removed, opt.country);
        }
        row.removed += static_cast<double>(degraded.removed.size());
        row.subset_compared += static_cast<double>(c.subset_compared);
        row.other_compared += static_cast<double>(c.other_compared);
        row.subset_over_1pct += static_cast<double>(c.subset_over_1);
        row.subset_over_5pct += static_cast<double>(c.subset_over_5);
        row.other_over_1pct += static_cast<double>(c.other_over_1);
        row.other_over_5pct += static_cast<double>(c.other_over_5);
      }
      const double k = static_cast<double>(opt.repeats);
      for (double* x : {&row.removed, &row.subset_compared, &row.other_compared, &row.subset_over_1pct,
                        &row.subset_over_5pct, &row.other_over_1pct, &row.other_over_5pct})
        *x /= k;
      rows.push_back(row);
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Branching-process figure

struct BranchingPoint {
  double r0 = 0.0;
  double analytic = 0.0;      // 1 - smallest fixed point
  std::vector<double> dots;   // observed major-outbreak fractions
};

struct BranchingOptions {
  std::int64_t population = 1000;
  std::size_t dots_per_r0 = 100;
  std::size_t trials_per_dot = 100;
  double major_threshold = 0.10;
  std::uint64_t base_seed = 1;
  std::size_t workers = 1;
};

inline std::vector<double> default_r0_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 20; ++i) g.push_back(1.0 + 0.1 * i);
  return g;
}

inline std::vector<BranchingPoint> branching_figure(std::span<const double> r0_grid, const BranchingOptions& opt) {
  std::vector<BranchingPoint> out(r0_grid.size());
  for (std::size_t i = 0; i < r0_grid.size(); ++i) {
    out[i].r0 = r0_grid[i];
    out[i].analytic = major_outbreak_probability(r0_grid[i]);
    out[i].dots.resize(opt.dots_per_r0);
  }
  const std::size_t cells = r0_grid.size() * opt.dots_per_r0;
  parallel_for(cells, opt.workers, [&](std::size_t c) {
    const std::size_t i = c / opt.dots_per_r0;
    const std::size_t d = c % opt.dots_per_r0;
    Rng rng = derive_rng(opt.base_seed, "branching", {i, d});
    out[i].dots[d] = reed_frost_simulate(r0_grid[i], opt.population, opt.trials_per_dot, rng, opt.major_threshold);
  });
  return out;
}

}  // namespace aef
