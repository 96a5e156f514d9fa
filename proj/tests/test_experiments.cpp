#include <gtest/gtest.h>

#include <memory>
#include <set>

#include "aef/experiments.hpp"
#include "aef/synthetic.hpp"
#include "oracles.hpp"

namespace {

using namespace aef;

std::vector<AefScore> scores_from(const std::vector<double>& normalized) {
  std::vector<AefScore> s;
  for (double x : normalized) s.push_back({x / 10.0, x, false});
  return s;
}

TEST(DecileSeeds, OnePerIntervalWhenAllPopulated) {
  std::vector<double> v;
  for (int i = 0; i < 50; ++i) v.push_back(i * 2.0 + 0.5);
  auto s = scores_from(v);
  Rng rng(3);
  auto sel = select_decile_seeds(s, rng);
  ASSERT_EQ(sel.seeds.size(), 10u);
  EXPECT_TRUE(sel.notes.empty());
  for (std::size_t b = 0; b < 10; ++b) {
    const double x = s[sel.seeds[b]].normalized;
    EXPECT_GE(x, 10.0 * b);
    EXPECT_LT(x, 10.0 * (b + 1));
  }
  Rng again(3);
  EXPECT_EQ(select_decile_seeds(s, again).seeds, sel.seeds);
}

TEST(DecileSeeds, TopIntervalIsClosedAndEmptyIntervalsBorrow) {
  // Everything sits in [0, 10) except one airport at exactly 100.
  std::vector<double> v{100.0};
  for (int i = 0; i < 12; ++i) v.push_back(i * 0.5);
  Rng rng(1);
  auto sel = select_decile_seeds(scores_from(v), rng);
  EXPECT_EQ(sel.seeds.back(), 0u);
  EXPECT_EQ(sel.notes.size(), 8u);
  EXPECT_EQ(std::set<NodeId>(sel.seeds.begin(), sel.seeds.end()).size(), 10u);
  EXPECT_THROW(select_decile_seeds(scores_from({1, 2, 3}), rng), Error);
}

TEST(RangeCovering, SpreadsOverRangeWithoutRepeats) {
  std::vector<double> v;
  for (int i = 0; i <= 100; ++i) v.push_back(i);
  auto seeds = select_range_covering_seeds(scores_from(v), 11);
  std::vector<NodeId> expected{0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
  EXPECT_EQ(seeds, expected);
  auto all = select_range_covering_seeds(scores_from({5, 5, 5}), 3);
  EXPECT_EQ(std::set<NodeId>(all.begin(), all.end()).size(), 3u);
  // Ties go to the lowest id.
  EXPECT_EQ(select_range_covering_seeds(scores_from({0, 50, 50, 100}), 3)[1], 1u);
}

World small_world(double seat_scale) {
  SyntheticNetworkOptions opt;
  opt.nodes = 40;
  opt.seat_scale = seat_scale;
  auto net = synthetic_airline_network(opt);
  return build_world(std::make_shared<const WanGraph>(std::move(net.graph)), net.regions);
}

TEST(Sweep, MinimalBetaIsFirstPandemicGridPoint) {
  auto w = small_world(200.0);
  EnsembleOptions opt;
  opt.runs = 4;
  opt.simulation.max_days = 200;
  std::vector<NodeId> seeds{0};
  auto rows = invasion_threshold_sweep(w, seeds, default_beta_grid(), DiseaseModel::simple_seir(0.45), opt);
  ASSERT_EQ(rows.size(), 1u);
  ASSERT_EQ(rows[0].points.size(), 11u);
  // A heavily connected hub spreads at every beta on the grid.
  EXPECT_EQ(rows[0].minimal_beta, std::optional<double>(0.40));
  for (const auto& p : rows[0].points) EXPECT_EQ(p.pandemic, p.pandemic_runs * 2 >= opt.runs);
  EXPECT_THROW(invasion_threshold_sweep(w, seeds, default_beta_grid(), DiseaseModel::influenza_2009(), opt), Error);
}

TEST(Sweep, NoTravelMeansNoThreshold) {
  auto w = small_world(200.0);
  w.rho = 0.0;
  EnsembleOptions opt;
  opt.runs = 2;
  opt.simulation.max_days = 100;
  std::vector<NodeId> seeds{0};
  auto rows = invasion_threshold_sweep(w, seeds, default_beta_grid(), DiseaseModel::simple_seir(0.45), opt);
  EXPECT_FALSE(rows[0].minimal_beta.has_value());
}

TEST(TimeToPandemic, CorrelationRowsForEveryMeasure) {
  auto w = small_world(200.0);
  const auto& g = *w.graph;
  auto aef_scores = all_aef(g);
  auto cent = all_centralities(g);
  auto seeds = select_range_covering_seeds(aef_scores, 12);
  EnsembleOptions opt;
  opt.runs = 3;
  opt.simulation.max_days = 150;
  auto rep = time_to_pandemic_study(w, seeds, DiseaseModel::influenza_2009(), aef_scores, cent, opt);
  EXPECT_EQ(rep.rows.size(), seeds.size());
  ASSERT_EQ(rep.correlations.size(), measure_columns(aef_scores, cent).size());
  EXPECT_EQ(rep.correlations[0].measure, "AEF");
  EXPECT_EQ(rep.rows.size() - rep.excluded.size() >= 4, rep.correlations[0].pandemic.has_value());
}

TEST(Robustness, ZeroFractionChangesNothing) {
  SyntheticNetworkOptions o;
  o.nodes = 60;
  auto net = synthetic_airline_network(o);
  const auto& g = net.graph;
  auto raw = all_expected_force(g);
  RobustnessOptions opt;
  opt.country = g.airport(0).country;
  opt.fractions = {0.0, 0.2};
  opt.repeats = 2;
  auto rows = robustness_study(g, raw, opt);
  ASSERT_EQ(rows.size(), 6u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(rows[i].removed, 0.0);
    EXPECT_EQ(rows[i].subset_over_1pct + rows[i].other_over_1pct, 0.0);
    EXPECT_EQ(rows[i].subset_compared + rows[i].other_compared, 60.0);
  }
  EXPECT_GT(rows[3].removed, 0.0);
  EXPECT_EQ(rows[3].removed + rows[3].subset_compared + rows[3].other_compared, 60.0);
  opt.country = "Atlantis";
  EXPECT_THROW(robustness_study(g, raw, opt), Error);
}

TEST(Robustness, CompareCountsVanishedAirportsAsChanged) {
  // Star NAB-{NAA,NAC,NAD}; removing NAB strands the leaves.
  auto g = oracle::from_dense({{0, 1, 0, 0}, {1, 0, 1, 1}, {0, 1, 0, 0}, {0, 1, 0, 0}});
  auto raw = all_expected_force(g);
  // Identical graphs compare equal.
  std::vector<NodeId> none;
  auto same = compare_aef(g, raw, g, raw, none, g.airport(0).country);
  EXPECT_EQ(same.subset_compared + same.other_compared, 4u);
  EXPECT_EQ(same.subset_over_1 + same.other_over_1, 0u);
  auto empty = WanGraph::from_edges({}, {});
  std::vector<NodeId> removed{1};
  auto c = compare_aef(g, raw, empty, {}, removed, g.airport(0).country);
  EXPECT_EQ(c.subset_compared + c.other_compared, 3u);
  EXPECT_EQ(c.subset_over_5 + c.other_over_5, 3u);
}

TEST(Branching, DotsScatterAroundAnalyticCurve) {
  BranchingOptions opt;
  opt.dots_per_r0 = 20;
  opt.trials_per_dot = 100;
  opt.workers = 2;
  std::vector<double> r0{1.5, 2.0, 3.0};
  auto pts = branching_figure(r0, opt);
  ASSERT_EQ(pts.size(), 3u);
  for (const auto& p : pts) {
    ASSERT_EQ(p.dots.size(), 20u);
    double mean = 0.0;
    for (double d : p.dots) mean += d / 20.0;
    EXPECT_NEAR(mean, p.analytic, 0.05) << "r0 " << p.r0;
  }
  opt.workers = 1;
  EXPECT_EQ(branching_figure(r0, opt)[1].dots, pts[1].dots);
}

}  // namespace
