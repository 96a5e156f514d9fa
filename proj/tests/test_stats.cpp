#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "aef/stats.hpp"

namespace {

using namespace aef::stats;

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(Pearson, HandExamples) {
  std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> y2{2, 4, 6, 8, 10};
  std::vector<double> y{2, 4, 5, 4, 5};
  std::vector<double> neg{5, 4, 3, 2, 1};
  EXPECT_DOUBLE_EQ(pearson_r(x, y2), 1.0);
  EXPECT_DOUBLE_EQ(pearson_r(x, neg), -1.0);
  EXPECT_NEAR(pearson_r(x, y), std::sqrt(0.6), 1e-15);
}

TEST(Pearson, AffineInvariance) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  std::vector<double> x(40), y(40);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = nd(rng);
    y[i] = 0.3 * x[i] + nd(rng);
  }
  const double r = pearson_r(x, y);
  std::vector<double> xa(x), ya(y);
  for (auto& v : xa) v = 7.0 * v - 3.0;
  for (auto& v : ya) v = 0.01 * v + 100.0;
  EXPECT_NEAR(pearson_r(xa, ya), r, 1e-12);
  for (auto& v : ya) v = -v;
  EXPECT_NEAR(pearson_r(xa, ya), -r, 1e-12);
}

TEST(Pearson, Errors) {
  std::vector<double> a{1, 2, 3}, b{1, 2}, c{4, 4, 4};
  EXPECT_THROW(pearson_r(a, b), aef::Error);
  EXPECT_THROW(pearson_r(a, c), aef::UndefinedResult);
  EXPECT_THROW(pearson_r(std::vector<double>{1}, std::vector<double>{2}), aef::UndefinedResult);
}

TEST(Fisher, ReferenceInterval) {
  auto ci = fisher_interval(-0.84, 100);
  EXPECT_NEAR(ci.ci_low, -0.8896359911644092, 1e-12);
  EXPECT_NEAR(ci.ci_high, -0.7707486398332696, 1e-12);
  EXPECT_NEAR(ci.half_width(), 0.059443675665569795, 1e-12);
}

TEST(Fisher, SymmetricInZ) {
  for (double r : {-0.9, -0.3, 0.0, 0.45, 0.8}) {
    auto ci = fisher_interval(r, 37);
    EXPECT_NEAR(std::atanh(r) - std::atanh(ci.ci_low), std::atanh(ci.ci_high) - std::atanh(r), 1e-12);
    EXPECT_LT(ci.ci_low, r);
    EXPECT_GT(ci.ci_high, r);
  }
  EXPECT_THROW(fisher_interval(0.5, 3), aef::UndefinedResult);
}

TEST(Fisher, CoverageOnBivariateNormal) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> nd;
  const double rho = 0.5;
  const int trials = 4000;
  int covered = 0;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> x(50), y(50);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = nd(rng);
      y[i] = rho * x[i] + std::sqrt(1 - rho * rho) * nd(rng);
    }
    auto ci = pearson_ci(x, y);
    if (ci.ci_low <= rho && rho <= ci.ci_high) ++covered;
  }
  EXPECT_NEAR(static_cast<double>(covered) / trials, 0.95, 0.015);
}

TEST(Spearman, TiesGetAverageRanks) {
  std::vector<double> x{1, 2, 2, 3};
  EXPECT_EQ(ranks(x), (std::vector<double>{1, 2.5, 2.5, 4}));
  EXPECT_NEAR(spearman_rho(x, std::vector<double>{1, 2, 3, 4}), 0.9486832980505138, 1e-15);
  // Monotone but non-linear.
  std::vector<double> a{1, 2, 3, 4, 5}, b{1, 8, 27, 64, 125};
  EXPECT_DOUBLE_EQ(spearman_rho(a, b), 1.0);
}

TEST(Median, EvenOddAndCensored) {
  EXPECT_EQ(median(std::vector<double>{3, 1, 2}), 2.0);
  EXPECT_EQ(median(std::vector<double>{4, 1, 3, 2}), 2.5);
  EXPECT_EQ(median(std::vector<double>{1, kInf, kInf, 2}), kInf);
  EXPECT_EQ(median(std::vector<double>{1, 2, 3, kInf}), 2.5);
  EXPECT_EQ(lower_median(std::vector<double>{4, 1, 3, 2}), 2.0);
  EXPECT_EQ(lower_median(std::vector<double>{5, kInf, 7}), 7.0);
  EXPECT_THROW(median(std::vector<double>{}), aef::Error);
}

TEST(RelativeChange, Definition) {
  EXPECT_DOUBLE_EQ(relative_change(50.0, 50.5), 0.01);
  EXPECT_DOUBLE_EQ(relative_change(-2.0, -1.0), 0.5);
  EXPECT_DOUBLE_EQ(relative_change(0.0, 0.3), 0.3);
}

TEST(Normal, QuantileAndTail) {
  EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-12);
  EXPECT_NEAR(normal_upper_tail(1.959963984540054), 0.025, 1e-12);
}

// Reference values from an independent implementation. It computes partly in
// single precision, hence the 1e-3 tolerance.
struct SwCase {
  std::vector<double> data;
  double w;
  double p;
};

std::vector<SwCase> sw_cases() {
  std::vector<SwCase> c;
  c.push_back({{148, 154, 158, 160, 161, 162, 166, 170, 182, 195, 236}, 0.7888146948631716, 0.006703814061898823});
  c.push_back({{1, 2, 4}, 0.9642857142857142, 0.6368868450289689});
  c.push_back({{2.1, 3.4, 1.9, 5.6, 4.4}, 0.9320849391953863, 0.6106559022604845});
  std::vector<double> pow20, sin100, log60;
  for (int i = 1; i <= 20; ++i) pow20.push_back(std::pow(i, 1.5));
  for (int i = 0; i < 100; ++i) sin100.push_back(std::sin(1.7 * i) + 0.1 * i);
  for (int i = 1; i <= 60; ++i) log60.push_back(std::log(i));
  c.push_back({pow20, 0.9386387827100082, 0.22595959591595688});
  c.push_back({sin100, 0.9660303078157064, 0.01107515271296441});
  c.push_back({log60, 0.8592505494819435, 5.773935554856979e-06});
  return c;
}

TEST(ShapiroWilk, MatchesReferenceValues) {
  for (const auto& c : sw_cases()) {
    auto r = shapiro_wilk(c.data);
    EXPECT_NEAR(r.w, c.w, 1e-3);
    EXPECT_NEAR(r.p_value, c.p, 1e-3);
  }
}

TEST(ShapiroWilk, InvariantToOrderAndAffineMaps) {
  auto c = sw_cases()[0].data;
  auto base = shapiro_wilk(c);
  std::mt19937_64 rng(6);
  std::shuffle(c.begin(), c.end(), rng);
  for (auto& v : c) v = 2.5 * v - 40.0;
  auto moved = shapiro_wilk(c);
  EXPECT_NEAR(moved.w, base.w, 1e-12);
  EXPECT_NEAR(moved.p_value, base.p_value, 1e-12);
}

TEST(ShapiroWilk, RejectsBadInput) {
  EXPECT_THROW(shapiro_wilk(std::vector<double>{1, 2}), aef::Error);
  EXPECT_THROW(shapiro_wilk(std::vector<double>{3, 3, 3, 3}), aef::UndefinedResult);
}

TEST(ShapiroWilk, RoughCalibration) {
  std::mt19937_64 rng(123);
  std::normal_distribution<double> nd;
  std::exponential_distribution<double> ed;
  int normal_keep = 0, exp_reject = 0;
  const int trials = 300;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> a(100), b(100);
    for (auto& v : a) v = nd(rng);
    for (auto& v : b) v = ed(rng);
    if (shapiro_wilk(a).p_value > 0.05) ++normal_keep;
    if (shapiro_wilk(b).p_value < 0.05) ++exp_reject;
  }
  EXPECT_NEAR(static_cast<double>(normal_keep) / trials, 0.95, 0.04);
  EXPECT_GE(exp_reject, trials * 95 / 100);
}

}  // namespace
