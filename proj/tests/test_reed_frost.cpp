#include <gtest/gtest.h>

#include <cmath>

#include "aef/reed_frost.hpp"

namespace {

using namespace aef;

TEST(FixedPoint, ReferenceRoots) {
  EXPECT_NEAR(reed_frost_fixed_point(1.5), 0.4171883561341885, 1e-11);
  EXPECT_NEAR(reed_frost_fixed_point(2.0), 0.20318786997997987, 1e-11);
  EXPECT_NEAR(reed_frost_fixed_point(3.0), 0.05952020929264037, 1e-11);
}

TEST(FixedPoint, SolvesTheEquationAndIsMonotone) {
  double previous = 1.0;
  for (double r0 = 1.05; r0 <= 6.0; r0 += 0.05) {
    const double x = reed_frost_fixed_point(r0);
    EXPECT_NEAR(x, std::exp(-r0 * (1.0 - x)), 1e-11);
    EXPECT_LT(x, previous);
    previous = x;
  }
}

TEST(FixedPoint, SubcriticalAndInvalid) {
  EXPECT_EQ(reed_frost_fixed_point(0.5), 1.0);
  EXPECT_EQ(reed_frost_fixed_point(1.0), 1.0);
  EXPECT_EQ(major_outbreak_probability(0.8), 0.0);
  EXPECT_THROW(reed_frost_fixed_point(0.0), Error);
}

TEST(Simulation, ZeroAndSubcritical) {
  Rng rng(1);
  EXPECT_EQ(reed_frost_simulate(0.0, 1000, 200, rng), 0.0);
  EXPECT_LT(reed_frost_simulate(0.5, 1000, 2000, rng), 0.01);
  EXPECT_THROW(reed_frost_simulate(2.0, 50, 10, rng), Error);
}

TEST(Simulation, MatchesBranchingLimit) {
  Rng rng(42);
  for (double r0 : {1.5, 2.5}) EXPECT_NEAR(reed_frost_simulate(r0, 2000, 3000, rng), major_outbreak_probability(r0), 0.03);
}

TEST(FinalSize, CountsIndexCase) {
  Rng rng(3);
  EXPECT_EQ(reed_frost_final_size(0.0, 500, rng), 1);
  // Certain transmission infects everyone in the first generation.
  EXPECT_EQ(reed_frost_final_size(500.0, 500, rng), 500);
}

}  // namespace
