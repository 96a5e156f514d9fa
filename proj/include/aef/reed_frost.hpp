#pragma once

// Reed-Frost chain binomial and its branching-process limit.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>

#include "aef/error.hpp"
#include "aef/random.hpp"

namespace aef {

// Extinction probability of a Poisson(r0) branching process: the smallest
// root of x = exp(-r0 (1 - x)) in [0, 1]. Returns 1 for r0 <= 1.
//
// For r0 > 1, f(x) = x - exp(-r0 (1 - x)) is negative at 0 and positive at its
// maximum x_c = 1 - ln(r0) / r0, so [0, x_c] brackets the smallest root.
inline double reed_frost_fixed_point(double r0, double tolerance = 1e-12) {
  if (!(r0 > 0.0)) throw Error("r0 must be positive");
  if (r0 <= 1.0) return 1.0;
  auto f = [r0](double x) { return x - std::exp(-r0 * (1.0 - x)); };
  double lo = 0.0;
  double hi = 1.0 - std::log(r0) / r0;
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Probability of a major outbreak, 1 - extinction probability.
inline double major_outbreak_probability(double r0) {
  if (r0 <= 0.0) return 0.0;
  return 1.0 - reed_frost_fixed_point(r0);
}

// Final number infected (including the index case) of one Reed-Frost
// outbreak in a population of `population` with one initial infective. Each
// infective infects each susceptible independently with probability r0 / N
// during its single generation.
inline std::int64_t reed_frost_final_size(double r0, std::int64_t population, Rng& rng) {
  const double p = r0 / static_cast<double>(population);
  if (p > 1.0) throw Error("r0 must not exceed the population size");
  const double escape = 1.0 - p;
  std::int64_t susceptible = population - 1;
  std::int64_t infectives = 1;
  std::int64_t total = 1;
  while (infectives > 0 && susceptible > 0) {
    const double p_inf = 1.0 - std::pow(escape, static_cast<double>(infectives));
    std::int64_t next = 0;
    if (p_inf >= 1.0) {
      next = susceptible;
    } else if (p_inf > 0.0) {
      next = std::binomial_distribution<std::int64_t>(susceptible, p_inf)(rng);
    }
    susceptible -= next;
    total += next;
    infectives = next;
  }
  return total;
}

// Fraction of `trials` outbreaks whose final attack fraction reaches
// `major_threshold`.
inline double reed_frost_simulate(double r0, std::int64_t population, std::size_t trials, Rng& rng,
                                  double major_threshold = 0.10) {
  if (population < 100) throw Error("population must be at least 100");
  if (trials < 1) throw Error("at least one trial is required");
  if (r0 < 0.0) throw Error("r0 must be non-negative");
  std::size_t major = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto size = reed_frost_final_size(r0, population, rng);
    if (static_cast<double>(size) / static_cast<double>(population) >= major_threshold) ++major;
  }
  return static_cast<double>(major) / static_cast<double>(trials);
}

}  // namespace aef
