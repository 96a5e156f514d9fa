#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "aef/error.hpp"

namespace aef::stats {

inline double normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

inline double normal_upper_tail(double x, double mean = 0.0, double sd = 1.0) {
  return boost::math::cdf(boost::math::complement(boost::math::normal_distribution<double>(mean, sd), x));
}

struct CorrelationResult {
  double r = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n = 0;

  double half_width() const noexcept { return 0.5 * (ci_high - ci_low); }
};

inline double pearson_r(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("correlation inputs differ in length");
  const std::size_t n = x.size();
  if (n < 2) throw UndefinedResult("correlation needs at least two points");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw UndefinedResult("correlation undefined for zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// Confidence interval for a correlation coefficient via the Fisher
// z-transform: tanh(atanh(r) -+ z_q / sqrt(n - 3)).
inline CorrelationResult fisher_interval(double r, std::size_t n, double level = 0.95) {
  if (n < 4) throw UndefinedResult("confidence interval needs n >= 4");
  if (!(level > 0.0 && level < 1.0)) throw Error("confidence level must lie in (0, 1)");
  CorrelationResult out{r, r, r, n};
  if (std::abs(r) >= 1.0) return out;
  const double z = std::atanh(r);
  const double half = normal_quantile(0.5 + level / 2.0) / std::sqrt(static_cast<double>(n) - 3.0);
  out.ci_low = std::tanh(z - half);
  out.ci_high = std::tanh(z + half);
  return out;
}

inline CorrelationResult pearson_ci(std::span<const double> x, std::span<const double> y, double level = 0.95) {
  if (x.size() != y.size()) throw Error("correlation inputs differ in length");
  if (x.size() < 4) throw UndefinedResult("correlation interval needs n >= 4");
  return fisher_interval(pearson_r(x, y), x.size(), level);
}

// Ranks starting at 1; ties share their average rank.
inline std::vector<double> ranks(std::span<const double> x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

inline double spearman_rho(std::span<const double> x, std::span<const double> y) {
  auto rx = ranks(x);
  auto ry = ranks(y);
  return pearson_r(rx, ry);
}

// Median; the mean of the two middle values for even n. Infinite entries sort
// last, so a median of +inf means more than half the values are censored.
inline double median(std::span<const double> x) {
  if (x.empty()) throw Error("median of an empty sequence");
  std::vector<double> v(x.begin(), x.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  const double a = v[n / 2 - 1];
  const double b = v[n / 2];
  if (std::isinf(a) || std::isinf(b)) return std::isinf(b) ? b : a;
  return 0.5 * (a + b);
}

// Lower of the two middle values for even n; always an element of x.
inline double lower_median(std::span<const double> x) {
  if (x.empty()) throw Error("median of an empty sequence");
  std::vector<double> v(x.begin(), x.end());
  const std::size_t k = (v.size() - 1) / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
  return v[k];
}

// |new - old| / |old|; falls back to the absolute change when old == 0.
inline double relative_change(double old_value, double new_value) {
  const double diff = std::abs(new_value - old_value);
  if (old_value == 0.0) return diff;
  return diff / std::abs(old_value);
}

struct ShapiroWilk {
  double w = 0.0;
  double p_value = 0.0;
};

namespace detail {

// c[0] + c[1] x + ... + c[n-1] x^(n-1)
inline double poly(std::span<const double> c, double x) {
  double r = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) r = r * x + c[i];
  return r;
}

}  // namespace detail

// Shapiro-Wilk W test for normality with Royston's approximations for the
// coefficients and the p-value (algorithm AS R94). Requires 3 <= n <= 5000.
inline ShapiroWilk shapiro_wilk(std::span<const double> sample) {
  const std::size_t n = sample.size();
  if (n < 3 || n > 5000) throw Error("Shapiro-Wilk requires 3 <= n <= 5000");
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  const double range = x.back() - x.front();
  if (range < 1e-19) throw UndefinedResult("Shapiro-Wilk undefined for a constant sample");

  static constexpr double c1[] = {0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056};
  static constexpr double c2[] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
  static constexpr double c3[] = {0.544, -0.39978, 0.025054, -6.714e-4};
  static constexpr double c4[] = {1.3822, -0.77857, 0.062767, -0.0020322};
  static constexpr double c5[] = {-1.5861, -0.31082, -0.083751, 0.0038915};
  static constexpr double c6[] = {-0.4803, -0.082676, 0.0030302};
  static constexpr double g[] = {-2.273, 0.459};

  const std::size_t half = n / 2;
  const double an = static_cast<double>(n);
  std::vector<double> a(half, 0.0);  // a[0] pairs with the extreme order statistics
  if (n == 3) {
    a[0] = std::sqrt(0.5);
  } else {
    std::vector<double> m(half);
    double summ2 = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
      m[i] = normal_quantile((static_cast<double>(i + 1) - 0.375) / (an + 0.25));
      summ2 += m[i] * m[i];
    }
    summ2 *= 2.0;
    const double ssumm2 = std::sqrt(summ2);
    const double rsn = 1.0 / std::sqrt(an);
    const double a1 = detail::poly(c1, rsn) - m[0] / ssumm2;
    std::size_t first_scaled = 1;
    double fac = 0.0;
    if (n > 5) {
      first_scaled = 2;
      const double a2 = -m[1] / ssumm2 + detail::poly(c2, rsn);
      fac = std::sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
      a[1] = a2;
    } else {
      fac = std::sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1));
    }
    a[0] = a1;
    for (std::size_t i = first_scaled; i < half; ++i) a[i] = -m[i] / fac;
  }

  // W as the squared correlation between the data and the full antisymmetric
  // coefficient vector.
  auto coef = [&](std::size_t i) -> double {
    const std::size_t j = n - 1 - i;
    if (i < j) return -a[i];
    if (i > j) return a[j];
    return 0.0;
  };
  double sa = 0.0, sx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sa += coef(i);
    sx += x[i] / range;
  }
  sa /= an;
  sx /= an;
  double ssa = 0.0, ssx = 0.0, sax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double asa = coef(i) - sa;
    const double xsx = x[i] / range - sx;
    ssa += asa * asa;
    ssx += xsx * xsx;
    sax += asa * xsx;
  }
  const double ssassx = std::sqrt(ssa * ssx);
  const double w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx);
  ShapiroWilk out;
  out.w = 1.0 - w1;

  if (n == 3) {
    constexpr double pi6 = 1.90985931710274;   // 6 / pi
    constexpr double stqr = 1.04719755119660;  // asin(sqrt(3 / 4))
    out.p_value = std::max(0.0, pi6 * (std::asin(std::sqrt(out.w)) - stqr));
    return out;
  }
  double y = std::log(w1);
  const double lxx = std::log(an);
  double mean = 0.0, sd = 1.0;
  if (n <= 11) {
    const double gamma = detail::poly(g, an);
    if (y >= gamma) {
      out.p_value = 1e-99;
      return out;
    }
    y = -std::log(gamma - y);
    mean = detail::poly(c3, an);
    sd = std::exp(detail::poly(c4, an));
  } else {
    mean = detail::poly(c5, lxx);
    sd = std::exp(detail::poly(c6, lxx));
  }
  out.p_value = normal_upper_tail(y, mean, sd);
  return out;
}

}  // namespace aef::stats
