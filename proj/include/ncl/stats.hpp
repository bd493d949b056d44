#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>

namespace ncl {

// Welford accumulator.
struct RunningStats {
  uint64_t n = 0;
  double mean = 0;
  double m2 = 0;

  void add(double x) {
    ++n;
    double d = x - mean;
    mean += d / double(n);
    m2 += d * (x - mean);
  }
  double variance() const { return n > 1 ? m2 / double(n - 1) : 0.0; }
  double stddev() const { return std::sqrt(variance()); }
  double stderr_mean() const { return n > 0 ? stddev() / std::sqrt(double(n)) : 0.0; }
};

struct Interval {
  double lo = 0;
  double hi = 0;
  bool defined = false;
};

// Wilson score interval for a proportion; undefined for fewer than 2 trials.
inline Interval wilson_interval(uint64_t successes, uint64_t trials, double z = 1.96) {
  Interval iv;
  if (trials < 2) return iv;
  double n = double(trials), p = double(successes) / n, z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (p + z2 / (2 * n)) / denom;
  double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
  iv.lo = center - half;
  iv.hi = center + half;
  iv.defined = true;
  return iv;
}

struct LinFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
};

inline LinFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("linear_fit: need >= 2 matching points");
  double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  double vx = sxx - sx * sx / n;
  double vy = syy - sy * sy / n;
  double cxy = sxy - sx * sy / n;
  if (vx <= 0) throw std::invalid_argument("linear_fit: x values are constant");
  LinFit f;
  f.slope = cxy / vx;
  f.intercept = (sy - f.slope * sx) / n;
  f.r2 = vy > 0 ? (cxy * cxy) / (vx * vy) : 1.0;
  return f;
}

}  // namespace ncl
