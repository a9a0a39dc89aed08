#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "fcost/error.hpp"

namespace fcost::stats {

// Linearly interpolated sample quantile (Hyndman-Fan type 7).
inline double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw InsufficientData("quantile of empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline double quantile(std::vector<double> sample, double q) {
  std::sort(sample.begin(), sample.end());
  return quantile_sorted(sample, q);
}

inline double median(std::vector<double> sample) { return quantile(std::move(sample), 0.5); }

inline double mean(std::span<const double> xs) {
  if (xs.empty()) throw InsufficientData("mean of empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

// Three-point summary used for credible intervals.
struct Summary {
  double p05 = 0.0;
  double median = 0.0;
  double p95 = 0.0;

  bool operator==(const Summary&) const = default;
};

inline Summary summarize(std::vector<double> sample) {
  std::sort(sample.begin(), sample.end());
  return {quantile_sorted(sample, 0.05), quantile_sorted(sample, 0.5), quantile_sorted(sample, 0.95)};
}

}  // namespace fcost::stats
