#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "fcost/dates.hpp"
#include "fcost/error.hpp"

namespace fcost {

struct TrendPoint {
  Date date{};
  double value = 0.0;
  std::string label;
};

struct Interval {
  double low = 0.0;
  double high = 0.0;

  bool contains(double x) const { return low <= x && x <= high; }
  bool overlaps(const Interval& o) const { return low <= o.high && o.low <= high; }
  bool operator==(const Interval&) const = default;
};

/// Least-squares fit of log10(value) against fractional years since
/// 1970-01-01. Slope is in orders of magnitude per year.
struct TrendFit {
  double slope = 0.0;
  double intercept = 0.0;  // log10(value) at 1970-01-01
  double slope_se = 0.0;
  Interval slope_ci_90;
  double r_squared = 0.0;
  std::size_t n = 0;
  std::vector<double> years;  // regressor, in input order
  std::vector<double> residuals;

  double predict_log10(Date d) const { return intercept + slope * (fractional_year(d) - 1970.0); }
  double predict(Date d) const { return std::pow(10.0, predict_log10(d)); }

  bool operator==(const TrendFit&) const = default;
};

inline double student_t_quantile(double p, double dof) {
  return boost::math::quantile(boost::math::students_t_distribution<double>(dof), p);
}

inline TrendFit fit_loglinear(std::span<const TrendPoint> points) {
  if (points.size() < 3) throw InsufficientData("log-linear fit needs at least 3 points, got " +
                                                std::to_string(points.size()));
  TrendFit fit;
  fit.n = points.size();
  std::vector<double> ys;
  ys.reserve(points.size());
  for (const auto& p : points) {
    if (!(p.value > 0)) throw DomainError("nonpositive value for '" + p.label + "'");
    fit.years.push_back(fractional_year(p.date) - 1970.0);
    ys.push_back(std::log10(p.value));
  }
  const double n = static_cast<double>(fit.n);
  const double xbar = std::accumulate(fit.years.begin(), fit.years.end(), 0.0) / n;
  const double ybar = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < fit.n; ++i) {
    const double dx = fit.years[i] - xbar;
    const double dy = ys[i] - ybar;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0)) throw InsufficientData("all points share one date");
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  double ssr = 0.0;
  fit.residuals.resize(fit.n);
  for (std::size_t i = 0; i < fit.n; ++i) {
    fit.residuals[i] = ys[i] - (fit.intercept + fit.slope * fit.years[i]);
    ssr += fit.residuals[i] * fit.residuals[i];
  }
  fit.r_squared = syy > 0 ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 1.0;
  fit.slope_se = std::sqrt(ssr / (n - 2.0) / sxx);
  const double t = student_t_quantile(0.95, n - 2.0);
  fit.slope_ci_90 = {fit.slope - t * fit.slope_se, fit.slope + t * fit.slope_se};
  return fit;
}

struct GrowthRates {
  double factor_per_year = 0.0;
  std::optional<double> doubling_months;  // undefined unless slope > 0
};

inline GrowthRates growth_conversions(double slope_oom_per_year) {
  GrowthRates g;
  g.factor_per_year = std::pow(10.0, slope_oom_per_year);
  if (slope_oom_per_year > 0) g.doubling_months = 12.0 * std::log10(2.0) / slope_oom_per_year;
  return g;
}

inline std::size_t newey_west_lag(std::size_t n) {
  return static_cast<std::size_t>(std::floor(0.75 * std::cbrt(static_cast<double>(n))));
}

/// Newey-West (Bartlett kernel) variance of the OLS slope, with residuals
/// ordered by date.
inline double hac_slope_variance(const TrendFit& fit) {
  std::vector<std::size_t> order(fit.n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return fit.years[a] < fit.years[b]; });
  const double xbar = std::accumulate(fit.years.begin(), fit.years.end(), 0.0) / static_cast<double>(fit.n);
  std::vector<double> u(fit.n);
  double sxx = 0.0;
  for (std::size_t k = 0; k < fit.n; ++k) {
    const double dx = fit.years[order[k]] - xbar;
    u[k] = dx * fit.residuals[order[k]];
    sxx += dx * dx;
  }
  const std::size_t lag = newey_west_lag(fit.n);
  double s = 0.0;
  for (double v : u) s += v * v;
  for (std::size_t l = 1; l <= lag && l < fit.n; ++l) {
    const double w = 1.0 - static_cast<double>(l) / static_cast<double>(lag + 1);
    double acc = 0.0;
    for (std::size_t t = l; t < fit.n; ++t) acc += u[t] * u[t - l];
    s += 2.0 * w * acc;
  }
  return std::max(s, 0.0) / (sxx * sxx);
}

/// Two-sided p-value for equal slopes using autocorrelation-robust errors.
inline double compare_slopes(const TrendFit& a, const TrendFit& b) {
  const double var = hac_slope_variance(a) + hac_slope_variance(b);
  const double scale = std::max({std::fabs(a.slope), std::fabs(b.slope), 1.0});
  if (!(var > 1e-24 * scale * scale) || !std::isfinite(var)) throw TestUnavailable("degenerate residuals");
  const double t = (a.slope - b.slope) / std::sqrt(var);
  const double dof = static_cast<double>(a.n + b.n) - 4.0;
  if (!(dof > 0)) throw TestUnavailable("not enough degrees of freedom");
  const boost::math::students_t_distribution<double> dist(dof);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t))));
}

inline double extrapolate_value(double anchor, Date anchor_date, double growth_factor, Date target) {
  return anchor * std::pow(growth_factor, years_between(anchor_date, target));
}

struct Crossing {
  double years = 0.0;  // negative when the target was already passed
  Date date{};
  bool in_past = false;
};

/// When a quantity growing by `growth_factor` per year reaches `target`.
inline Crossing extrapolate_crossing(double anchor, Date anchor_date, double growth_factor, double target) {
  if (!(anchor > 0) || !(target > 0)) throw DomainError("anchor and target must be positive");
  if (!(growth_factor > 1.0)) throw DomainError("growth factor must exceed 1 to solve for a crossing");
  Crossing c;
  c.years = std::log(target / anchor) / std::log(growth_factor);
  c.date = add_days(anchor_date, c.years * kDaysPerYear);
  c.in_past = c.years < 0;
  return c;
}

}  // namespace fcost
