#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "fcost/data_model.hpp"
#include "fcost/random.hpp"
#include "fcost/stats.hpp"
#include "fcost/trend_stats.hpp"

namespace fcost {

enum class CostMethod { amortized, acquisition, cloud };

inline std::string to_string(CostMethod m) {
  switch (m) {
    case CostMethod::amortized: return "amortized";
    case CostMethod::acquisition: return "acquisition";
    case CostMethod::cloud: return "cloud";
  }
  return "?";
}

inline CostMethod parse_cost_method(std::string_view s) {
  if (s == "amortized") return CostMethod::amortized;
  if (s == "acquisition") return CostMethod::acquisition;
  if (s == "cloud") return CostMethod::cloud;
  throw ConfigError("unknown cost method '" + std::string(s) + "'");
}

struct VariableSpec {
  std::string name;
  IntervalDistribution distribution;
  std::set<CostMethod> applicable_methods;

  bool operator==(const VariableSpec&) const = default;
};

// Variables each relative-uncertainty formula consumes.
inline const std::vector<std::string>& required_variables(CostMethod method) {
  static const std::vector<std::string> acquisition{"unit_price", "chip_to_server", "server_to_cluster",
                                                    "hardware_quantity"};
  static const std::vector<std::string> amortized{
      "unit_price",       "chip_to_server", "server_to_cluster", "depreciation_rate",
      "depreciation_years", "training_compute", "peak_flops",      "utilization",
      "energy_rate",      "server_tdp_per_chip", "power_ratio",   "pue"};
  switch (method) {
    case CostMethod::acquisition: return acquisition;
    case CostMethod::amortized: return amortized;
    case CostMethod::cloud: break;
  }
  throw ConfigError("no uncertainty formula for method '" + to_string(method) + "'");
}

/// Interval set per method and hardware class. Only the server-overhead
/// interval and the unit-cost accuracy factors (2 for GPUs, 4 for TPUs) are
/// published; the remaining intervals are reconstructed.
inline std::vector<VariableSpec> default_variable_set(CostMethod method, HardwareKind hardware_class) {
  using D = IntervalDistribution;
  const std::set<CostMethod> both{CostMethod::acquisition, CostMethod::amortized};
  const std::set<CostMethod> amort{CostMethod::amortized};
  const std::set<CostMethod> acq{CostMethod::acquisition};
  const bool tpu = hardware_class == HardwareKind::tpu;

  std::vector<VariableSpec> all{
      // GPU price known within a factor of 2, TPU production cost within 4.
      {"unit_price", tpu ? D::log_normal(5176.0 / 4.0, 5176.0 * 4.0) : D::log_normal(7500.0, 30000.0), both},
      {"chip_to_server", D::log_normal(1.3, 2.1), both},
      {"server_to_cluster", D::log_normal(1.15, 1.33), both},
      {"hardware_quantity", D::log_normal(0.85, 1.2), acq},
      {"depreciation_rate", D::normal(0.10, 0.18), amort},
      {"depreciation_years", D::log_normal(0.1, 1.0), amort},
      {"training_compute", D::log_normal(0.4e24, 2.5e24), amort},
      {"peak_flops", D::point(312e12), amort},
      {"utilization", D::normal(0.2, 0.5), amort},
      {"energy_rate", D::log_normal(0.06, 0.10), amort},
      {"server_tdp_per_chip", D::log_normal(0.6, 0.9), amort},
      {"power_ratio", D::log_normal(0.6, 0.9), amort},
      {"pue", D::log_normal(1.08, 1.4), amort},
  };
  if (method == CostMethod::cloud) throw ConfigError("no default variable set for method 'cloud'");
  std::vector<VariableSpec> out;
  for (auto& v : all)
    if (v.applicable_methods.count(method)) out.push_back(std::move(v));
  return out;
}

inline void validate_variable(const VariableSpec& v) {
  v.distribution.validate();
  if (v.distribution.kind == IntervalDistribution::Kind::normal_from_ci && v.name != "depreciation_rate" &&
      v.name != "utilization")
    throw ConfigError("variable '" + v.name + "' must not use a normal distribution");
}

namespace detail {

inline double truncated_utilization(const IntervalDistribution& d, RandomStream& s) {
  if (d.kind == IntervalDistribution::Kind::point) return d.low;
  for (int attempt = 0; attempt < 64; ++attempt) {
    const double u = sample_interval(d, s);
    if (u > 0.0 && u <= 1.0) return u;
  }
  return std::clamp(d.mu(), 1e-6, 1.0);
}

}  // namespace detail

/// Samples every variable, composes the cost formula for `method`, and
/// returns the 90% interval of the sample divided by its median.
inline Interval simulate_relative_uncertainty(CostMethod method, HardwareKind hardware_class,
                                              const std::vector<VariableSpec>& variables, std::size_t n_samples,
                                              std::uint64_t seed, unsigned workers = 0) {
  (void)hardware_class;
  if (n_samples < 10000) throw ConfigError("uncertainty simulation needs n_samples >= 10000");
  std::map<std::string, IntervalDistribution> by_name;
  for (const auto& v : variables) {
    validate_variable(v);
    by_name[v.name] = v.distribution;
  }
  const auto& needed = required_variables(method);
  std::vector<IntervalDistribution> dists;
  for (const auto& name : needed) {
    auto it = by_name.find(name);
    if (it == by_name.end()) throw IncompleteVariableSet(name);
    dists.push_back(it->second);
  }

  auto sample = parallel_draws<double>(
      n_samples, seed,
      [&](RandomStream& s, std::size_t) {
        std::vector<double> x(dists.size());
        for (std::size_t k = 0; k < dists.size(); ++k)
          x[k] = needed[k] == "utilization" ? detail::truncated_utilization(dists[k], s) : sample_interval(dists[k], s);
        const double per_chip = x[0] * x[1] * x[2];
        if (method == CostMethod::acquisition) return per_chip * x[3];
        const double r = x[3];
        const double chip_hours = x[5] / (x[6] * x[7]) / 3600.0;
        const double start_value = per_chip / std::pow(10.0, r * x[4]);
        const double hardware = start_value * chip_hours / kHoursPerYear * r * std::numbers::ln10;
        const double energy = x[8] * x[9] * x[10] * x[11] * chip_hours;
        return hardware + energy;
      },
      workers);

  std::sort(sample.begin(), sample.end());
  const double median = stats::quantile_sorted(sample, 0.5);
  if (!(median > 0)) throw DomainError("nonpositive median cost in uncertainty simulation");
  return {stats::quantile_sorted(sample, 0.05) / median, stats::quantile_sorted(sample, 0.95) / median};
}

}  // namespace fcost
