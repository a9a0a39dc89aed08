#pragma once

#include <charconv>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fcost/estimates.hpp"
#include "fcost/frontier_selection.hpp"
#include "fcost/trend_stats.hpp"

namespace fcost {

struct ScenarioOverrides {
  std::optional<double> depreciation_rate;
  std::optional<double> gpu_acquisition_buffer_days;
  std::optional<double> training_start_buffer_days;
  std::optional<SelectionMethod::Variant> selection_variant;
  std::optional<int> top_n;
  std::optional<double> quantile;
  std::optional<double> top_fraction;

  bool empty() const {
    return !depreciation_rate && !gpu_acquisition_buffer_days && !training_start_buffer_days && !selection_variant &&
           !top_n && !quantile && !top_fraction;
  }

  /// Builds overrides from key/value text; unknown keys are rejected.
  static ScenarioOverrides parse(const std::map<std::string, std::string>& kv) {
    ScenarioOverrides o;
    auto num = [](const std::string& key, const std::string& v) {
      double x = 0.0;
      auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
      if (ec != std::errc{} || p != v.data() + v.size())
        throw ConfigError("scenario override '" + key + "' is not a number: '" + v + "'");
      return x;
    };
    for (const auto& [k, v] : kv) {
      if (k == "depreciation_rate") o.depreciation_rate = num(k, v);
      else if (k == "gpu_acquisition_buffer_days") o.gpu_acquisition_buffer_days = num(k, v);
      else if (k == "training_start_buffer_days") o.training_start_buffer_days = num(k, v);
      else if (k == "top_n") o.top_n = static_cast<int>(num(k, v));
      else if (k == "quantile") o.quantile = num(k, v);
      else if (k == "top_fraction") o.top_fraction = num(k, v);
      else if (k == "selection") {
        if (v == "top_n") o.selection_variant = SelectionMethod::Variant::top_n;
        else if (v == "compute_quantile") o.selection_variant = SelectionMethod::Variant::compute_quantile;
        else if (v == "residual_from_trend") o.selection_variant = SelectionMethod::Variant::residual_from_trend;
        else throw ConfigError("unknown selection method '" + v + "'");
      } else {
        throw ConfigError("unrecognized scenario override '" + k + "'");
      }
    }
    return o;
  }

  void apply(PipelineParams& params, SelectionMethod& selection) const {
    if (depreciation_rate) params.depreciation_rate = *depreciation_rate;
    if (gpu_acquisition_buffer_days) params.gpu_acquisition_buffer_days = *gpu_acquisition_buffer_days;
    if (training_start_buffer_days) params.training_start_buffer_days = *training_start_buffer_days;
    if (selection_variant) selection.variant = *selection_variant;
    if (top_n) selection.n = *top_n;
    if (quantile) selection.q = *quantile;
    if (top_fraction) selection.top_fraction = *top_fraction;
  }
};

struct Scenario {
  std::string name;
  ScenarioOverrides overrides;
  std::optional<double> reference_change;  // mean relative cost change reported for this variation
};

struct ScenarioResult {
  std::string name;
  std::vector<std::pair<std::string, double>> relative_change;  // per model, scenario/base - 1
  double mean_relative_change = 0.0;
  std::size_t n_selected = 0;
  std::optional<TrendFit> fit;
  std::optional<double> reference_change;
  std::optional<bool> slope_within_base_ci;
};

inline std::vector<Scenario> scenario_suite() {
  auto sc = [](std::string name, std::map<std::string, std::string> kv, std::optional<double> ref = std::nullopt) {
    return Scenario{std::move(name), ScenarioOverrides::parse(kv), ref};
  };
  return {
      sc("depreciation_0.10", {{"depreciation_rate", "0.10"}}, -0.15),
      sc("depreciation_0.18", {{"depreciation_rate", "0.18"}}, 0.10),
      sc("depreciation_0.30", {{"depreciation_rate", "0.30"}}, 0.30),
      sc("long_depreciation_time", {{"gpu_acquisition_buffer_days", "0"}, {"training_start_buffer_days", "45"}}, -0.04),
      sc("short_depreciation_time", {{"gpu_acquisition_buffer_days", "180"}, {"training_start_buffer_days", "120"}}, 0.10),
      sc("top_3", {{"top_n", "3"}}),
      sc("top_5", {{"top_n", "5"}}),
      sc("top_10", {{"top_n", "10"}}),
      sc("top_20", {{"top_n", "20"}}),
      sc("compute_quantile_0.90", {{"selection", "compute_quantile"}, {"quantile", "0.9"}}),
      sc("residual_top_0.20", {{"selection", "residual_from_trend"}, {"top_fraction", "0.2"}}),
  };
}

namespace detail {

struct AmortizedRun {
  std::map<std::string, double> cost;
  std::optional<TrendFit> fit;
  std::size_t n_selected = 0;
};

inline AmortizedRun amortized_run(const DatasetBundle& data, const PipelineParams& params,
                                  const SelectionMethod& selection) {
  AmortizedRun run;
  const auto selected = select_frontier(data.models, selection);
  run.n_selected = selected.size();
  std::vector<TrendPoint> pts;
  for (const auto& m : selected) {
    try {
      const auto e = estimate_amortized(m, data, params);
      run.cost[m.name] = e.cost;
      if (e.cost > 0) pts.push_back({m.publication_date, e.cost, m.name});
    } catch (const Error&) {
    }
  }
  if (pts.size() >= 3) run.fit = fit_loglinear(pts);
  return run;
}

}  // namespace detail

/// Re-estimates amortized costs under the scenario's overrides and compares
/// them with the base configuration. Inputs are taken by const reference and
/// never modified.
inline ScenarioResult run_scenario(const PipelineParams& base_params, const SelectionMethod& base_selection,
                                   const Scenario& scenario, const DatasetBundle& data) {
  PipelineParams params = base_params;
  SelectionMethod selection = base_selection;
  scenario.overrides.apply(params, selection);
  params.validate();

  const auto base = detail::amortized_run(data, base_params, base_selection);
  const auto alt = detail::amortized_run(data, params, selection);

  ScenarioResult r;
  r.name = scenario.name;
  r.reference_change = scenario.reference_change;
  r.n_selected = alt.n_selected;
  r.fit = alt.fit;
  double sum = 0.0;
  for (const auto& [name, cost] : alt.cost) {
    auto it = base.cost.find(name);
    if (it == base.cost.end() || !(it->second > 0)) continue;
    const double change = cost / it->second - 1.0;
    r.relative_change.emplace_back(name, change);
    sum += change;
  }
  if (!r.relative_change.empty()) r.mean_relative_change = sum / static_cast<double>(r.relative_change.size());
  if (base.fit && alt.fit) r.slope_within_base_ci = base.fit->slope_ci_90.contains(alt.fit->slope);
  return r;
}

}  // namespace fcost
