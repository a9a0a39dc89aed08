#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fcost/cloud_pricing.hpp"
#include "fcost/data_model.hpp"
#include "fcost/energy_model.hpp"
#include "fcost/hardware_cost.hpp"
#include "fcost/uncertainty.hpp"

namespace fcost {

/// Constants and lookup tables shared by the three estimation methods.
struct PipelineParams {
  double depreciation_rate = 0.14;        // OOM/year, value loss during use
  double price_performance_rate = 0.14;   // OOM/year, for cross-date price imputation
  double gpu_acquisition_buffer_days = 90.0;
  double training_start_buffer_days = 60.0;
  double median_training_time_hours = kDefaultMedianTrainingHours;
  double default_utilization = 0.30;
  CostFactors factors;
  CloudConfig cloud;
  MatchTable pue_by_developer = default_pue_table();
  MatchTable power_ratio_by_manufacturer = default_power_ratio_table();
  std::map<std::string, TpuCostInputs> tpu_costs;  // keyed by hardware name

  void validate() const {
    if (!(depreciation_rate > 0)) throw ConfigError("depreciation_rate must be > 0");
    if (!(price_performance_rate > 0)) throw ConfigError("price_performance_rate must be > 0");
    if (!(default_utilization > 0 && default_utilization <= 1))
      throw ConfigError("default_utilization must be in (0,1]");
    if (gpu_acquisition_buffer_days < 0) throw ConfigError("gpu_acquisition_buffer_days must be >= 0");
    if (median_training_time_hours < 0) throw ConfigError("median_training_time must be >= 0");
    factors.validate();
    for (const auto& [name, t] : tpu_costs) t.validate();
  }

  // Economic tables with this run's PUE/power rules and depreciation rate.
  EconomicTables economics(const EconomicTables& base) const {
    EconomicTables e = base;
    e.pue_by_developer = pue_by_developer;
    e.power_ratio_by_manufacturer = power_ratio_by_manufacturer;
    e.depreciation_rate = depreciation_rate;
    return e;
  }

  bool operator==(const PipelineParams&) const = default;
};

/// Bundled TPU cost inputs: unrounded performance ratios against the H100
/// and the equivalent-GPU price estimates.
inline std::map<std::string, TpuCostInputs> default_tpu_costs() {
  auto make = [](double ratio, Date date, double equivalent) {
    TpuCostInputs t;
    t.performance_ratio = ratio;
    t.tpu_release_date = date;
    t.equivalent_gpu_price = equivalent;
    return t;
  };
  return {
      {"Google TPU v1", make(92.0 / 1979.0, make_date(2015, 5, 20), 11263.0)},
      {"Google TPU v2", make(0.09, make_date(2017, 7, 1), 9752.0)},
      {"Google TPU v3", make(123.0 / 989.4, make_date(2018, 7, 1), 10742.0)},
      {"Google TPU v4", make(275.0 / 989.4, make_date(2021, 7, 1), 12119.0)},
  };
}

struct AmortizedDetail {
  AcquisitionQuote acquisition;
  Date availability_date{};
  Date training_start{};
  StartValue start_value;
  double depreciation_rate = 0.0;
  double hardware_cost = 0.0;
  double energy_cost = 0.0;
  EnergyParams energy;
  // Split of the total into accelerator chips, rest of server, cluster
  // interconnect and energy.
  double chips = 0.0;
  double server_rest = 0.0;
  double interconnect = 0.0;
};

struct CloudDetail {
  PriceQuote quote;
  Date procurement_date{};
};

struct AcquisitionDetail {
  AcquisitionQuote acquisition;
  double hardware_quantity = 0.0;
};

struct CostEstimate {
  std::string model;
  CostMethod method = CostMethod::amortized;
  Date publication_date{};
  std::string developer;
  std::string hardware;
  bool tpu_estimated = false;
  bool selected = true;
  double chip_hours = 0.0;
  double cost = 0.0;  // USD
  std::optional<AmortizedDetail> amortized;
  std::optional<CloudDetail> cloud;
  std::optional<AcquisitionDetail> acquisition;
  std::vector<std::string> warnings;
};

struct EstimateFailure {
  std::string model;
  CostMethod method = CostMethod::amortized;
  std::string reason;
};

inline const HardwareSpec& require_hardware(const DatasetBundle& data, const ModelRecord& model) {
  const auto* spec = data.find_hardware(model.hardware_type);
  if (!spec) {
    if (model.hardware_type.empty()) throw UnderdeterminedRecord(model.name + " (hardware unknown)");
    throw NoPricePath(model.hardware_type);
  }
  return *spec;
}

inline AcquisitionQuote acquisition_quote_for(const DatasetBundle& data, const HardwareSpec& spec,
                                              const PipelineParams& params) {
  if (spec.kind == HardwareKind::tpu) {
    auto it = params.tpu_costs.find(spec.name);
    if (it == params.tpu_costs.end()) throw NoPricePath(spec.name);
    const auto tpu = tpu_production_cost(it->second, params.price_performance_rate);
    return acquisition_cost_per_chip(spec, nullptr, params.factors, tpu.final_cost);
  }
  return acquisition_cost_per_chip(spec, earliest_purchase_price(data.prices, spec.name), params.factors);
}

inline CostEstimate estimate_header(const ModelRecord& model, CostMethod method, const HardwareSpec& spec) {
  CostEstimate e;
  e.model = model.name;
  e.method = method;
  e.publication_date = model.publication_date;
  e.developer = model.developer;
  e.hardware = spec.name;
  e.tpu_estimated = spec.kind == HardwareKind::tpu;
  return e;
}

/// Amortized hardware CapEx plus energy for the final training run.
inline CostEstimate estimate_amortized(const ModelRecord& model, const DatasetBundle& data,
                                       const PipelineParams& params) {
  const auto& spec = require_hardware(data, model);
  auto e = estimate_header(model, CostMethod::amortized, spec);
  e.chip_hours = derive_chip_hours(model, &spec, params.default_utilization);

  AmortizedDetail d;
  d.acquisition = acquisition_quote_for(data, spec, params);
  d.availability_date = hardware_availability_date(spec, params.gpu_acquisition_buffer_days);
  d.training_start = infer_training_start(model, params.median_training_time_hours, params.training_start_buffer_days);
  d.depreciation_rate = params.depreciation_rate;
  d.start_value = start_value_per_chip(d.acquisition.per_chip, d.availability_date, d.training_start, d.depreciation_rate);
  if (d.start_value.clamped) e.warnings.push_back("training start precedes hardware availability; depreciation clamped to 0");
  d.hardware_cost = amortized_training_cost(d.start_value.value, e.chip_hours, d.depreciation_rate);
  d.energy = energy_params_for(model, spec, params.economics(data.econ));
  d.energy_cost = energy_cost(e.chip_hours, d.energy);

  const double server_share = d.hardware_cost / d.acquisition.server_to_cluster;
  d.interconnect = d.hardware_cost - server_share;
  d.chips = server_share / d.acquisition.chip_to_server;
  d.server_rest = server_share - d.chips;

  e.cost = d.hardware_cost + d.energy_cost;
  e.amortized = d;
  return e;
}

inline CostEstimate estimate_cloud(const ModelRecord& model, const DatasetBundle& data, const PipelineParams& params) {
  const HardwareSpec* spec = data.find_hardware(model.hardware_type);
  HardwareSpec placeholder;
  placeholder.name = model.hardware_type;
  auto e = estimate_header(model, CostMethod::cloud, spec ? *spec : placeholder);
  e.chip_hours = derive_chip_hours(model, spec, params.default_utilization);
  CloudDetail d;
  d.procurement_date = procurement_date(model, params.median_training_time_hours, params.cloud.procurement_buffer_months);
  d.quote = match_price(model, data.prices, data.hardware, d.procurement_date, params.cloud, params.price_performance_rate);
  if (d.quote.fallback_level > 0)
    e.warnings.push_back("cloud price fallback level " + std::to_string(d.quote.fallback_level));
  e.cost = cloud_training_cost(e.chip_hours, d.quote);
  e.cloud = d;
  return e;
}

inline CostEstimate estimate_acquisition(const ModelRecord& model, const DatasetBundle& data,
                                         const PipelineParams& params) {
  const auto& spec = require_hardware(data, model);
  auto e = estimate_header(model, CostMethod::acquisition, spec);
  if (!model.hardware_quantity) throw UnderdeterminedRecord(model.name + " (hardware_quantity unknown)");
  try {
    e.chip_hours = derive_chip_hours(model, &spec, params.default_utilization);
  } catch (const Error&) {
    // Chip-hours are informational for this method.
  }
  AcquisitionDetail d;
  d.acquisition = acquisition_quote_for(data, spec, params);
  d.hardware_quantity = *model.hardware_quantity;
  e.cost = hardware_acquisition_cost(d.hardware_quantity, d.acquisition.per_chip);
  e.acquisition = d;
  return e;
}

inline CostEstimate estimate(CostMethod method, const ModelRecord& model, const DatasetBundle& data,
                             const PipelineParams& params) {
  switch (method) {
    case CostMethod::amortized: return estimate_amortized(model, data, params);
    case CostMethod::cloud: return estimate_cloud(model, data, params);
    case CostMethod::acquisition: return estimate_acquisition(model, data, params);
  }
  throw ConfigError("unknown method");
}

struct EstimateSet {
  std::vector<CostEstimate> estimates;
  std::vector<EstimateFailure> failures;
};

/// Estimates every (model, method) pair. Per-model failures are recorded and
/// do not abort the run; output order follows the input order.
inline EstimateSet run_estimates(std::span<const ModelRecord> models, std::span<const CostMethod> methods,
                                 const DatasetBundle& data, const PipelineParams& params) {
  EstimateSet out;
  for (auto method : methods)
    for (const auto& model : models) {
      try {
        out.estimates.push_back(estimate(method, model, data, params));
      } catch (const Error& err) {
        out.failures.push_back({model.name, method, err.what()});
      }
    }
  return out;
}

inline double cluster_power_kw(const ModelRecord& model, const DatasetBundle& data, const PipelineParams& params) {
  const auto& spec = require_hardware(data, model);
  if (!model.hardware_quantity) throw UnderdeterminedRecord(model.name + " (hardware_quantity unknown)");
  return cluster_power_capacity(*model.hardware_quantity, spec.tdp_server_per_chip_kw,
                                params.pue_by_developer.lookup(model.developer));
}

}  // namespace fcost
