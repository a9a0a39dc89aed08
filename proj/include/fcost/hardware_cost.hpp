#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>

#include "fcost/data_model.hpp"
#include "fcost/dates.hpp"
#include "fcost/error.hpp"

namespace fcost {

inline MatchTable default_chip_to_server_table() {
  return {{{"P100", 1.54}, {"V100", 1.69}, {"A100", 1.66}}, 1.64};
}

struct CostFactors {
  MatchTable chip_to_server = default_chip_to_server_table();
  double interconnect_fraction = 0.19;

  double chip_to_server_for(std::string_view hardware) const { return chip_to_server.lookup(hardware); }
  double server_to_cluster() const { return 1.0 / (1.0 - interconnect_fraction); }

  void validate() const {
    if (!(interconnect_fraction > 0 && interconnect_fraction < 1))
      throw ConfigError("interconnect_fraction must be in (0,1)");
    for (const auto& [k, v] : chip_to_server.rules)
      if (!(v > 1)) throw ConfigError("chip_to_server factor for '" + k + "' must be > 1");
    if (!(chip_to_server.fallback > 1)) throw ConfigError("default chip_to_server factor must be > 1");
  }

  bool operator==(const CostFactors&) const = default;
};

enum class AcquisitionRoute { chip_price, server_price, tpu_estimate };

inline std::string to_string(AcquisitionRoute r) {
  switch (r) {
    case AcquisitionRoute::chip_price: return "chip_price";
    case AcquisitionRoute::server_price: return "server_price";
    case AcquisitionRoute::tpu_estimate: return "tpu_estimate";
  }
  return "?";
}

struct AcquisitionQuote {
  double per_chip = 0.0;  // USD, including server and cluster overheads
  AcquisitionRoute route = AcquisitionRoute::chip_price;
  double base_price = 0.0;  // chip price, server price, or TPU chip cost
  double chip_to_server = 1.0;
  double server_to_cluster = 1.0;
  double chips_per_server = 1.0;  // divisor on the server_price route
  std::optional<PriceRecord> source;
};

/// Earliest purchase price (chip or server) for a hardware type; ties go to
/// the lower price.
inline const PriceRecord* earliest_purchase_price(std::span<const PriceRecord> prices, std::string_view hardware) {
  const PriceRecord* best = nullptr;
  for (const auto& p : prices) {
    if (p.hardware_type != hardware || p.kind == PriceKind::cloud_hourly) continue;
    if (!best || p.price_date < best->price_date ||
        (p.price_date == best->price_date && p.price_usd < best->price_usd))
      best = &p;
  }
  return best;
}

/// Cost to put one chip into a cluster: the chip (or its share of a
/// server), the rest of the server, and cluster-level interconnect.
inline AcquisitionQuote acquisition_cost_per_chip(const HardwareSpec& hardware, const PriceRecord* price,
                                                  const CostFactors& factors,
                                                  std::optional<double> tpu_chip_cost = std::nullopt) {
  AcquisitionQuote q;
  q.server_to_cluster = factors.server_to_cluster();
  q.chip_to_server = factors.chip_to_server_for(hardware.name);
  if (hardware.kind == HardwareKind::tpu) {
    if (!tpu_chip_cost) throw NoPricePath(hardware.name);
    q.route = AcquisitionRoute::tpu_estimate;
    q.base_price = *tpu_chip_cost;
    q.per_chip = q.base_price * q.chip_to_server * q.server_to_cluster;
    return q;
  }
  if (!price || price->kind == PriceKind::cloud_hourly) throw NoPricePath(hardware.name);
  q.source = *price;
  q.base_price = price->price_usd;
  if (price->kind == PriceKind::chip_purchase) {
    q.route = AcquisitionRoute::chip_price;
    q.per_chip = q.base_price * q.chip_to_server * q.server_to_cluster;
  } else {
    q.route = AcquisitionRoute::server_price;
    q.chips_per_server = hardware.chips_per_server;
    q.per_chip = q.base_price / hardware.chips_per_server * q.server_to_cluster;
  }
  return q;
}

inline double hardware_acquisition_cost(double hardware_quantity, double per_chip) {
  return per_chip * hardware_quantity;
}

inline double hardware_acquisition_cost(const ModelRecord& model, double per_chip) {
  if (!model.hardware_quantity) throw UnderdeterminedRecord(model.name + " (hardware_quantity unknown)");
  return hardware_acquisition_cost(*model.hardware_quantity, per_chip);
}

/// Price-performance adjustment between two dates: greater than 1 when
/// `target` predates `reference`.
inline double date_adjustment_factor(Date reference, Date target, double r) {
  return std::pow(10.0, r * years_between(target, reference));
}

struct TpuCostInputs {
  double reference_server_cost_per_chip = 8665.0;  // H100 DGX SuperPOD manufacturing cost
  double reference_chip_cost = 5346.0;
  Date reference_release_date = make_date(2022, 9, 21);
  double performance_ratio = 1.0;
  Date tpu_release_date = make_date(2022, 9, 21);
  double equivalent_gpu_price = 0.0;

  void validate() const {
    if (!(performance_ratio > 0 && performance_ratio <= 1))
      throw ConfigError("TPU performance_ratio must be in (0,1]");
    if (!(reference_server_cost_per_chip > 0 && reference_chip_cost > 0 && equivalent_gpu_price > 0))
      throw ConfigError("TPU cost inputs must be positive");
  }

  bool operator==(const TpuCostInputs&) const = default;
};

struct TpuCost {
  double date_adjustment = 1.0;
  double server_manufacturing_cost = 0.0;
  double chip_manufacturing_cost = 0.0;
  double equivalent_gpu_price = 0.0;
  double final_cost = 0.0;  // geometric mean of the low and high estimates
};

inline TpuCost tpu_production_cost(const TpuCostInputs& in, double r) {
  in.validate();
  TpuCost c;
  c.date_adjustment = date_adjustment_factor(in.reference_release_date, in.tpu_release_date, r);
  c.server_manufacturing_cost = in.reference_server_cost_per_chip * in.performance_ratio * c.date_adjustment;
  c.chip_manufacturing_cost =
      c.server_manufacturing_cost * (in.reference_chip_cost / in.reference_server_cost_per_chip);
  c.equivalent_gpu_price = in.equivalent_gpu_price;
  c.final_cost = std::sqrt(c.chip_manufacturing_cost * c.equivalent_gpu_price);
  return c;
}

/// When hardware becomes usable for training: GPUs ship a buffer after
/// release, TPUs count from announcement.
inline Date hardware_availability_date(const HardwareSpec& hardware, double gpu_buffer_days = 90.0) {
  if (hardware.kind == HardwareKind::tpu) return hardware.release_date;
  return add_days(hardware.release_date, gpu_buffer_days);
}

struct StartValue {
  double value = 0.0;
  double years_depreciated = 0.0;
  bool clamped = false;  // training started before the hardware was available
};

/// Value left after `years` of depreciation at `r` OOM/year.
inline double depreciated_value(double acquisition_cost, double years, double r) {
  return acquisition_cost / std::pow(10.0, r * years);
}

inline StartValue start_value_per_chip(double acquisition_cost, Date acquisition_date, Date training_start, double r) {
  StartValue s;
  s.years_depreciated = years_between(acquisition_date, training_start);
  if (s.years_depreciated < 0) {
    s.years_depreciated = 0.0;
    s.clamped = true;
  }
  s.value = depreciated_value(acquisition_cost, s.years_depreciated, r);
  return s;
}

/// Linearised amortisation over chip-hours.
inline double amortized_training_cost(double start_value, double chip_hours, double r) {
  return start_value * chip_hours / kHoursPerYear * r * std::numbers::ln10;
}

inline double amortized_training_cost_exact(double start_value, double n_chips, double training_years, double r) {
  return start_value * n_chips * (1.0 - std::pow(10.0, -r * training_years));
}

inline double expected_lifetime_from_failures(double cluster_size, double failures_per_week) {
  if (!(failures_per_week > 0)) throw DomainError("failures_per_week must be > 0");
  return cluster_size / failures_per_week / (kDaysPerYear / 7.0);
}

}  // namespace fcost
