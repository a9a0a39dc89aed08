#pragma once

#include "fcost/data_model.hpp"
#include "fcost/error.hpp"

namespace fcost {

struct EnergyParams {
  double energy_cost_rate = 0.0;       // USD/kWh
  double server_tdp_per_chip_kw = 0.0;
  double power_to_tdp_ratio = 0.75;
  double pue = 1.25;

  void validate() const {
    if (!(energy_cost_rate > 0 && server_tdp_per_chip_kw > 0))
      throw ConfigError("energy rate and server TDP must be positive");
    if (!(power_to_tdp_ratio > 0 && power_to_tdp_ratio <= 1))
      throw ConfigError("power-to-TDP ratio must be in (0,1]");
    if (pue < 1.0) throw ConfigError("PUE must be >= 1");
  }

  bool operator==(const EnergyParams&) const = default;
};

// Electricity price by publication year, server TDP by hardware, power ratio
// by manufacturer, PUE by developer.
inline EnergyParams energy_params_for(const ModelRecord& model, const HardwareSpec& hardware,
                                      const EconomicTables& econ) {
  return {econ.electricity_price(year_of(model.publication_date)), hardware.tdp_server_per_chip_kw,
          econ.power_ratio_for(hardware.manufacturer), econ.pue_for(model.developer)};
}

inline double energy_cost(double chip_hours, const EnergyParams& p) {
  return p.energy_cost_rate * p.server_tdp_per_chip_kw * p.power_to_tdp_ratio * p.pue * chip_hours;
}

/// Facility power needed for the training cluster, in kW.
inline double cluster_power_capacity(double hardware_quantity, double server_tdp_per_chip_kw, double pue) {
  return hardware_quantity * server_tdp_per_chip_kw * pue;
}

}  // namespace fcost
