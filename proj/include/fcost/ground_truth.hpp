#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fcost/estimates.hpp"

namespace fcost {

// Independently reported training costs.
inline constexpr double kOptTrainingHours = 793.5;
inline constexpr double kOptClusterCostPerHour = 2500.0;
inline constexpr double kBloomProjectCost = 3.0e6;
inline constexpr double kBloomFinalRunEnergyShare = 0.3724;

inline double opt_reported_cost() { return kOptTrainingHours * kOptClusterCostPerHour; }
inline double bloom_implied_cost() { return kBloomFinalRunEnergyShare * kBloomProjectCost; }

struct GroundTruthRow {
  std::string model;
  CostMethod method = CostMethod::cloud;
  std::optional<double> estimate;  // empty when the model was not estimated
  double reference_estimate = 0.0;  // previously published estimate, for comparison
  double truth = 0.0;
  std::optional<double> ratio;  // estimate / truth

  bool available() const { return estimate.has_value(); }
};

inline std::vector<GroundTruthRow> validate_ground_truth(std::span<const CostEstimate> estimates,
                                                         const std::string& bloom = "BLOOM-176B",
                                                         const std::string& opt = "OPT-175B") {
  struct Case {
    std::string model;
    CostMethod method;
    double reference;
    double truth;
  };
  const std::vector<Case> cases{
      {bloom, CostMethod::cloud, 1.99e6, bloom_implied_cost()},
      {bloom, CostMethod::amortized, 0.8e6, bloom_implied_cost()},
      {opt, CostMethod::cloud, 1.5e6, opt_reported_cost()},
      {opt, CostMethod::amortized, 0.7e6, opt_reported_cost()},
  };
  std::vector<GroundTruthRow> rows;
  for (const auto& c : cases) {
    GroundTruthRow row{c.model, c.method, std::nullopt, c.reference, c.truth, std::nullopt};
    for (const auto& e : estimates)
      if (e.model == c.model && e.method == c.method) {
        row.estimate = e.cost;
        row.ratio = e.cost / c.truth;
        break;
      }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace fcost
