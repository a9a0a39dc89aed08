#include <gtest/gtest.h>

#include "fcost/config.hpp"
#include "fcost/estimates.hpp"
#include "test_support.hpp"

using namespace fcost;
using namespace fcost::testing;

namespace {

struct Fixture {
  DatasetBundle data = load_fixture();
  PipelineParams params = load_config(config_path("fixture.conf")).params;

  const ModelRecord& model(const std::string& name) const {
    for (const auto& m : data.models)
      if (m.name == name) return m;
    throw std::runtime_error("no model " + name);
  }
};

}  // namespace

TEST(Estimates, AmortizedMatchesOracle) {
  Fixture f;
  const std::pair<const char*, double> expected[] = {{"GPT-3 175B", 1818606.8363552326},
                                                     {"Gopher (280B)", 617830.4148661643},
                                                     {"PaLM (540B)", 3286767.021127097},
                                                     {"OPT-175B", 598667.2955977429},
                                                     {"BLOOM-176B", 765063.3762117227}};
  for (const auto& [name, cost] : expected) {
    const auto e = estimate_amortized(f.model(name), f.data, f.params);
    EXPECT_NEAR(e.cost, cost, 1e-9 * cost) << name;
    const auto& d = *e.amortized;
    EXPECT_NEAR(d.chips + d.server_rest + d.interconnect, d.hardware_cost, 1e-9 * d.hardware_cost);
    EXPECT_NEAR(e.cost, d.hardware_cost + d.energy_cost, 1e-9 * e.cost);
  }
}

TEST(Estimates, TrainingStartAndTpuCosts) {
  Fixture f;
  EXPECT_EQ(estimate_amortized(f.model("GPT-3 175B"), f.data, f.params).amortized->training_start, make_date(2020, 2, 25));
  EXPECT_EQ(estimate_amortized(f.model("BLOOM-176B"), f.data, f.params).amortized->training_start, make_date(2022, 8, 8));
  const auto gopher = estimate_amortized(f.model("Gopher (280B)"), f.data, f.params);
  EXPECT_TRUE(gopher.tpu_estimated);
  EXPECT_NEAR(gopher.amortized->acquisition.per_chip / (1.64 * (100.0 / 81.0)), 5278.845087883132, 1e-6);
  const auto palm = estimate_amortized(f.model("PaLM (540B)"), f.data, f.params);
  EXPECT_NEAR(palm.amortized->acquisition.per_chip / (1.64 * (100.0 / 81.0)), 5168.870064556243, 1e-6);
}

TEST(Estimates, CloudMatchesOracle) {
  Fixture f;
  const std::pair<const char*, double> expected[] = {{"GPT-3 175B", 4710000.0},
                                                     {"Gopher (280B)", 3391488.0},
                                                     {"PaLM (540B)", 13683916.8},
                                                     {"OPT-175B", 1141370.4},
                                                     {"BLOOM-176B", 1683828.45}};
  for (const auto& [name, cost] : expected)
    EXPECT_NEAR(estimate_cloud(f.model(name), f.data, f.params).cost, cost, 1e-6 * cost) << name;
  const auto gpt3 = estimate_cloud(f.model("GPT-3 175B"), f.data, f.params);
  EXPECT_EQ(gpt3.cloud->quote.provider, "Microsoft Azure");
  EXPECT_DOUBLE_EQ(gpt3.cloud->quote.price_per_chip_hour, 1.35);
}

TEST(Estimates, AcquisitionMatchesOracle) {
  Fixture f;
  const std::pair<const char*, double> expected[] = {{"GPT-3 175B", 229938271.60},
                                                     {"Gopher (280B)", 43778179.19},
                                                     {"PaLM (540B)", 64299212.09},
                                                     {"OPT-175B", 30464197.53},
                                                     {"BLOOM-176B", 11792592.59}};
  for (const auto& [name, cost] : expected)
    EXPECT_NEAR(estimate_acquisition(f.model(name), f.data, f.params).cost, cost, 0.01) << name;
}

TEST(Estimates, FailuresAreRecordedNotFatal) {
  Fixture f;
  auto models = f.data.models;
  auto broken = models.front();
  broken.name = "Unknown HW";
  broken.hardware_type = "Nonexistent";
  broken.hardware_quantity.reset();
  models.push_back(broken);
  const std::vector<CostMethod> methods{CostMethod::amortized, CostMethod::acquisition};
  const auto set = run_estimates(models, methods, f.data, f.params);
  EXPECT_EQ(set.estimates.size(), 10u);
  ASSERT_EQ(set.failures.size(), 2u);
  EXPECT_EQ(set.failures[0].model, "Unknown HW");
  EXPECT_EQ(set.estimates.front().model, models.front().name);
}

TEST(Estimates, ClusterPower) {
  Fixture f;
  EXPECT_NEAR(cluster_power_kw(f.model("OPT-175B"), f.data, f.params), 992 * 0.8125 * 1.1, 1e-9);
}
