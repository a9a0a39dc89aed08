#include <gtest/gtest.h>

#include "fcost/dev_cost.hpp"

using namespace fcost;

namespace {

StaffModel single_point_staff() {
  using D = IntervalDistribution;
  StaffModel s;
  s.roles.push_back({"contributor", 1, D::point(1.0)});
  s.base_salary = D::point(150e3);
  s.salary_overhead = D::point(1.32);
  s.equity = D::point(131e3);
  s.development_duration = D::point(1.0);
  return s;
}

DevCostInputs gpt3_like() {
  DevCostInputs in;
  in.chip_hours = 2.5e7;
  in.start_value_per_chip = 18000;
  in.energy = {0.0667, 0.4375, 0.75, 1.12};
  return in;
}

}  // namespace

TEST(DevComputeMultiplier, MedianAndLowerTail) {
  const auto s = parallel_draws<double>(
      100000, 8, [](RandomStream& r, std::size_t) { return sample_dev_compute_multiplier(r); }, 1);
  const auto sm = stats::summarize(s);
  EXPECT_NEAR(sm.median, 2.19, 0.05);
  EXPECT_NEAR(sm.p05, 1.2, 0.05);
  // GPT-3: at least 14% of compute ran outside the final training run.
  EXPECT_GT(sm.p05, 1.14);
}

TEST(StaffCost, HandEvaluated) {
  RandomStream r(1, 0);
  auto s = single_point_staff();
  EXPECT_NEAR(sample_staff_cost(s, r).total(), 329e3, 0.5);
  s.include_equity = false;
  EXPECT_NEAR(sample_staff_cost(s, r).total(), 198e3, 0.5);
  s.development_duration = IntervalDistribution::point(0.0);
  EXPECT_EQ(sample_staff_cost(s, r).total(), 0.0);
}

TEST(StaffCost, Validation) {
  StaffModel s;
  EXPECT_THROW(s.validate(), ConfigError);
  s.roles.push_back({"x", -1, default_fte()});
  EXPECT_THROW(s.validate(), ConfigError);
}

TEST(TotalDevCost, SeedFixesBreakdown) {
  const auto staff = StaffModel::uniform(25, IntervalDistribution::log_normal(0.5, 1.5));
  const auto a = total_dev_cost(gpt3_like(), staff, 20000, 77, 1);
  EXPECT_EQ(a, total_dev_cost(gpt3_like(), staff, 20000, 77, 4));
  EXPECT_NE(a, total_dev_cost(gpt3_like(), staff, 20000, 78, 1));
}

TEST(TotalDevCost, FractionsSumToOne) {
  const auto b = total_dev_cost(gpt3_like(), StaffModel::uniform(25, IntervalDistribution::point(1.0)), 10000, 1, 1);
  EXPECT_NEAR(b.hardware_fraction + b.energy_fraction + b.salary_fraction + b.equity_fraction, 1.0, 1e-12);
  EXPECT_GT(b.staff_fraction(), 0.0);
}

TEST(TotalDevCost, ZeroStaffLeavesComputeOnly) {
  auto staff = single_point_staff();
  staff.development_duration = IntervalDistribution::point(0.0);
  const auto b = total_dev_cost(gpt3_like(), staff, 5000, 1, 1);
  EXPECT_EQ(b.staff_fraction(), 0.0);
  EXPECT_NEAR(b.hardware_fraction + b.energy_fraction, 1.0, 1e-12);
}

TEST(TotalDevCost, EquityOffNeverIncreasesStaffFraction) {
  for (int n : {5, 25, 284})
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      auto with = StaffModel::uniform(n, IntervalDistribution::log_normal(0.5, 1.5));
      auto without = with;
      without.include_equity = false;
      const auto a = total_dev_cost(gpt3_like(), with, 5000, seed, 1);
      const auto b = total_dev_cost(gpt3_like(), without, 5000, seed, 1);
      EXPECT_LE(b.staff_fraction(), a.staff_fraction());
    }
}

TEST(TotalDevCost, CurrencyRescalingInvariant) {
  using D = IntervalDistribution;
  const double k = 0.92;
  auto staff = StaffModel::uniform(25, D::log_normal(0.5, 1.5));
  auto scaled = staff;
  scaled.base_salary = D::log_normal(140e3 * k, 160e3 * k);
  scaled.equity = D::log_normal(35e3 * k, 490e3 * k);
  auto in = gpt3_like();
  auto in_scaled = in;
  in_scaled.start_value_per_chip *= k;
  in_scaled.energy.energy_cost_rate *= k;
  const auto a = total_dev_cost(in, staff, 10000, 4, 1);
  const auto b = total_dev_cost(in_scaled, scaled, 10000, 4, 1);
  EXPECT_NEAR(a.hardware_fraction, b.hardware_fraction, 1e-9);
  EXPECT_NEAR(a.salary_fraction, b.salary_fraction, 1e-9);
  EXPECT_NEAR(a.equity_fraction, b.equity_fraction, 1e-9);
  EXPECT_NEAR(b.total.median / a.total.median, k, 1e-9);
}

TEST(TotalDevCost, RejectsTooFewSamples) {
  EXPECT_THROW(total_dev_cost(gpt3_like(), single_point_staff(), 999, 1), ConfigError);
}
