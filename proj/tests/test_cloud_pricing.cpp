#include <gtest/gtest.h>

#include <random>

#include "fcost/cloud_pricing.hpp"
#include "test_support.hpp"

using namespace fcost;
using namespace fcost::testing;

namespace {

PriceRecord cloud(std::string hw, std::string vendor, Date d, double usd, Commitment c) {
  return {std::move(hw), std::move(vendor), d, usd, PriceKind::cloud_hourly, c};
}

ModelRecord a100_model(std::string developer = "OpenAI") {
  auto m = model("M", make_date(2022, 6, 1), 1e23, "NVIDIA A100");
  m.developer = std::move(developer);
  return m;
}

CloudConfig siblings() {
  CloudConfig cfg;
  cfg.similar_hardware["NVIDIA A100"] = {"NVIDIA H100", "NVIDIA V100"};
  return cfg;
}

}  // namespace

TEST(PreferredProvider, Mapping) {
  EXPECT_EQ(preferred_provider("Google DeepMind"), "Google Cloud");
  EXPECT_EQ(preferred_provider("OpenAI"), "Microsoft Azure");
  EXPECT_EQ(preferred_provider("Some Startup"), "Amazon Web Services");
  CloudConfig cfg;
  cfg.default_provider = "Oracle";
  EXPECT_EQ(preferred_provider("Some Startup", cfg), "Oracle");
}

TEST(ProcurementDate, Examples) {
  auto m = model("M", make_date(2023, 6, 30), 1e23);
  m.training_time_hours = 30 * 24;
  EXPECT_EQ(procurement_date(m), make_date(2023, 3, 31));
  m.training_time_hours.reset();
  // Calendar months are subtracted after the training days.
  EXPECT_EQ(procurement_date(m), make_date(2023, 3, 28));
  m.training_time_hours = 0;
  EXPECT_EQ(procurement_date(m), make_date(2023, 4, 30));
}

TEST(MatchPrice, ExactRecordIsLevelZero) {
  const auto t = make_date(2022, 1, 1);
  const std::vector<PriceRecord> prices{cloud("NVIDIA A100", "Microsoft Azure", t, 1.36, Commitment::three_year),
                                        cloud("NVIDIA A100", "Microsoft Azure", t, 3.40, Commitment::on_demand)};
  const auto q = match_price(a100_model(), prices, {}, t);
  EXPECT_EQ(q.fallback_level, 0);
  EXPECT_DOUBLE_EQ(q.price_per_chip_hour, 1.36);
  EXPECT_EQ(q.provider, "Microsoft Azure");
}

TEST(MatchPrice, OnlyOneYearRecordIsLevelOne) {
  const auto t = make_date(2022, 1, 1);
  const std::vector<PriceRecord> prices{cloud("NVIDIA A100", "Microsoft Azure", t, 2.16, Commitment::one_year),
                                        cloud("NVIDIA A100", "Microsoft Azure", t, 3.40, Commitment::on_demand)};
  const auto q = match_price(a100_model(), prices, {}, t);
  EXPECT_EQ(q.fallback_level, 1);
  EXPECT_DOUBLE_EQ(q.price_per_chip_hour, 2.16);
}

TEST(MatchPrice, OtherProviderIsLevelTwo) {
  const auto t = make_date(2022, 1, 1);
  const std::vector<PriceRecord> prices{cloud("NVIDIA A100", "Amazon Web Services", t, 1.45, Commitment::three_year)};
  EXPECT_EQ(match_price(a100_model(), prices, {}, t).fallback_level, 2);
}

TEST(MatchPrice, SiblingHardwareLevels) {
  const auto t = make_date(2022, 1, 1);
  const std::vector<PriceRecord> prices{cloud("NVIDIA V100", "Amazon Web Services", t, 1.33, Commitment::three_year)};
  const auto q = match_price(a100_model(), prices, {}, t, siblings());
  EXPECT_EQ(q.fallback_level, 4);
  EXPECT_EQ(q.matched_record, prices[0]);
  EXPECT_DOUBLE_EQ(q.price_per_chip_hour, 1.33);
  const std::vector<PriceRecord> azure{cloud("NVIDIA V100", "Microsoft Azure", t, 1.35, Commitment::three_year)};
  EXPECT_EQ(match_price(a100_model(), azure, {}, t, siblings()).fallback_level, 3);
}

TEST(MatchPrice, ImputationTraceableToSourceRecord) {
  const auto t = make_date(2022, 1, 1);
  const std::vector<PriceRecord> prices{cloud("NVIDIA V100", "Amazon Web Services", t, 1.33, Commitment::three_year)};
  const std::vector<HardwareSpec> specs{gpu("NVIDIA A100", make_date(2020, 5, 14), 312e12),
                                        gpu("NVIDIA V100", make_date(2018, 3, 27), 125e12)};
  const auto q = match_price(a100_model(), prices, specs, t);
  EXPECT_EQ(q.fallback_level, 5);
  EXPECT_EQ(q.matched_record, prices[0]);
  const double expected = (312.0 / 125.0) * date_adjustment_factor(specs[1].release_date, specs[0].release_date, 0.14);
  EXPECT_NEAR(q.imputation_factor, expected, 1e-12);
  EXPECT_NEAR(q.price_per_chip_hour, 1.33 * expected, 1e-12);
}

TEST(MatchPrice, NoApplicablePrice) {
  const auto t = make_date(2022, 1, 1);
  EXPECT_THROW(match_price(a100_model(), std::vector<PriceRecord>{}, {}, t), NoApplicablePrice);
  // Level 5 needs specs for both chips.
  const std::vector<PriceRecord> prices{cloud("NVIDIA V100", "Amazon Web Services", t, 1.33, Commitment::three_year)};
  EXPECT_THROW(match_price(a100_model(), prices, {}, t), NoApplicablePrice);
  const std::vector<PriceRecord> purchases{{"NVIDIA A100", "NVIDIA", t, 15000, PriceKind::chip_purchase, std::nullopt}};
  EXPECT_THROW(match_price(a100_model(), purchases, {}, t), NoApplicablePrice);
}

TEST(MatchPrice, NearestDateAndEarlierOnTies) {
  const auto t = make_date(2022, 1, 1);
  const std::vector<PriceRecord> prices{
      cloud("NVIDIA A100", "Microsoft Azure", make_date(2021, 12, 22), 1.0, Commitment::three_year),
      cloud("NVIDIA A100", "Microsoft Azure", make_date(2022, 1, 11), 2.0, Commitment::three_year),
      cloud("NVIDIA A100", "Microsoft Azure", make_date(2020, 1, 1), 3.0, Commitment::three_year)};
  EXPECT_DOUBLE_EQ(match_price(a100_model(), prices, {}, t).price_per_chip_hour, 1.0);
  EXPECT_DOUBLE_EQ(match_price(a100_model(), prices, {}, make_date(2022, 1, 5)).price_per_chip_hour, 2.0);
}

TEST(MatchPrice, CommitmentPreferredOverDateWithinLevel) {
  const auto t = make_date(2022, 1, 1);
  const std::vector<PriceRecord> prices{
      cloud("NVIDIA A100", "Microsoft Azure", t, 3.40, Commitment::on_demand),
      cloud("NVIDIA A100", "Microsoft Azure", make_date(2021, 1, 1), 2.16, Commitment::one_year)};
  EXPECT_DOUBLE_EQ(match_price(a100_model(), prices, {}, t).price_per_chip_hour, 2.16);
}

TEST(MatchPrice, FallbackLevelIsMinimalOnRandomFixtures) {
  const std::vector<std::string> hardware{"NVIDIA A100", "NVIDIA V100", "NVIDIA H100", "Google TPU v4"};
  const std::vector<std::string> vendors{"Microsoft Azure", "Amazon Web Services", "Google Cloud"};
  const std::vector<Commitment> commitments{Commitment::on_demand, Commitment::one_year, Commitment::three_year};
  const std::vector<HardwareSpec> specs{gpu("NVIDIA A100", make_date(2020, 5, 14), 312e12),
                                        gpu("NVIDIA V100", make_date(2018, 3, 27), 125e12),
                                        gpu("NVIDIA H100", make_date(2022, 9, 21), 989e12),
                                        gpu("Google TPU v4", make_date(2021, 7, 1), 275e12)};
  const auto cfg = siblings();
  std::mt19937 rng(11);
  const auto m = a100_model();
  const auto t = make_date(2022, 1, 1);
  for (int trial = 0; trial < 400; ++trial) {
    std::vector<PriceRecord> prices;
    const int n = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < n; ++i)
      prices.push_back(cloud(hardware[rng() % hardware.size()], vendors[rng() % vendors.size()],
                             make_date(2020, 1, 1) + std::chrono::days(rng() % 900), 1.0 + (rng() % 100) / 10.0,
                             commitments[rng() % 3]));
    const auto q = match_price(m, prices, specs, t, cfg);
    for (int level = 0; level < q.fallback_level; ++level)
      for (const auto& p : prices) EXPECT_FALSE(eligible_at_level(level, p, m.hardware_type, "Microsoft Azure", cfg));
    EXPECT_TRUE(eligible_at_level(q.fallback_level, q.matched_record, m.hardware_type, "Microsoft Azure", cfg));
    const auto again = match_price(m, prices, specs, t, cfg);
    EXPECT_EQ(again.matched_record, q.matched_record);
    EXPECT_EQ(again.fallback_level, q.fallback_level);
  }
}

TEST(CloudCost, Product) {
  PriceQuote q;
  q.price_per_chip_hour = 1.99e6 / 1161261.0;
  EXPECT_NEAR(cloud_training_cost(1161261, q), 1.99e6, 1e-6);
  EXPECT_EQ(cloud_training_cost(0, q), 0.0);
  EXPECT_DOUBLE_EQ(cloud_training_cost(2000, q), 2 * cloud_training_cost(1000, q));
}
