#include <gtest/gtest.h>

#include "fcost/data_model.hpp"
#include "test_support.hpp"

using namespace fcost;
using namespace fcost::testing;

namespace {
const std::string kHeader =
    "name,publication_date,developer,training_compute_flop,hardware_type,hardware_quantity,training_time_hours,"
    "training_chip_hours,utilization,known_training_start,finetune_parent\n";
}

TEST(LoadModels, WellFormedRowsLoadInOrder) {
  ValidationReport rep;
  const auto models = load_models(table(kHeader +
                                        "A,2020-01-01,X,1e22,NVIDIA A100,8,10,,,,\n"
                                        "B,2021-01-01,Y,2e22,NVIDIA A100,,,500,0.4,,\n"
                                        "C,2022-01-01,Z,3e22,NVIDIA V100,,,,,2021-11-01,B\n"),
                                  "m.csv", rep);
  ASSERT_EQ(models.size(), 3u);
  EXPECT_EQ(models[0].name, "A");
  EXPECT_EQ(models[1].training_chip_hours, 500.0);
  EXPECT_EQ(models[2].finetune_parent, "B");
  EXPECT_EQ(models[2].known_training_start, make_date(2021, 11, 1));
  EXPECT_TRUE(rep.issues.empty());
}

TEST(LoadModels, UtilizationAboveOneIsRejectedWithReason) {
  ValidationReport rep;
  const auto models = load_models(table(kHeader + "A,2020-01-01,X,1e22,NVIDIA A100,,,,1.3,,\n"
                                                  "B,2020-01-01,X,1e22,NVIDIA A100,,,,0.5,,\n"),
                                  "m.csv", rep);
  ASSERT_EQ(models.size(), 1u);
  EXPECT_EQ(models[0].name, "B");
  ASSERT_EQ(rep.issues.size(), 1u);
  EXPECT_EQ(rep.issues[0].reason, "utilization out of (0,1]");
  EXPECT_EQ(rep.issues[0].line, 2u);
  EXPECT_EQ(rep.rejected(), 1u);
}

TEST(LoadModels, RowInvariantViolationsAreRejected) {
  ValidationReport rep;
  const auto models = load_models(table(kHeader +
                                        "neg,2020-01-01,X,-1,NVIDIA A100,,,,,,\n"
                                        "badnum,2020-01-01,X,lots,NVIDIA A100,,,,,,\n"
                                        "baddate,2020-02-30,X,1e20,NVIDIA A100,,,,,,\n"
                                        "late,2020-01-01,X,1e20,NVIDIA A100,,,,,2020-02-01,\n"
                                        "zero_util,2020-01-01,X,1e20,NVIDIA A100,,,,0,,\n"),
                                  "m.csv", rep);
  EXPECT_TRUE(models.empty());
  EXPECT_EQ(rep.rejected(), 5u);
}

TEST(LoadModels, OutOfWindowAndUnderivableRowsAreFlaggedAndKept) {
  ValidationReport rep;
  const auto models = load_models(table(kHeader + "old,2014-01-01,X,1e20,NVIDIA K80,,,,,,\n"
                                                  "nohw,2020-01-01,X,,,,,,,,\n"),
                                  "m.csv", rep);
  EXPECT_EQ(models.size(), 2u);
  EXPECT_EQ(rep.rejected(), 0u);
  ASSERT_EQ(rep.issues.size(), 2u);
  EXPECT_EQ(rep.issues[0].reason, "publication_date outside study window");
  EXPECT_EQ(rep.issues[1].reason, "no chip-hour derivation path");
}

TEST(LoadModels, MissingRequiredColumnIsSchemaError) {
  ValidationReport rep;
  EXPECT_THROW(load_models(table("name,publication_date\nA,2020-01-01\n"), "m.csv", rep), SchemaError);
}

TEST(LoadOther, HardwarePricesAndElectricity) {
  ValidationReport rep;
  const auto hw = load_hardware(table("name,manufacturer,kind,release_date,peak_flops,tdp_chip_kw,tdp_server_per_chip_kw,"
                                      "chips_per_server\n"
                                      "G,NVIDIA,GPU,2020-05-14,3e14,0.4,0.8,8\n"
                                      "bad_tdp,NVIDIA,GPU,2020-05-14,3e14,0.4,0.3,8\n"
                                      "bad_kind,NVIDIA,FPGA,2020-05-14,3e14,0.4,0.8,8\n"
                                      "bad_peak,NVIDIA,GPU,2020-05-14,0,0.4,0.8,8\n"
                                      "bad_cps,NVIDIA,GPU,2020-05-14,3e14,0.4,0.8,0\n"),
                                "h.csv", rep);
  ASSERT_EQ(hw.size(), 1u);
  EXPECT_EQ(hw[0].kind, HardwareKind::gpu);
  EXPECT_EQ(rep.rejected(), 4u);

  ValidationReport prep;
  const auto prices = load_prices(table("hardware_type,vendor,price_date,price_usd,kind,commitment\n"
                                        "G,AWS,2021-01-01,1.5,cloud_hourly,3yr\n"
                                        "G,NVIDIA,2020-01-01,10000,chip_purchase,\n"
                                        "G,AWS,2021-01-01,1.5,cloud_hourly,\n"
                                        "G,NVIDIA,2020-01-01,10000,chip_purchase,1yr\n"
                                        "G,NVIDIA,2020-01-01,0,chip_purchase,\n"),
                                  "p.csv", prep);
  ASSERT_EQ(prices.size(), 2u);
  EXPECT_EQ(prices[0].commitment, Commitment::three_year);
  EXPECT_FALSE(prices[1].commitment);
  EXPECT_EQ(prep.rejected(), 3u);

  ValidationReport erep;
  const auto elec = load_electricity(table("year,usd_per_kwh\n2020,0.0667\n2021,-1\n"), "e.csv", erep);
  EXPECT_EQ(elec.size(), 1u);
  EXPECT_EQ(erep.rejected(), 1u);
}

TEST(LoadDatasets, FixtureLoadsCleanlyAndDeterministically) {
  const auto a = load_fixture();
  const auto b = load_fixture();
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.models.size(), 5u);
  EXPECT_EQ(a.hardware.size(), 9u);
  EXPECT_TRUE(a.report.issues.empty()) << a.report.to_text();
  EXPECT_EQ(a.models[3].name, "OPT-175B");
}

TEST(EconomicTables, LookupsAndValidation) {
  EconomicTables e;
  e.electricity_price_by_year = {{2020, 0.0667}, {2022, 0.0832}};
  EXPECT_DOUBLE_EQ(e.electricity_price(2022), 0.0832);
  EXPECT_DOUBLE_EQ(e.electricity_price(2021), 0.0667);  // equidistant: earlier year
  EXPECT_DOUBLE_EQ(e.electricity_price(2030), 0.0832);
  EXPECT_DOUBLE_EQ(e.pue_for("Google DeepMind"), 1.1);
  EXPECT_DOUBLE_EQ(e.pue_for("BigScience"), 1.25);
  EXPECT_DOUBLE_EQ(e.power_ratio_for("Google"), 0.43);
  EXPECT_DOUBLE_EQ(e.power_ratio_for("NVIDIA"), 0.75);
  e.pue_by_developer.fallback = 0.9;
  EXPECT_THROW(e.validate(), ConfigError);
}

TEST(DeriveChipHours, RecordedValueWins) {
  auto m = model("BLOOM", make_date(2022, 7, 1), 3.65e23);
  m.training_chip_hours = 1161261;
  m.training_time_hours = 10;
  m.hardware_quantity = 10;
  EXPECT_DOUBLE_EQ(derive_chip_hours(m, nullptr, 0.3), 1161261.0);
}

TEST(DeriveChipHours, TimeTimesQuantity) {
  auto m = model("OPT", make_date(2022, 5, 2), 4.3e23);
  m.training_time_hours = 793.5;
  m.hardware_quantity = 992;
  EXPECT_DOUBLE_EQ(derive_chip_hours(m, nullptr, 0.3), 787152.0);
}

TEST(DeriveChipHours, FromComputeAndAchievedThroughput) {
  auto m = model("X", make_date(2022, 5, 2), 3.1104e22);
  m.utilization = 0.5;
  const auto h = gpu("G", make_date(2020, 1, 1), 3e14);
  EXPECT_NEAR(derive_chip_hours(m, &h, 0.3), 57600.0, 1e-6);
  m.utilization.reset();
  EXPECT_NEAR(derive_chip_hours(m, &h, 0.3), 96000.0, 1e-6);
}

TEST(DeriveChipHours, UnderdeterminedRecordNamesModel) {
  ModelRecord m;
  m.name = "Mystery";
  m.publication_date = make_date(2021, 1, 1);
  try {
    derive_chip_hours(m, nullptr, 0.3);
    FAIL();
  } catch (const UnderdeterminedRecord& e) {
    EXPECT_NE(std::string(e.what()).find("Mystery"), std::string::npos);
    EXPECT_EQ(e.category(), ErrorCategory::data);
  }
}

TEST(DeriveChipHours, MonotoneInComputeAndUtilization) {
  const auto h = gpu("G", make_date(2020, 1, 1));
  double prev = 0;
  for (double c = 1e20; c < 1e25; c *= 3.7) {
    auto m = model("X", make_date(2022, 1, 1), c);
    const double v = derive_chip_hours(m, &h, 0.3);
    EXPECT_GT(v, prev);
    prev = v;
  }
  prev = 1e300;
  for (double u = 0.05; u <= 1.0; u += 0.05) {
    auto m = model("X", make_date(2022, 1, 1), 1e23);
    m.utilization = u;
    const double v = derive_chip_hours(m, &h, 0.3);
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(InferTrainingStart, KnownStartWins) {
  auto m = model("X", make_date(2023, 6, 30), 1e23);
  m.known_training_start = make_date(2022, 1, 1);
  EXPECT_EQ(infer_training_start(m), make_date(2022, 1, 1));
}

TEST(InferTrainingStart, SubtractsTrainingTimeAndBuffer) {
  auto m = model("X", make_date(2023, 6, 30), 1e23);
  m.training_time_hours = 30 * 24;
  EXPECT_EQ(infer_training_start(m), make_date(2023, 4, 1));
  m.training_time_hours.reset();
  EXPECT_EQ(infer_training_start(m), make_date(2023, 3, 29));
}

TEST(InferTrainingStart, NeverAfterPublication) {
  for (double hours : {0.0, 1.0, 100.0, 5000.0})
    for (double buffer : {0.0, 15.0, 60.0}) {
      auto m = model("X", make_date(2021, 3, 3), 1e23);
      m.training_time_hours = hours;
      EXPECT_LE(infer_training_start(m, 792, buffer), m.publication_date);
    }
}
