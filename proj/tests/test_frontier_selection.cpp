#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "fcost/frontier_selection.hpp"
#include "test_support.hpp"

using namespace fcost;
using namespace fcost::testing;

namespace {

std::vector<ModelRecord> random_models(unsigned seed, int n) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> day(0, 2900);
  std::uniform_real_distribution<double> logc(20.0, 25.0);
  std::vector<ModelRecord> out;
  for (int i = 0; i < n; ++i) {
    // Coarse compute values so that ties occur.
    const double c = std::pow(10.0, std::round(logc(rng) * 4) / 4);
    out.push_back(model("m" + std::to_string(i), add_days(make_date(2015, 10, 1), day(rng)), c));
  }
  return out;
}

std::vector<std::string> names(const std::vector<ModelRecord>& ms) {
  std::vector<std::string> out;
  for (const auto& m : ms) out.push_back(m.name);
  return out;
}

}  // namespace

TEST(Selection, SingleModelIsSelected) {
  const std::vector<ModelRecord> ms{model("only", make_date(2020, 1, 1), 1e22)};
  EXPECT_EQ(select_frontier(ms, SelectionMethod::top_n_method(10)).size(), 1u);
}

TEST(Selection, IncreasingComputeSelectsEveryModel) {
  std::vector<ModelRecord> ms;
  for (int i = 0; i < 12; ++i) ms.push_back(model("m" + std::to_string(i), make_date(2016 + i / 2, 1 + 6 * (i % 2), 1), 1e20 * std::pow(2.0, i)));
  EXPECT_EQ(select_frontier(ms, SelectionMethod::top_n_method(3)).size(), 12u);
}

TEST(Selection, RankAtRelease) {
  const std::vector<ModelRecord> pool{model("a", make_date(2020, 1, 1), 5e22), model("b", make_date(2020, 6, 1), 5e22),
                                      model("c", make_date(2021, 1, 1), 9e22), model("d", make_date(2021, 2, 1), 1e21),
                                      model("late_giant", make_date(2022, 1, 1), 1e25)};
  EXPECT_EQ(rank_at_release(pool, pool[0]), 1);
  EXPECT_EQ(rank_at_release(pool, pool[1]), 2);  // tie with an earlier model
  EXPECT_EQ(rank_at_release(pool, pool[2]), 1);
  EXPECT_EQ(rank_at_release(pool, pool[3]), 4);  // below three earlier larger models
  EXPECT_EQ(rank_at_release(pool, pool[4]), 1);
}

TEST(Selection, SameDayTieBrokenByName) {
  const std::vector<ModelRecord> pool{model("zeta", make_date(2020, 1, 1), 1e22), model("alpha", make_date(2020, 1, 1), 1e22)};
  EXPECT_EQ(rank_at_release(pool, pool[1]), 1);
  EXPECT_EQ(rank_at_release(pool, pool[0]), 2);
  auto m = SelectionMethod::top_n_method(1);
  EXPECT_EQ(names(select_frontier(pool, m)), std::vector<std::string>{"alpha"});
}

TEST(Selection, PoolExcludesFinetunesOutOfWindowAndMissingCompute) {
  auto ft = model("ft", make_date(2021, 1, 1), 1e24);
  ft.finetune_parent = "base";
  auto nocompute = model("nc", make_date(2021, 1, 1), 1e24);
  nocompute.training_compute.reset();
  const std::vector<ModelRecord> ms{model("base", make_date(2020, 1, 1), 1e23), ft, nocompute,
                                    model("old", make_date(2015, 9, 30), 1e23), model("new", make_date(2024, 1, 1), 1e23)};
  SelectionMethod m;
  EXPECT_EQ(names(select_frontier(ms, m)), std::vector<std::string>{"base"});
  m.exclude_finetunes = false;
  EXPECT_EQ(names(select_frontier(ms, m)), (std::vector<std::string>{"base", "ft"}));
}

TEST(Selection, InvalidParametersRejected) {
  SelectionMethod m;
  m.n = 0;
  EXPECT_THROW(select_frontier({}, m), ConfigError);
  m = {};
  m.variant = SelectionMethod::Variant::compute_quantile;
  m.q = 1.0;
  EXPECT_THROW(select_frontier({}, m), ConfigError);
}

TEST(SelectionProperty, MonotoneInN) {
  for (unsigned seed = 1; seed <= 20; ++seed) {
    const auto ms = random_models(seed, 60);
    std::vector<std::string> prev;
    for (int n = 1; n <= 25; ++n) {
      const auto cur = names(select_frontier(ms, SelectionMethod::top_n_method(n)));
      const std::set<std::string> curset(cur.begin(), cur.end());
      for (const auto& p : prev) EXPECT_TRUE(curset.count(p)) << "seed " << seed << " N " << n << " lost " << p;
      prev = cur;
    }
  }
}

TEST(SelectionProperty, SelectedModelsHaveRankAtMostN) {
  for (unsigned seed = 1; seed <= 10; ++seed) {
    const auto ms = random_models(seed, 80);
    const auto method = SelectionMethod::top_n_method(5);
    const auto pool = selection_pool(ms, method);
    const auto sel = select_frontier(ms, method);
    for (const auto& m : sel) EXPECT_LE(rank_at_release(pool, m), 5);
    // Brute force: every model with rank <= N is selected.
    std::size_t expected = 0;
    for (const auto& m : pool) expected += rank_at_release(pool, m) <= 5;
    EXPECT_EQ(sel.size(), expected);
  }
}

TEST(SelectionProperty, RemovingANonSelectedModelLeavesSelectionUnchanged) {
  for (unsigned seed = 1; seed <= 10; ++seed) {
    const auto ms = random_models(seed, 50);
    const auto method = SelectionMethod::top_n_method(4);
    const auto base = names(select_frontier(ms, method));
    const std::set<std::string> selected(base.begin(), base.end());
    for (std::size_t i = 0; i < ms.size(); ++i) {
      if (selected.count(ms[i].name)) continue;
      auto fewer = ms;
      fewer.erase(fewer.begin() + static_cast<long>(i));
      EXPECT_EQ(names(select_frontier(fewer, method)), base) << "removed " << ms[i].name;
    }
  }
}

TEST(SelectionProperty, InputOrderDoesNotMatter) {
  auto ms = random_models(3, 40);
  const auto base = names(select_frontier(ms, SelectionMethod::top_n_method(6)));
  std::mt19937 rng(11);
  for (int k = 0; k < 5; ++k) {
    std::shuffle(ms.begin(), ms.end(), rng);
    EXPECT_EQ(names(select_frontier(ms, SelectionMethod::top_n_method(6))), base);
  }
}

TEST(SelectionVariants, ComputeQuantile) {
  // Strictly increasing compute: every model is at the maximum of models to date.
  std::vector<ModelRecord> ms;
  for (int i = 0; i < 6; ++i) ms.push_back(model("m" + std::to_string(i), make_date(2017 + i, 1, 1), std::pow(10.0, 20 + i)));
  ms.push_back(model("small", make_date(2023, 6, 1), 1e19));
  SelectionMethod m;
  m.variant = SelectionMethod::Variant::compute_quantile;
  m.q = 0.9;
  const auto sel = names(select_frontier(ms, m));
  EXPECT_EQ(sel.size(), 6u);
  EXPECT_EQ(std::count(sel.begin(), sel.end(), "small"), 0);
}

TEST(SelectionVariants, ResidualFromTrendPicksPositiveOutliers) {
  std::vector<ModelRecord> ms;
  for (int i = 0; i < 10; ++i) {
    const double bump = (i == 3) ? 2.0 : (i == 7 ? 1.0 : 0.0);
    ms.push_back(model("m" + std::to_string(i), make_date(2016 + i % 8, 1 + i / 8, 1), std::pow(10.0, 20 + 0.5 * (i % 8) + bump)));
  }
  SelectionMethod m;
  m.variant = SelectionMethod::Variant::residual_from_trend;
  m.top_fraction = 0.2;
  const auto sel = names(select_frontier(ms, m));
  EXPECT_EQ(sel, (std::vector<std::string>{"m3", "m7"}));
}
