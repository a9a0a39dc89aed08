#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fcost/energy_model.hpp"
#include "fcost/hardware_cost.hpp"
#include "fcost/random.hpp"
#include "fcost/stats.hpp"

namespace fcost {

inline IntervalDistribution default_dev_compute_multiplier() { return IntervalDistribution::log_normal(1.2, 4.0); }
inline IntervalDistribution default_fte() { return IntervalDistribution::log_normal(0.05, 0.80); }

struct StaffRole {
  std::string name;
  int count = 0;
  IntervalDistribution fte = default_fte();

  bool operator==(const StaffRole&) const = default;
};

struct StaffModel {
  std::vector<StaffRole> roles;
  IntervalDistribution base_salary = IntervalDistribution::log_normal(140e3, 160e3);
  IntervalDistribution equity = IntervalDistribution::log_normal(35e3, 490e3);
  IntervalDistribution salary_overhead = IntervalDistribution::log_normal(1.25, 1.4);
  IntervalDistribution development_duration = IntervalDistribution::point(1.0);  // years
  bool include_equity = true;

  static StaffModel uniform(int contributors, IntervalDistribution duration) {
    StaffModel s;
    s.roles.push_back({"contributor", contributors, default_fte()});
    s.development_duration = duration;
    return s;
  }

  int contributor_count() const {
    int n = 0;
    for (const auto& r : roles) n += r.count;
    return n;
  }

  void validate() const {
    if (contributor_count() < 1) throw ConfigError("staff model needs at least one contributor");
    for (const auto& r : roles) {
      if (r.count < 0) throw ConfigError("negative contributor count for role '" + r.name + "'");
      r.fte.validate();
    }
    base_salary.validate();
    equity.validate();
    salary_overhead.validate();
    development_duration.validate();
  }

  bool operator==(const StaffModel&) const = default;
};

struct StaffCostDraw {
  double salary = 0.0;  // base salary times overhead
  double equity = 0.0;

  double total() const { return salary + equity; }
};

/// One draw of R&D staff cost. Compensation and duration are drawn once per
/// sample; each contributor gets an independent FTE draw.
inline StaffCostDraw sample_staff_cost(const StaffModel& staff, RandomStream& stream) {
  const double salary = sample_interval(staff.base_salary, stream);
  const double overhead = sample_interval(staff.salary_overhead, stream);
  const double equity = sample_interval(staff.equity, stream);
  const double duration = sample_interval(staff.development_duration, stream);
  double fte_total = 0.0;
  for (const auto& role : staff.roles)
    for (int i = 0; i < role.count; ++i) fte_total += sample_interval(role.fte, stream);
  StaffCostDraw d;
  d.salary = fte_total * salary * overhead * duration;
  d.equity = staff.include_equity ? fte_total * equity * duration : 0.0;
  return d;
}

inline double sample_dev_compute_multiplier(RandomStream& stream) {
  return sample_interval(default_dev_compute_multiplier(), stream);
}

/// Compute-side inputs for one model's development cost.
struct DevCostInputs {
  double chip_hours = 0.0;  // final training run
  double start_value_per_chip = 0.0;
  double depreciation_rate = 0.14;
  EnergyParams energy;
  IntervalDistribution multiplier = default_dev_compute_multiplier();
};

struct DevCostBreakdown {
  stats::Summary hardware_amortized;
  stats::Summary energy;
  stats::Summary staff_salary;
  stats::Summary staff_equity;
  stats::Summary total;
  // Shares of the sum of component medians.
  double hardware_fraction = 0.0;
  double energy_fraction = 0.0;
  double salary_fraction = 0.0;
  double equity_fraction = 0.0;

  double staff_fraction() const { return salary_fraction + equity_fraction; }

  bool operator==(const DevCostBreakdown&) const = default;
};

inline DevCostBreakdown total_dev_cost(const DevCostInputs& in, const StaffModel& staff, std::size_t n_samples,
                                       std::uint64_t seed, unsigned workers = 0) {
  if (n_samples < 1000) throw ConfigError("development cost simulation needs n_samples >= 1000");
  staff.validate();
  in.multiplier.validate();

  struct Draw {
    double hardware, energy, salary, equity;
  };
  const auto draws = parallel_draws<Draw>(
      n_samples, seed,
      [&](RandomStream& s, std::size_t) {
        const double chip_hours = sample_interval(in.multiplier, s) * in.chip_hours;
        const auto staff_draw = sample_staff_cost(staff, s);
        return Draw{amortized_training_cost(in.start_value_per_chip, chip_hours, in.depreciation_rate),
                    energy_cost(chip_hours, in.energy), staff_draw.salary, staff_draw.equity};
      },
      workers);

  std::vector<double> hw(n_samples), en(n_samples), sal(n_samples), eq(n_samples), tot(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    hw[i] = draws[i].hardware;
    en[i] = draws[i].energy;
    sal[i] = draws[i].salary;
    eq[i] = draws[i].equity;
    tot[i] = hw[i] + en[i] + sal[i] + eq[i];
  }
  DevCostBreakdown b;
  b.hardware_amortized = stats::summarize(std::move(hw));
  b.energy = stats::summarize(std::move(en));
  b.staff_salary = stats::summarize(std::move(sal));
  b.staff_equity = stats::summarize(std::move(eq));
  b.total = stats::summarize(std::move(tot));
  const double sum = b.hardware_amortized.median + b.energy.median + b.staff_salary.median + b.staff_equity.median;
  if (sum > 0) {
    b.hardware_fraction = b.hardware_amortized.median / sum;
    b.energy_fraction = b.energy.median / sum;
    b.salary_fraction = b.staff_salary.median / sum;
    b.equity_fraction = b.staff_equity.median / sum;
  }
  return b;
}

}  // namespace fcost
