#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "fcost/error.hpp"

namespace fcost {

using Date = std::chrono::sys_days;

inline constexpr double kDaysPerYear = 365.25;
inline constexpr double kHoursPerYear = 365.0 * 24.0;

inline Date make_date(int y, unsigned m, unsigned d) {
  return Date{std::chrono::year{y} / std::chrono::month{m} / std::chrono::day{d}};
}

// Strict ISO-8601 calendar date, YYYY-MM-DD.
inline std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int y = 0;
  unsigned m = 0, d = 0;
  std::string buf(text);
  char tail = 0;
  if (std::sscanf(buf.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3) return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                        std::chrono::day{d}};
  if (!ymd.ok()) return std::nullopt;
  return Date{ymd};
}

inline Date parse_date_or_throw(std::string_view text) {
  auto d = parse_date(text);
  if (!d) throw SchemaError("invalid date '" + std::string(text) + "', expected YYYY-MM-DD");
  return *d;
}

inline std::string format_date(Date date) {
  const std::chrono::year_month_day ymd{date};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

inline Date add_days(Date date, double days) {
  return date + std::chrono::days{static_cast<long>(std::floor(days + 0.5))};
}

// Calendar-month arithmetic; the day clamps to the end of the target month.
inline Date add_months(Date date, int months) {
  std::chrono::year_month_day ymd{date};
  const auto shifted = ymd.year() / ymd.month() + std::chrono::months{months};
  const auto last = std::chrono::year_month_day_last{shifted.year(), std::chrono::month_day_last{shifted.month()}};
  const auto day = std::min(ymd.day(), last.day());
  return Date{shifted.year() / shifted.month() / day};
}

inline double years_between(Date from, Date to) {
  return static_cast<double>((to - from).count()) / kDaysPerYear;
}

// Fractional year measured from 1970-01-01.
inline double fractional_year(Date date) {
  return 1970.0 + static_cast<double>(date.time_since_epoch().count()) / kDaysPerYear;
}

inline Date date_from_fractional_year(double year) {
  return Date{std::chrono::days{static_cast<long>(std::floor((year - 1970.0) * kDaysPerYear + 0.5))}};
}

inline int year_of(Date date) { return static_cast<int>(std::chrono::year_month_day{date}.year()); }

}  // namespace fcost
