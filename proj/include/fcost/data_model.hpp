#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fcost/csv.hpp"
#include "fcost/dates.hpp"
#include "fcost/error.hpp"

namespace fcost {

struct ModelRecord {
  std::string name;
  Date publication_date{};
  std::string developer;
  std::optional<double> training_compute;  // FLOP
  std::string hardware_type;
  std::optional<double> hardware_quantity;
  std::optional<double> training_time_hours;
  std::optional<double> training_chip_hours;
  std::optional<double> utilization;
  std::optional<Date> known_training_start;
  std::optional<std::string> finetune_parent;

  bool operator==(const ModelRecord&) const = default;
};

enum class HardwareKind { gpu, tpu };

struct HardwareSpec {
  std::string name;
  std::string manufacturer;
  HardwareKind kind = HardwareKind::gpu;
  Date release_date{};
  double peak_flops = 0.0;  // FLOP/s at the format used for training
  double tdp_chip_kw = 0.0;
  double tdp_server_per_chip_kw = 0.0;
  int chips_per_server = 1;
  double memory_gb = 0.0;

  bool operator==(const HardwareSpec&) const = default;
};

enum class PriceKind { chip_purchase, server_purchase, cloud_hourly };
enum class Commitment { on_demand, one_year, three_year };

struct PriceRecord {
  std::string hardware_type;
  std::string vendor;
  Date price_date{};
  double price_usd = 0.0;
  PriceKind kind = PriceKind::chip_purchase;
  std::optional<Commitment> commitment;

  bool operator==(const PriceRecord&) const = default;
};

inline std::string to_string(HardwareKind k) { return k == HardwareKind::tpu ? "TPU" : "GPU"; }

inline std::string to_string(PriceKind k) {
  switch (k) {
    case PriceKind::chip_purchase: return "chip_purchase";
    case PriceKind::server_purchase: return "server_purchase";
    case PriceKind::cloud_hourly: return "cloud_hourly";
  }
  return "?";
}

inline std::string to_string(Commitment c) {
  switch (c) {
    case Commitment::on_demand: return "on_demand";
    case Commitment::one_year: return "1yr";
    case Commitment::three_year: return "3yr";
  }
  return "?";
}

inline bool iequals_substr(std::string_view haystack, std::string_view needle) {
  if (needle.empty()) return false;
  auto lower = [](std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
  };
  return lower(haystack).find(lower(needle)) != std::string::npos;
}

// Ordered substring rules: the first key found (case-insensitive) inside the
// looked-up text wins; otherwise the fallback applies.
struct MatchTable {
  std::vector<std::pair<std::string, double>> rules;
  double fallback = 0.0;

  double lookup(std::string_view text) const {
    for (const auto& [key, value] : rules)
      if (iequals_substr(text, key)) return value;
    return fallback;
  }

  void set(const std::string& key, double value) {
    for (auto& rule : rules)
      if (rule.first == key) {
        rule.second = value;
        return;
      }
    rules.emplace_back(key, value);
  }

  bool operator==(const MatchTable&) const = default;
};

inline MatchTable default_pue_table() {
  return {{{"Google", 1.1}, {"Alphabet", 1.1}, {"DeepMind", 1.1}, {"Microsoft", 1.1},
           {"Meta", 1.1}, {"Facebook", 1.1}, {"Amazon", 1.1}},
          1.25};
}

inline MatchTable default_power_ratio_table() { return {{{"Google", 0.43}}, 0.75}; }

struct EconomicTables {
  std::map<int, double> electricity_price_by_year;  // USD/kWh
  MatchTable pue_by_developer = default_pue_table();
  MatchTable power_ratio_by_manufacturer = default_power_ratio_table();
  double depreciation_rate = 0.14;  // OOM/year

  // Price for the year, or the nearest tabulated year (earlier on ties).
  double electricity_price(int year) const {
    if (electricity_price_by_year.empty())
      throw ConfigError("electricity price table is empty");
    auto it = electricity_price_by_year.lower_bound(year);
    if (it != electricity_price_by_year.end() && it->first == year) return it->second;
    if (it == electricity_price_by_year.begin()) return it->second;
    auto prev = std::prev(it);
    if (it == electricity_price_by_year.end()) return prev->second;
    return (year - prev->first <= it->first - year) ? prev->second : it->second;
  }

  double pue_for(std::string_view developer) const { return pue_by_developer.lookup(developer); }
  double power_ratio_for(std::string_view manufacturer) const {
    return power_ratio_by_manufacturer.lookup(manufacturer);
  }

  void validate() const {
    if (!(depreciation_rate > 0)) throw ConfigError("depreciation_rate must be > 0");
    for (const auto& [k, v] : pue_by_developer.rules)
      if (v < 1.0) throw ConfigError("PUE for '" + k + "' must be >= 1");
    if (pue_by_developer.fallback < 1.0) throw ConfigError("default PUE must be >= 1");
    auto check_ratio = [](const std::string& k, double v) {
      if (!(v > 0 && v <= 1)) throw ConfigError("power ratio for '" + k + "' must be in (0,1]");
    };
    for (const auto& [k, v] : power_ratio_by_manufacturer.rules) check_ratio(k, v);
    check_ratio("default", power_ratio_by_manufacturer.fallback);
    for (const auto& [y, p] : electricity_price_by_year)
      if (!(p > 0)) throw ConfigError("electricity price for " + std::to_string(y) + " must be > 0");
  }

  bool operator==(const EconomicTables&) const = default;
};

struct ValidationIssue {
  enum class Severity { rejected, flagged };
  std::string file;
  std::size_t line = 0;
  std::string record;
  std::string reason;
  Severity severity = Severity::rejected;

  bool operator==(const ValidationIssue&) const = default;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  std::size_t rejected() const {
    return static_cast<std::size_t>(std::count_if(issues.begin(), issues.end(), [](const auto& i) {
      return i.severity == ValidationIssue::Severity::rejected;
    }));
  }

  std::string to_text() const {
    std::string out;
    for (const auto& i : issues) {
      out += i.severity == ValidationIssue::Severity::rejected ? "REJECTED " : "FLAGGED  ";
      out += i.file + ":" + std::to_string(i.line) + " [" + i.record + "] " + i.reason + "\n";
    }
    return out;
  }

  bool operator==(const ValidationReport&) const = default;
};

struct DatasetBundle {
  std::vector<ModelRecord> models;
  std::vector<HardwareSpec> hardware;
  std::vector<PriceRecord> prices;
  EconomicTables econ;
  ValidationReport report;

  const HardwareSpec* find_hardware(std::string_view name) const {
    for (const auto& h : hardware)
      if (h.name == name) return &h;
    return nullptr;
  }

  const ModelRecord* find_model(std::string_view name) const {
    for (const auto& m : models)
      if (m.name == name) return &m;
    return nullptr;
  }

  bool operator==(const DatasetBundle&) const = default;
};

struct LoadOptions {
  Date window_start = make_date(2015, 10, 1);
  Date window_end = make_date(2023, 12, 31);
};

namespace detail {

struct RowError {
  std::string reason;
};

inline std::optional<double> parse_number(const std::string& cell, const char* column) {
  if (cell.empty()) return std::nullopt;
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end)
    throw RowError{std::string("non-numeric ") + column + " '" + cell + "'"};
  return value;
}

inline double require_number(const std::string& cell, const char* column) {
  auto v = parse_number(cell, column);
  if (!v) throw RowError{std::string("missing ") + column};
  return *v;
}

inline std::optional<Date> parse_optional_date(const std::string& cell, const char* column) {
  if (cell.empty()) return std::nullopt;
  auto d = parse_date(cell);
  if (!d) throw RowError{std::string("invalid ") + column + " '" + cell + "'"};
  return d;
}

// Cell accessor that treats absent optional columns as empty.
class RowView {
 public:
  RowView(const csv::Table& table, const csv::Row& row) : table_(table), row_(row) {}

  const std::string& operator[](std::string_view column) const {
    static const std::string empty;
    for (std::size_t i = 0; i < table_.header.size(); ++i)
      if (table_.header[i] == column) return i < row_.cells.size() ? row_.cells[i] : empty;
    return empty;
  }

 private:
  const csv::Table& table_;
  const csv::Row& row_;
};

inline void require_columns(const csv::Table& table, std::initializer_list<std::string_view> columns,
                            const std::string& source) {
  for (auto c : columns) (void)table.column(c, source);
}

}  // namespace detail

/// Parses the models table. Rows that violate a record invariant are
/// dropped and reported; rows outside the study window are kept and flagged.
inline std::vector<ModelRecord> load_models(const csv::Table& table, const std::string& source,
                                            ValidationReport& report, const LoadOptions& options = {}) {
  detail::require_columns(table, {"name", "publication_date", "developer", "training_compute_flop",
                                  "hardware_type"},
                          source);
  std::vector<ModelRecord> out;
  for (const auto& row : table.rows) {
    detail::RowView cell(table, row);
    ModelRecord m;
    m.name = cell["name"];
    try {
      if (m.name.empty()) throw detail::RowError{"missing name"};
      auto pub = detail::parse_optional_date(cell["publication_date"], "publication_date");
      if (!pub) throw detail::RowError{"missing publication_date"};
      m.publication_date = *pub;
      m.developer = cell["developer"];
      m.training_compute = detail::parse_number(cell["training_compute_flop"], "training_compute_flop");
      m.hardware_type = cell["hardware_type"];
      m.hardware_quantity = detail::parse_number(cell["hardware_quantity"], "hardware_quantity");
      m.training_time_hours = detail::parse_number(cell["training_time_hours"], "training_time_hours");
      m.training_chip_hours = detail::parse_number(cell["training_chip_hours"], "training_chip_hours");
      m.utilization = detail::parse_number(cell["utilization"], "utilization");
      m.known_training_start = detail::parse_optional_date(cell["known_training_start"], "known_training_start");
      if (!cell["finetune_parent"].empty()) m.finetune_parent = cell["finetune_parent"];

      if (m.training_compute && !(*m.training_compute > 0))
        throw detail::RowError{"training_compute must be > 0"};
      if (m.utilization && !(*m.utilization > 0 && *m.utilization <= 1))
        throw detail::RowError{"utilization out of (0,1]"};
      if (m.hardware_quantity && *m.hardware_quantity < 0)
        throw detail::RowError{"hardware_quantity must be >= 0"};
      if (m.training_time_hours && *m.training_time_hours < 0)
        throw detail::RowError{"training_time_hours must be >= 0"};
      if (m.training_chip_hours && *m.training_chip_hours < 0)
        throw detail::RowError{"training_chip_hours must be >= 0"};
      if (m.known_training_start && *m.known_training_start > m.publication_date)
        throw detail::RowError{"known_training_start after publication_date"};
    } catch (const detail::RowError& e) {
      report.issues.push_back({source, row.line, m.name, e.reason, ValidationIssue::Severity::rejected});
      continue;
    }
    if (m.publication_date < options.window_start || m.publication_date > options.window_end)
      report.issues.push_back({source, row.line, m.name, "publication_date outside study window",
                               ValidationIssue::Severity::flagged});
    const bool derivable = m.training_chip_hours ||
                           (m.training_time_hours && m.hardware_quantity) ||
                           (m.training_compute && !m.hardware_type.empty());
    if (!derivable)
      report.issues.push_back({source, row.line, m.name, "no chip-hour derivation path",
                               ValidationIssue::Severity::flagged});
    out.push_back(std::move(m));
  }
  return out;
}

inline std::vector<HardwareSpec> load_hardware(const csv::Table& table, const std::string& source,
                                               ValidationReport& report) {
  detail::require_columns(table, {"name", "manufacturer", "kind", "release_date", "peak_flops",
                                  "tdp_chip_kw", "tdp_server_per_chip_kw", "chips_per_server"},
                          source);
  std::vector<HardwareSpec> out;
  for (const auto& row : table.rows) {
    detail::RowView cell(table, row);
    HardwareSpec h;
    h.name = cell["name"];
    try {
      if (h.name.empty()) throw detail::RowError{"missing name"};
      h.manufacturer = cell["manufacturer"];
      const auto& kind = cell["kind"];
      if (kind == "GPU") h.kind = HardwareKind::gpu;
      else if (kind == "TPU") h.kind = HardwareKind::tpu;
      else throw detail::RowError{"kind must be GPU or TPU"};
      auto rel = detail::parse_optional_date(cell["release_date"], "release_date");
      if (!rel) throw detail::RowError{"missing release_date"};
      h.release_date = *rel;
      h.peak_flops = detail::require_number(cell["peak_flops"], "peak_flops");
      h.tdp_chip_kw = detail::require_number(cell["tdp_chip_kw"], "tdp_chip_kw");
      h.tdp_server_per_chip_kw = detail::require_number(cell["tdp_server_per_chip_kw"], "tdp_server_per_chip_kw");
      h.chips_per_server = static_cast<int>(detail::require_number(cell["chips_per_server"], "chips_per_server"));
      h.memory_gb = detail::parse_number(cell["memory_gb"], "memory_gb").value_or(0.0);
      if (!(h.peak_flops > 0)) throw detail::RowError{"peak_flops must be > 0"};
      if (!(h.tdp_chip_kw > 0)) throw detail::RowError{"tdp_chip_kw must be > 0"};
      if (h.tdp_server_per_chip_kw < h.tdp_chip_kw)
        throw detail::RowError{"tdp_server_per_chip_kw must be >= tdp_chip_kw"};
      if (h.chips_per_server < 1) throw detail::RowError{"chips_per_server must be >= 1"};
    } catch (const detail::RowError& e) {
      report.issues.push_back({source, row.line, h.name, e.reason, ValidationIssue::Severity::rejected});
      continue;
    }
    out.push_back(std::move(h));
  }
  return out;
}

inline std::vector<PriceRecord> load_prices(const csv::Table& table, const std::string& source,
                                            ValidationReport& report) {
  detail::require_columns(table, {"hardware_type", "vendor", "price_date", "price_usd", "kind", "commitment"},
                          source);
  std::vector<PriceRecord> out;
  for (const auto& row : table.rows) {
    detail::RowView cell(table, row);
    PriceRecord p;
    p.hardware_type = cell["hardware_type"];
    try {
      if (p.hardware_type.empty()) throw detail::RowError{"missing hardware_type"};
      p.vendor = cell["vendor"];
      auto d = detail::parse_optional_date(cell["price_date"], "price_date");
      if (!d) throw detail::RowError{"missing price_date"};
      p.price_date = *d;
      p.price_usd = detail::require_number(cell["price_usd"], "price_usd");
      const auto& kind = cell["kind"];
      if (kind == "chip_purchase") p.kind = PriceKind::chip_purchase;
      else if (kind == "server_purchase") p.kind = PriceKind::server_purchase;
      else if (kind == "cloud_hourly") p.kind = PriceKind::cloud_hourly;
      else throw detail::RowError{"unknown price kind '" + kind + "'"};
      const auto& c = cell["commitment"];
      if (c == "on_demand") p.commitment = Commitment::on_demand;
      else if (c == "1yr") p.commitment = Commitment::one_year;
      else if (c == "3yr") p.commitment = Commitment::three_year;
      else if (!c.empty()) throw detail::RowError{"unknown commitment '" + c + "'"};
      if (!(p.price_usd > 0)) throw detail::RowError{"price must be > 0"};
      if (p.commitment.has_value() != (p.kind == PriceKind::cloud_hourly))
        throw detail::RowError{"commitment must be present iff kind is cloud_hourly"};
    } catch (const detail::RowError& e) {
      report.issues.push_back({source, row.line, p.hardware_type, e.reason, ValidationIssue::Severity::rejected});
      continue;
    }
    out.push_back(std::move(p));
  }
  return out;
}

inline std::map<int, double> load_electricity(const csv::Table& table, const std::string& source,
                                              ValidationReport& report) {
  detail::require_columns(table, {"year", "usd_per_kwh"}, source);
  std::map<int, double> out;
  for (const auto& row : table.rows) {
    detail::RowView cell(table, row);
    try {
      const int year = static_cast<int>(detail::require_number(cell["year"], "year"));
      const double price = detail::require_number(cell["usd_per_kwh"], "usd_per_kwh");
      if (!(price > 0)) throw detail::RowError{"usd_per_kwh must be > 0"};
      out[year] = price;
    } catch (const detail::RowError& e) {
      report.issues.push_back({source, row.line, cell["year"], e.reason, ValidationIssue::Severity::rejected});
    }
  }
  return out;
}

/// Loads the four CSV datasets. Missing files or required columns are fatal;
/// row-level problems land in the bundle's validation report.
inline DatasetBundle load_datasets(const std::string& models_path, const std::string& prices_path,
                                   const std::string& specs_path, const std::string& econ_path,
                                   const LoadOptions& options = {}) {
  DatasetBundle bundle;
  bundle.models = load_models(csv::read_file(models_path), models_path, bundle.report, options);
  bundle.prices = load_prices(csv::read_file(prices_path), prices_path, bundle.report);
  bundle.hardware = load_hardware(csv::read_file(specs_path), specs_path, bundle.report);
  bundle.econ.electricity_price_by_year = load_electricity(csv::read_file(econ_path), econ_path, bundle.report);
  return bundle;
}

/// Training chip-hours: the recorded value, else time x quantity, else
/// compute / achieved FLOP/s.
inline double derive_chip_hours(const ModelRecord& model, const HardwareSpec* spec, double default_utilization) {
  if (model.training_chip_hours) return *model.training_chip_hours;
  if (model.training_time_hours && model.hardware_quantity)
    return *model.training_time_hours * *model.hardware_quantity;
  if (model.training_compute && spec) {
    const double utilization = model.utilization.value_or(default_utilization);
    return *model.training_compute / (spec->peak_flops * utilization) / 3600.0;
  }
  throw UnderdeterminedRecord(model.name);
}

inline constexpr double kDefaultMedianTrainingHours = 33.0 * 24.0;

/// Start of the final training run: the recorded start, else publication
/// minus training time minus the evaluation/write-up buffer.
inline Date infer_training_start(const ModelRecord& model,
                                 double median_training_time_hours = kDefaultMedianTrainingHours,
                                 double start_buffer_days = 60.0) {
  if (model.known_training_start) return *model.known_training_start;
  const double hours = model.training_time_hours.value_or(median_training_time_hours);
  return add_days(model.publication_date, -(hours / 24.0 + start_buffer_days));
}

}  // namespace fcost
