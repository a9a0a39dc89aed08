#pragma once

#include <cmath>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fcost/pipeline.hpp"

namespace fcost {

using ojson = nlohmann::ordered_json;

enum class ReportFormat { json, csv_bundle };

inline ReportFormat parse_report_format(std::string_view s) {
  if (s == "json") return ReportFormat::json;
  if (s == "csv" || s == "csv_bundle") return ReportFormat::csv_bundle;
  throw ConfigError("unknown report format '" + std::string(s) + "'");
}

/// Three significant figures, for display columns only.
inline std::string display_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

/// Shortest text that parses back to the same double.
inline std::string full_number(double x) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

namespace report_detail {

inline ojson opt(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

inline ojson price_json(const PriceRecord& p) {
  ojson j;
  j["hardware_type"] = p.hardware_type;
  j["vendor"] = p.vendor;
  j["price_date"] = format_date(p.price_date);
  j["price_usd"] = p.price_usd;
  j["kind"] = to_string(p.kind);
  j["commitment"] = p.commitment ? ojson(to_string(*p.commitment)) : ojson(nullptr);
  return j;
}

inline ojson acquisition_json(const AcquisitionQuote& q) {
  ojson j;
  j["route"] = to_string(q.route);
  j["base_price"] = q.base_price;
  j["chip_to_server"] = q.chip_to_server;
  j["server_to_cluster"] = q.server_to_cluster;
  j["chips_per_server"] = q.chips_per_server;
  j["per_chip"] = q.per_chip;
  j["source"] = q.source ? price_json(*q.source) : ojson(nullptr);
  return j;
}

inline ojson energy_json(const EnergyParams& e) {
  ojson j;
  j["energy_cost_rate"] = e.energy_cost_rate;
  j["server_tdp_per_chip_kw"] = e.server_tdp_per_chip_kw;
  j["power_to_tdp_ratio"] = e.power_to_tdp_ratio;
  j["pue"] = e.pue;
  return j;
}

inline ojson estimate_json(const CostEstimate& e) {
  ojson j;
  j["model"] = e.model;
  j["method"] = to_string(e.method);
  j["publication_date"] = format_date(e.publication_date);
  j["developer"] = e.developer;
  j["hardware"] = e.hardware;
  j["selected"] = e.selected;
  j["tpu_estimated"] = e.tpu_estimated;
  j["chip_hours"] = e.chip_hours;
  j["cost"] = e.cost;
  j["cost_display"] = display_number(e.cost);
  if (e.amortized) {
    const auto& d = *e.amortized;
    ojson a;
    a["acquisition"] = acquisition_json(d.acquisition);
    a["availability_date"] = format_date(d.availability_date);
    a["training_start"] = format_date(d.training_start);
    a["depreciation_rate"] = d.depreciation_rate;
    a["years_depreciated"] = d.start_value.years_depreciated;
    a["start_value_clamped"] = d.start_value.clamped;
    a["start_value_per_chip"] = d.start_value.value;
    a["energy"] = energy_json(d.energy);
    a["hardware_cost"] = d.hardware_cost;
    a["energy_cost"] = d.energy_cost;
    a["chips"] = d.chips;
    a["server_rest"] = d.server_rest;
    a["interconnect"] = d.interconnect;
    j["amortized"] = a;
  }
  if (e.cloud) {
    ojson c;
    c["procurement_date"] = format_date(e.cloud->procurement_date);
    c["provider"] = e.cloud->quote.provider;
    c["fallback_level"] = e.cloud->quote.fallback_level;
    c["imputation_factor"] = e.cloud->quote.imputation_factor;
    c["price_per_chip_hour"] = e.cloud->quote.price_per_chip_hour;
    c["matched_record"] = price_json(e.cloud->quote.matched_record);
    j["cloud"] = c;
  }
  if (e.acquisition) {
    ojson a;
    a["acquisition"] = acquisition_json(e.acquisition->acquisition);
    a["hardware_quantity"] = e.acquisition->hardware_quantity;
    j["acquisition"] = a;
  }
  j["warnings"] = e.warnings;
  return j;
}

inline ojson fit_json(const TrendFit& f) {
  const auto g = growth_conversions(f.slope);
  ojson j;
  j["n"] = f.n;
  j["slope_oom_per_year"] = f.slope;
  j["slope_ci_90"] = {f.slope_ci_90.low, f.slope_ci_90.high};
  j["slope_se"] = f.slope_se;
  j["intercept_log10_at_1970"] = f.intercept;
  j["r_squared"] = f.r_squared;
  j["growth_factor_per_year"] = g.factor_per_year;
  j["growth_factor_ci_90"] = {std::pow(10.0, f.slope_ci_90.low), std::pow(10.0, f.slope_ci_90.high)};
  j["growth_factor_display"] = display_number(g.factor_per_year);
  j["doubling_months"] = opt(g.doubling_months);
  return j;
}

inline ojson summary_json(const stats::Summary& s) { return {{"p05", s.p05}, {"median", s.median}, {"p95", s.p95}}; }

inline ojson devcost_json(const DevCostBreakdown& b) {
  ojson j;
  j["hardware_amortized"] = summary_json(b.hardware_amortized);
  j["energy"] = summary_json(b.energy);
  j["staff_salary"] = summary_json(b.staff_salary);
  j["staff_equity"] = summary_json(b.staff_equity);
  j["total"] = summary_json(b.total);
  j["fractions"] = {{"hardware", b.hardware_fraction},
                    {"energy", b.energy_fraction},
                    {"staff_salary", b.salary_fraction},
                    {"staff_equity", b.equity_fraction},
                    {"staff", b.staff_fraction()}};
  return j;
}

inline ojson breakdown_json(const BreakdownRow& r) {
  ojson j;
  j["model"] = r.model;
  j["chips"] = r.chips;
  j["server_rest"] = r.server_rest;
  j["interconnect"] = r.interconnect;
  j["energy"] = r.energy;
  j["fractions"] = {{"chips", r.fraction(r.chips)},
                    {"server_rest", r.fraction(r.server_rest)},
                    {"interconnect", r.fraction(r.interconnect)},
                    {"energy", r.fraction(r.energy)}};
  return j;
}

}  // namespace report_detail

inline ojson report_to_json(const Report& r) {
  using namespace report_detail;
  ojson j;
  ojson prov;
  prov["tool_version"] = r.provenance.tool_version;
  prov["config_sha256"] = r.provenance.config_hash;
  ojson hashes = ojson::object();
  for (const auto& [role, h] : r.provenance.dataset_hashes) hashes[role] = h;
  prov["dataset_sha256"] = hashes;
  prov["seed"] = r.provenance.seed;
  j["provenance"] = prov;

  j["selected"] = r.selected;
  ojson est = ojson::array();
  for (const auto& e : r.estimates) est.push_back(estimate_json(e));
  j["estimates"] = est;
  ojson fail = ojson::array();
  for (const auto& f : r.failures) fail.push_back({{"model", f.model}, {"method", to_string(f.method)}, {"reason", f.reason}});
  j["failures"] = fail;

  ojson trends = ojson::array();
  for (const auto& t : r.trends) {
    ojson tj;
    tj["series"] = t.name;
    tj["unit"] = t.unit;
    tj["excluded"] = t.excluded;
    tj["fit"] = t.fit ? fit_json(*t.fit) : ojson(nullptr);
    if (!t.note.empty()) tj["note"] = t.note;
    ojson pts = ojson::array();
    for (const auto& p : t.points) {
      ojson pj;
      pj["model"] = p.label;
      pj["date"] = format_date(p.date);
      pj["value"] = p.value;
      pj["fitted"] = t.fit ? ojson(t.fit->predict(p.date)) : ojson(nullptr);
      pts.push_back(pj);
    }
    tj["points"] = pts;
    trends.push_back(tj);
  }
  j["trends"] = trends;

  if (!r.breakdown.empty()) {
    ojson b = ojson::array();
    for (const auto& row : r.breakdown) b.push_back(breakdown_json(row));
    j["breakdown"] = b;
    if (r.breakdown_mean) {
      const auto& m = *r.breakdown_mean;
      j["breakdown_mean_fractions"] = {
          {"chips", m.chips}, {"server_rest", m.server_rest}, {"interconnect", m.interconnect}, {"energy", m.energy}};
    }
  }
  if (!r.dev_costs.empty()) {
    ojson d = ojson::array();
    for (const auto& row : r.dev_costs)
      d.push_back({{"model", row.model},
                   {"with_equity", devcost_json(row.with_equity)},
                   {"without_equity", devcost_json(row.without_equity)}});
    j["dev_costs"] = d;
  }
  if (!r.uncertainty.empty()) {
    ojson u = ojson::array();
    for (const auto& row : r.uncertainty)
      u.push_back({{"method", to_string(row.method)},
                   {"hardware_class", to_string(row.hardware_class)},
                   {"relative_ci_90", {row.relative.low, row.relative.high}}});
    j["uncertainty"] = u;
  }
  if (!r.scenarios.empty()) {
    ojson s = ojson::array();
    for (const auto& sc : r.scenarios) {
      ojson sj;
      sj["scenario"] = sc.name;
      sj["n_selected"] = sc.n_selected;
      sj["mean_relative_change"] = sc.mean_relative_change;
      sj["reference_change"] = opt(sc.reference_change);
      sj["fit"] = sc.fit ? fit_json(*sc.fit) : ojson(nullptr);
      sj["slope_within_base_ci"] = sc.slope_within_base_ci ? ojson(*sc.slope_within_base_ci) : ojson(nullptr);
      ojson per = ojson::object();
      for (const auto& [m, c] : sc.relative_change) per[m] = c;
      sj["relative_change"] = per;
      s.push_back(sj);
    }
    j["scenarios"] = s;
  }
  if (!r.ground_truth.empty()) {
    ojson g = ojson::array();
    for (const auto& row : r.ground_truth)
      g.push_back({{"model", row.model},
                   {"method", to_string(row.method)},
                   {"available", row.available()},
                   {"estimate", opt(row.estimate)},
                   {"reference_estimate", row.reference_estimate},
                   {"truth", row.truth},
                   {"ratio", opt(row.ratio)}});
    j["ground_truth"] = g;
  }
  ojson v = ojson::array();
  for (const auto& i : r.validation.issues)
    v.push_back({{"file", i.file},
                 {"line", i.line},
                 {"record", i.record},
                 {"severity", i.severity == ValidationIssue::Severity::rejected ? "rejected" : "flagged"},
                 {"reason", i.reason}});
  j["validation"] = v;
  return j;
}

namespace report_detail {

struct CsvWriter {
  std::ostringstream out;

  CsvWriter& row(std::initializer_list<std::string> cells) {
    bool first = true;
    for (const auto& c : cells) {
      if (!first) out << ',';
      out << csv::escape(c);
      first = false;
    }
    out << '\n';
    return *this;
  }
};

inline std::string num(double x) { return full_number(x); }
inline std::string num(const std::optional<double>& x) { return x ? full_number(*x) : ""; }

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write '" + path.string() + "': " + std::strerror(errno));
  f << bytes;
  if (!f) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace report_detail

/// One CSV document per output class, keyed by file name.
inline std::vector<std::pair<std::string, std::string>> report_to_csv_bundle(const Report& r) {
  using namespace report_detail;
  std::vector<std::pair<std::string, std::string>> files;

  CsvWriter prov;
  prov.row({"key", "value"});
  prov.row({"tool_version", r.provenance.tool_version});
  prov.row({"config_sha256", r.provenance.config_hash});
  for (const auto& [role, h] : r.provenance.dataset_hashes) prov.row({role + "_sha256", h});
  prov.row({"seed", std::to_string(r.provenance.seed)});
  files.emplace_back("provenance.csv", prov.out.str());

  CsvWriter est;
  est.row({"model", "method", "publication_date", "developer", "hardware", "selected", "tpu_estimated", "chip_hours",
           "cost_usd", "cost_display", "hardware_cost_usd", "energy_cost_usd", "fallback_level", "price_per_chip_hour",
           "warnings"});
  for (const auto& e : r.estimates) {
    std::string warnings;
    for (const auto& w : e.warnings) warnings += (warnings.empty() ? "" : "; ") + w;
    est.row({e.model, to_string(e.method), format_date(e.publication_date), e.developer, e.hardware,
             e.selected ? "true" : "false", e.tpu_estimated ? "true" : "false", num(e.chip_hours), num(e.cost),
             display_number(e.cost), e.amortized ? num(e.amortized->hardware_cost) : "",
             e.amortized ? num(e.amortized->energy_cost) : "",
             e.cloud ? std::to_string(e.cloud->quote.fallback_level) : "",
             e.cloud ? num(e.cloud->quote.price_per_chip_hour) : "", warnings});
  }
  files.emplace_back("estimates.csv", est.out.str());

  CsvWriter fail;
  fail.row({"model", "method", "reason"});
  for (const auto& f : r.failures) fail.row({f.model, to_string(f.method), f.reason});
  files.emplace_back("failures.csv", fail.out.str());

  CsvWriter pts, fits;
  pts.row({"series", "model", "date", "fractional_year", "value", "fitted_value"});
  fits.row({"series", "unit", "n", "excluded", "slope_oom_per_year", "slope_ci90_low", "slope_ci90_high", "r_squared",
            "intercept_log10_at_1970", "growth_factor_per_year", "growth_factor_display", "doubling_months"});
  for (const auto& t : r.trends) {
    for (const auto& p : t.points)
      pts.row({t.name, p.label, format_date(p.date), num(fractional_year(p.date)), num(p.value),
               t.fit ? num(t.fit->predict(p.date)) : ""});
    if (t.fit) {
      const auto g = growth_conversions(t.fit->slope);
      fits.row({t.name, t.unit, std::to_string(t.fit->n), std::to_string(t.excluded), num(t.fit->slope),
                num(t.fit->slope_ci_90.low), num(t.fit->slope_ci_90.high), num(t.fit->r_squared), num(t.fit->intercept),
                num(g.factor_per_year), display_number(g.factor_per_year), num(g.doubling_months)});
    } else {
      fits.row({t.name, t.unit, std::to_string(t.points.size()), std::to_string(t.excluded), "", "", "", "", "", "", "", ""});
    }
  }
  files.emplace_back("trend_points.csv", pts.out.str());
  files.emplace_back("trend_fits.csv", fits.out.str());

  if (!r.breakdown.empty()) {
    CsvWriter b;
    b.row({"model", "chips_usd", "server_rest_usd", "interconnect_usd", "energy_usd", "chips_fraction",
           "server_rest_fraction", "interconnect_fraction", "energy_fraction"});
    for (const auto& row : r.breakdown)
      b.row({row.model, num(row.chips), num(row.server_rest), num(row.interconnect), num(row.energy),
             num(row.fraction(row.chips)), num(row.fraction(row.server_rest)), num(row.fraction(row.interconnect)),
             num(row.fraction(row.energy))});
    if (r.breakdown_mean) {
      const auto& m = *r.breakdown_mean;
      b.row({"mean", "", "", "", "", num(m.chips), num(m.server_rest), num(m.interconnect), num(m.energy)});
    }
    files.emplace_back("breakdown.csv", b.out.str());
  }

  if (!r.dev_costs.empty()) {
    CsvWriter d;
    d.row({"model", "equity_included", "component", "p05_usd", "median_usd", "p95_usd", "fraction", "fraction_display"});
    for (const auto& row : r.dev_costs)
      for (const auto* b : {&row.with_equity, &row.without_equity}) {
        const std::string eq = b == &row.with_equity ? "true" : "false";
        auto line = [&](const char* name, const stats::Summary& s, double frac) {
          d.row({row.model, eq, name, num(s.p05), num(s.median), num(s.p95), num(frac), display_number(frac)});
        };
        line("hardware_amortized", b->hardware_amortized, b->hardware_fraction);
        line("energy", b->energy, b->energy_fraction);
        line("staff_salary", b->staff_salary, b->salary_fraction);
        line("staff_equity", b->staff_equity, b->equity_fraction);
        line("total", b->total, 1.0);
      }
    files.emplace_back("dev_costs.csv", d.out.str());
  }

  if (!r.uncertainty.empty()) {
    CsvWriter u;
    u.row({"method", "hardware_class", "relative_low", "relative_high", "display"});
    for (const auto& row : r.uncertainty)
      u.row({to_string(row.method), to_string(row.hardware_class), num(row.relative.low), num(row.relative.high),
             "(" + display_number(row.relative.low) + ", " + display_number(row.relative.high) + ")"});
    files.emplace_back("uncertainty.csv", u.out.str());
  }

  if (!r.scenarios.empty()) {
    CsvWriter s;
    s.row({"scenario", "n_selected", "mean_relative_change", "mean_relative_change_display", "reference_change",
           "slope_oom_per_year", "slope_within_base_ci"});
    for (const auto& sc : r.scenarios)
      s.row({sc.name, std::to_string(sc.n_selected), num(sc.mean_relative_change), display_number(sc.mean_relative_change),
             num(sc.reference_change), sc.fit ? num(sc.fit->slope) : "",
             sc.slope_within_base_ci ? (*sc.slope_within_base_ci ? "true" : "false") : ""});
    files.emplace_back("scenarios.csv", s.out.str());
  }

  if (!r.ground_truth.empty()) {
    CsvWriter g;
    g.row({"model", "method", "available", "estimate_usd", "reference_estimate_usd", "truth_usd", "ratio", "ratio_display"});
    for (const auto& row : r.ground_truth)
      g.row({row.model, to_string(row.method), row.available() ? "true" : "false", num(row.estimate),
             num(row.reference_estimate), num(row.truth), num(row.ratio), row.ratio ? display_number(*row.ratio) : ""});
    files.emplace_back("ground_truth.csv", g.out.str());
  }

  CsvWriter v;
  v.row({"file", "line", "record", "severity", "reason"});
  for (const auto& i : r.validation.issues)
    v.row({i.file, std::to_string(i.line), i.record,
           i.severity == ValidationIssue::Severity::rejected ? "rejected" : "flagged", i.reason});
  files.emplace_back("validation.csv", v.out.str());
  return files;
}

/// Writes the report into `dir` and returns the written paths.
inline std::vector<std::string> emit_report(const Report& r, ReportFormat format, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  std::vector<std::string> written;
  if (format == ReportFormat::json) {
    const auto path = dir / "report.json";
    report_detail::write_file(path, report_to_json(r).dump(2) + "\n");
    written.push_back(path.string());
  } else {
    for (const auto& [name, bytes] : report_to_csv_bundle(r)) {
      const auto path = dir / name;
      report_detail::write_file(path, bytes);
      written.push_back(path.string());
    }
  }
  return written;
}

struct AuditDiff {
  std::string model;
  std::string method;
  std::string field;
  double recorded = 0.0;
  double recomputed = 0.0;
};

/// Recomputes every estimate in a JSON report from the inputs recorded next
/// to it and lists fields that disagree beyond `rel_tol`.
inline std::vector<AuditDiff> audit_json(const ojson& report, double rel_tol = 1e-9) {
  std::vector<AuditDiff> diffs;
  auto check = [&](const ojson& e, const char* field, double recorded, double recomputed) {
    const double scale = std::max({std::abs(recorded), std::abs(recomputed), 1e-300});
    if (std::abs(recorded - recomputed) / scale > rel_tol)
      diffs.push_back({e.at("model").get<std::string>(), e.at("method").get<std::string>(), field, recorded, recomputed});
  };
  auto per_chip = [](const ojson& a) {
    const auto route = a.at("route").get<std::string>();
    const double base = a.at("base_price").get<double>();
    const double s2c = a.at("server_to_cluster").get<double>();
    if (route == "server_price") return base / a.at("chips_per_server").get<double>() * s2c;
    return base * a.at("chip_to_server").get<double>() * s2c;
  };
  for (const auto& e : report.at("estimates")) {
    const auto method = e.at("method").get<std::string>();
    const double chip_hours = e.at("chip_hours").get<double>();
    const double cost = e.at("cost").get<double>();
    if (method == "amortized" && e.contains("amortized")) {
      const auto& a = e.at("amortized");
      const auto& q = a.at("acquisition");
      const double pc = per_chip(q);
      check(e, "acquisition.per_chip", q.at("per_chip").get<double>(), pc);
      const auto avail = parse_date_or_throw(a.at("availability_date").get<std::string>());
      const auto start = parse_date_or_throw(a.at("training_start").get<std::string>());
      const double r = a.at("depreciation_rate").get<double>();
      const auto sv = start_value_per_chip(pc, avail, start, r);
      check(e, "start_value_per_chip", a.at("start_value_per_chip").get<double>(), sv.value);
      const double hw = amortized_training_cost(sv.value, chip_hours, r);
      check(e, "hardware_cost", a.at("hardware_cost").get<double>(), hw);
      const auto& en = a.at("energy");
      EnergyParams p{en.at("energy_cost_rate").get<double>(), en.at("server_tdp_per_chip_kw").get<double>(),
                     en.at("power_to_tdp_ratio").get<double>(), en.at("pue").get<double>()};
      const double energy = energy_cost(chip_hours, p);
      check(e, "energy_cost", a.at("energy_cost").get<double>(), energy);
      check(e, "cost", cost, hw + energy);
      check(e, "component_sum",
            a.at("chips").get<double>() + a.at("server_rest").get<double>() + a.at("interconnect").get<double>(), hw);
    } else if (method == "cloud" && e.contains("cloud")) {
      const auto& c = e.at("cloud");
      const double price = c.at("matched_record").at("price_usd").get<double>() * c.at("imputation_factor").get<double>();
      check(e, "price_per_chip_hour", c.at("price_per_chip_hour").get<double>(), price);
      check(e, "cost", cost, price * chip_hours);
    } else if (method == "acquisition" && e.contains("acquisition")) {
      const auto& a = e.at("acquisition");
      const double pc = per_chip(a.at("acquisition"));
      check(e, "acquisition.per_chip", a.at("acquisition").at("per_chip").get<double>(), pc);
      check(e, "cost", cost, pc * a.at("hardware_quantity").get<double>());
    }
  }
  return diffs;
}

}  // namespace fcost
