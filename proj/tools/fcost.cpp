// fcost: training-cost estimation from model, hardware and price datasets.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fcost/fcost.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_samples;
  std::optional<unsigned> workers;
  std::string output_dir;
  std::string format = "json";
  std::string methods;
  std::string selection;
  std::optional<int> top_n;
  std::optional<double> depreciation_rate;
  std::string models, prices, hardware, electricity;
  bool no_write = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("-c,--config", f.config, "Config file")->required();
  cmd->add_option("--set", f.sets, "Override a config key: section.key=value (repeatable)");
  cmd->add_option("--seed", f.seed, "run.seed");
  cmd->add_option("--n-samples", f.n_samples, "run.n_samples");
  cmd->add_option("--workers", f.workers, "run.workers (0 = hardware concurrency)");
  cmd->add_option("-o,--output-dir", f.output_dir, "run.output_dir");
  cmd->add_option("--format", f.format, "Report format: json or csv")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--methods", f.methods, "run.methods, comma separated");
  cmd->add_option("--selection", f.selection, "selection.variant");
  cmd->add_option("--top-n", f.top_n, "selection.n");
  cmd->add_option("--depreciation-rate", f.depreciation_rate, "constants.depreciation_rate");
  cmd->add_option("--models", f.models, "data.models");
  cmd->add_option("--prices", f.prices, "data.prices");
  cmd->add_option("--hardware", f.hardware, "data.hardware");
  cmd->add_option("--electricity", f.electricity, "data.electricity");
  cmd->add_flag("--no-write", f.no_write, "Print only; do not write report files");
}

fcost::RunConfig build_config(const CommonFlags& f, std::initializer_list<const char*> analyses) {
  auto cfg = fcost::load_config(f.config);
  for (const auto& s : f.sets) fcost::apply_override(cfg, s);
  if (f.seed) cfg.seed = *f.seed;
  if (f.n_samples) cfg.n_samples = *f.n_samples;
  if (f.workers) cfg.workers = *f.workers;
  if (!f.output_dir.empty()) cfg.output_dir = f.output_dir;
  if (!f.methods.empty()) fcost::apply_setting(cfg, "run", "methods", f.methods);
  if (!f.selection.empty()) fcost::apply_setting(cfg, "selection", "variant", f.selection);
  if (f.top_n) cfg.selection.n = *f.top_n;
  if (f.depreciation_rate) cfg.params.depreciation_rate = *f.depreciation_rate;
  if (!f.models.empty()) cfg.models_path = f.models;
  if (!f.prices.empty()) cfg.prices_path = f.prices;
  if (!f.hardware.empty()) cfg.hardware_path = f.hardware;
  if (!f.electricity.empty()) cfg.electricity_path = f.electricity;
  // Subcommands run their own analysis only; `estimate` keeps the config's list.
  if (analyses.size() > 0) {
    cfg.analyses.clear();
    for (const auto* a : analyses) cfg.analyses.insert(a);
  }
  return cfg;
}

std::string money(double usd) {
  char buf[32];
  if (usd >= 1e9) std::snprintf(buf, sizeof buf, "$%.2fB", usd / 1e9);
  else if (usd >= 1e6) std::snprintf(buf, sizeof buf, "$%.2fM", usd / 1e6);
  else if (usd >= 1e3) std::snprintf(buf, sizeof buf, "$%.1fK", usd / 1e3);
  else std::snprintf(buf, sizeof buf, "$%.2f", usd);
  return buf;
}

std::string pct(double x) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * x);
  return buf;
}

void finish(const CommonFlags& f, const fcost::RunConfig& cfg, const fcost::Report& rep) {
  if (!rep.failures.empty()) {
    std::cout << "\nfailures:\n";
    for (const auto& x : rep.failures) std::cout << "  " << x.model << " [" << fcost::to_string(x.method) << "] " << x.reason << "\n";
  }
  if (f.no_write) return;
  for (const auto& p : fcost::emit_report(rep, fcost::parse_report_format(f.format), cfg.output_dir))
    std::cerr << "wrote " << p << "\n";
}

void print_fit(const fcost::TrendSeries& t) {
  std::printf("%-18s n=%-3zu ", t.name.c_str(), t.points.size());
  if (!t.fit) {
    std::printf("no fit (%s)\n", t.note.c_str());
    return;
  }
  const auto g = fcost::growth_conversions(t.fit->slope);
  std::printf("%.3f OOM/yr  %.2fx/yr  90%% CI [%.2fx, %.2fx]  R2=%.3f", t.fit->slope, g.factor_per_year,
              std::pow(10.0, t.fit->slope_ci_90.low), std::pow(10.0, t.fit->slope_ci_90.high), t.fit->r_squared);
  if (g.doubling_months) std::printf("  doubling %.1f months", *g.doubling_months);
  std::printf("\n");
}

int run(int argc, char** argv) {
  CLI::App app{"Frontier model training cost estimation"};
  app.require_subcommand(1);
  CommonFlags f;

  auto* estimate = app.add_subcommand("estimate", "Per-model costs for each configured method");
  auto* trend = app.add_subcommand("trend", "Log-linear growth fits of frontier costs");
  auto* breakdown = app.add_subcommand("breakdown", "Hardware/energy component shares of amortized costs");
  auto* devcost = app.add_subcommand("devcost", "Total development cost including R&D staff");
  auto* uncertainty = app.add_subcommand("uncertainty", "Relative 90% intervals by method and hardware class");
  auto* sensitivity = app.add_subcommand("sensitivity", "Scenario suite against the base configuration");
  auto* power = app.add_subcommand("power", "Cluster power capacity and its trend");
  auto* validate = app.add_subcommand("validate", "Dataset validation and comparison with reported costs");
  for (auto* c : {estimate, trend, breakdown, devcost, uncertainty, sensitivity, power, validate}) add_common(c, f);

  auto* project = app.add_subcommand("project", "When a quantity growing at a fixed rate reaches a target");
  double anchor = 0, factor = 0, target = 0;
  std::string anchor_date;
  project->add_option("--anchor", anchor, "Anchor value")->required();
  project->add_option("--anchor-date", anchor_date, "Anchor date YYYY-MM-DD")->required();
  project->add_option("--factor", factor, "Growth factor per year")->required();
  project->add_option("--target", target, "Target value")->required();

  auto* audit = app.add_subcommand("audit", "Recompute every estimate in a JSON report from its recorded inputs");
  std::string report_path;
  double tolerance = 1e-9;
  audit->add_option("report", report_path, "report.json")->required();
  audit->add_option("--tolerance", tolerance, "Relative tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(fcost::ErrorCategory::config);
  }

  if (*project) {
    const auto c = fcost::extrapolate_crossing(anchor, fcost::parse_date_or_throw(anchor_date), factor, target);
    std::printf("reaches %g on %s (%.2f years from anchor%s)\n", target, fcost::format_date(c.date).c_str(), c.years,
                c.in_past ? ", already passed" : "");
    return 0;
  }

  if (*audit) {
    std::ifstream in(report_path);
    if (!in) throw fcost::IoError("cannot open report '" + report_path + "'");
    fcost::ojson j;
    try {
      j = fcost::ojson::parse(in);
    } catch (const std::exception& e) {
      throw fcost::SchemaError(std::string("report is not valid JSON: ") + e.what());
    }
    const auto diffs = fcost::audit_json(j, tolerance);
    std::cout << "audited " << j.at("estimates").size() << " estimates, " << diffs.size() << " mismatches\n";
    for (const auto& d : diffs)
      std::printf("  %s [%s] %s: recorded %.17g, recomputed %.17g\n", d.model.c_str(), d.method.c_str(),
                  d.field.c_str(), d.recorded, d.recomputed);
    return diffs.empty() ? 0 : static_cast<int>(fcost::ErrorCategory::estimation);
  }

  if (*validate) {
    auto cfg = build_config(f, {"ground_truth"});
    const auto rep = fcost::run_pipeline(cfg);
    std::cout << rep.validation.to_text();
    std::cout << rep.validation.issues.size() << " issues, " << rep.validation.rejected() << " rows rejected\n\n";
    for (const auto& g : rep.ground_truth) {
      std::printf("%-12s %-10s ", g.model.c_str(), fcost::to_string(g.method).c_str());
      if (!g.available()) {
        std::printf("unavailable\n");
        continue;
      }
      std::printf("estimate %s  truth %s  ratio %.2f  (published estimate %s)\n", money(*g.estimate).c_str(),
                  money(g.truth).c_str(), *g.ratio, money(g.reference_estimate).c_str());
    }
    finish(f, cfg, rep);
    return 0;
  }

  fcost::RunConfig cfg;
  if (*estimate) cfg = build_config(f, {});
  if (*trend) cfg = build_config(f, {"no_tpu_trend"});
  if (*breakdown) cfg = build_config(f, {"breakdown"});
  if (*devcost) cfg = build_config(f, {"dev_cost"});
  if (*uncertainty) cfg = build_config(f, {"uncertainty"});
  if (*sensitivity) cfg = build_config(f, {"sensitivity"});
  if (*power) cfg = build_config(f, {"power"});
  const auto rep = fcost::run_pipeline(cfg);

  if (*estimate) {
    std::printf("%-24s %-12s %-18s %14s %14s\n", "model", "method", "hardware", "chip-hours", "cost");
    for (const auto& e : rep.estimates)
      std::printf("%-24s %-12s %-18s %14.0f %14s%s\n", e.model.c_str(), fcost::to_string(e.method).c_str(),
                  e.hardware.c_str(), e.chip_hours, money(e.cost).c_str(), e.selected ? "" : "  (not selected)");
  }
  if (*trend || *power)
    for (const auto& t : rep.trends)
      if (*trend || t.name == "power") print_fit(t);
  if (*breakdown) {
    std::printf("%-24s %8s %12s %13s %8s\n", "model", "chips", "server rest", "interconnect", "energy");
    for (const auto& b : rep.breakdown)
      std::printf("%-24s %8s %12s %13s %8s\n", b.model.c_str(), pct(b.fraction(b.chips)).c_str(),
                  pct(b.fraction(b.server_rest)).c_str(), pct(b.fraction(b.interconnect)).c_str(),
                  pct(b.fraction(b.energy)).c_str());
    if (rep.breakdown_mean) {
      const auto& m = *rep.breakdown_mean;
      std::printf("%-24s %8s %12s %13s %8s\n", "mean", pct(m.chips).c_str(), pct(m.server_rest).c_str(),
                  pct(m.interconnect).c_str(), pct(m.energy).c_str());
    }
  }
  if (*devcost)
    for (const auto& d : rep.dev_costs)
      for (const auto* b : {&d.with_equity, &d.without_equity})
        std::printf("%-24s %-14s total %s [%s, %s]  hardware %s  energy %s  staff %s\n", d.model.c_str(),
                    b == &d.with_equity ? "with equity" : "no equity", money(b->total.median).c_str(),
                    money(b->total.p05).c_str(), money(b->total.p95).c_str(), pct(b->hardware_fraction).c_str(),
                    pct(b->energy_fraction).c_str(), pct(b->staff_fraction()).c_str());
  if (*uncertainty)
    for (const auto& u : rep.uncertainty)
      std::printf("%-12s %-4s 90%% interval %.2fx to %.2fx of the central estimate\n", fcost::to_string(u.method).c_str(),
                  fcost::to_string(u.hardware_class).c_str(), u.relative.low, u.relative.high);
  if (*sensitivity)
    for (const auto& s : rep.scenarios) {
      std::printf("%-24s mean change %+7.1f%%", s.name.c_str(), 100.0 * s.mean_relative_change);
      if (s.reference_change) std::printf(" (reference %+.0f%%)", 100.0 * *s.reference_change);
      if (s.fit) std::printf("  slope %.3f OOM/yr", s.fit->slope);
      if (s.slope_within_base_ci) std::printf("%s", *s.slope_within_base_ci ? "  within base CI" : "  outside base CI");
      std::printf("\n");
    }
  if (const auto* t = rep.trend("power"); *power && t)
    for (const auto& p : t->points)
      std::printf("%-24s %s %10.1f kW\n", p.label.c_str(), fcost::format_date(p.date).c_str(), p.value);

  finish(f, cfg, rep);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const fcost::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
