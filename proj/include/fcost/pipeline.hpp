#pragma once

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "fcost/config.hpp"
#include "fcost/dev_cost.hpp"
#include "fcost/estimates.hpp"
#include "fcost/frontier_selection.hpp"
#include "fcost/ground_truth.hpp"
#include "fcost/sensitivity.hpp"
#include "fcost/trend_stats.hpp"
#include "fcost/uncertainty.hpp"

namespace fcost {

inline constexpr const char* kToolVersion = "1.0.0";

inline std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw IoError("SHA-256 computation failed");
  std::ostringstream o;
  for (unsigned i = 0; i < len; ++i) o << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return o.str();
}

inline std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "' for hashing");
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

/// Independent seed for a named sub-analysis of a run.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : tag) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ull;
  std::uint64_t z = seed ^ h;
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

struct Provenance {
  std::string tool_version = kToolVersion;
  std::string config_hash;
  std::vector<std::pair<std::string, std::string>> dataset_hashes;  // role -> sha256
  std::uint64_t seed = 0;
};

struct TrendSeries {
  std::string name;  // amortized, amortized_no_tpu, cloud, acquisition, power
  std::string unit;  // USD or kW
  std::vector<TrendPoint> points;
  std::optional<TrendFit> fit;
  std::size_t excluded = 0;  // selected models with no usable value
  std::string note;
};

struct BreakdownRow {
  std::string model;
  double chips = 0.0;
  double server_rest = 0.0;
  double interconnect = 0.0;
  double energy = 0.0;

  double total() const { return chips + server_rest + interconnect + energy; }
  double fraction(double part) const { return total() > 0 ? part / total() : 0.0; }
};

struct DevCostRow {
  std::string model;
  DevCostBreakdown with_equity;
  DevCostBreakdown without_equity;
};

struct UncertaintyRow {
  CostMethod method = CostMethod::amortized;
  HardwareKind hardware_class = HardwareKind::gpu;
  Interval relative;
};

struct Report {
  Provenance provenance;
  std::vector<std::string> selected;
  std::vector<CostEstimate> estimates;
  std::vector<EstimateFailure> failures;
  std::vector<TrendSeries> trends;
  std::vector<BreakdownRow> breakdown;
  std::optional<BreakdownRow> breakdown_mean;
  std::vector<DevCostRow> dev_costs;
  std::vector<UncertaintyRow> uncertainty;
  std::vector<ScenarioResult> scenarios;
  std::vector<GroundTruthRow> ground_truth;
  ValidationReport validation;

  const TrendSeries* trend(std::string_view name) const {
    for (const auto& t : trends)
      if (t.name == name) return &t;
    return nullptr;
  }

  const CostEstimate* find(std::string_view model, CostMethod method) const {
    for (const auto& e : estimates)
      if (e.model == model && e.method == method) return &e;
    return nullptr;
  }
};

inline DatasetBundle load_config_datasets(const RunConfig& cfg) {
  LoadOptions opts;
  opts.window_start = cfg.selection.window_start;
  opts.window_end = cfg.selection.window_end;
  return load_datasets(cfg.models_path, cfg.prices_path, cfg.hardware_path, cfg.electricity_path, opts);
}

inline Provenance make_provenance(const RunConfig& cfg) {
  // Worker count and output location do not affect results.
  RunConfig hashed = cfg;
  hashed.workers = 0;
  hashed.output_dir.clear();
  Provenance p;
  p.config_hash = sha256_hex(to_config_text(hashed));
  p.dataset_hashes = {{"models", sha256_file(cfg.models_path)},
                      {"prices", sha256_file(cfg.prices_path)},
                      {"hardware", sha256_file(cfg.hardware_path)},
                      {"electricity", sha256_file(cfg.electricity_path)}};
  p.seed = cfg.seed.value_or(0);
  return p;
}

inline TrendSeries fit_series(std::string name, std::string unit, std::vector<TrendPoint> points, std::size_t excluded) {
  TrendSeries s{std::move(name), std::move(unit), std::move(points), std::nullopt, excluded, ""};
  try {
    s.fit = fit_loglinear(s.points);
  } catch (const Error& e) {
    s.note = e.what();
  }
  return s;
}

/// Runs every configured method and analysis over an already-loaded bundle.
inline Report run_pipeline(const RunConfig& cfg, const DatasetBundle& data, Provenance provenance = {}) {
  cfg.validate(false);
  const auto& params = cfg.params;
  const std::uint64_t seed = *cfg.seed;

  Report rep;
  rep.provenance = std::move(provenance);
  rep.provenance.seed = seed;
  rep.validation = data.report;

  const auto selected = select_frontier(data.models, cfg.selection);
  for (const auto& m : selected) rep.selected.push_back(m.name);

  // Estimated models: the frontier plus any ground-truth and case-study
  // models, in dataset order. Only selected models feed the trends.
  std::vector<ModelRecord> targets;
  auto is_selected = [&](const std::string& name) {
    return std::find(rep.selected.begin(), rep.selected.end(), name) != rep.selected.end();
  };
  auto wanted = [&](const ModelRecord& m) {
    if (is_selected(m.name)) return true;
    if (cfg.has("ground_truth") && (m.name == "BLOOM-176B" || m.name == "OPT-175B")) return true;
    if (cfg.has("dev_cost"))
      for (const auto& s : cfg.staff)
        if (s.model == m.name) return true;
    return false;
  };
  for (const auto& m : data.models)
    if (wanted(m)) targets.push_back(m);

  std::vector<CostMethod> methods = cfg.methods;
  if (cfg.has("dev_cost") || cfg.has("breakdown") || cfg.has("no_tpu_trend"))
    if (std::find(methods.begin(), methods.end(), CostMethod::amortized) == methods.end())
      methods.push_back(CostMethod::amortized);
  if (cfg.has("ground_truth"))
    for (auto m : {CostMethod::cloud, CostMethod::amortized})
      if (std::find(methods.begin(), methods.end(), m) == methods.end()) methods.push_back(m);

  auto set = run_estimates(targets, methods, data, params);
  for (auto& e : set.estimates) e.selected = is_selected(e.model);
  rep.estimates = std::move(set.estimates);
  rep.failures = std::move(set.failures);

  auto series_for = [&](CostMethod method, bool skip_tpu) {
    std::vector<TrendPoint> pts;
    std::size_t excluded = 0;
    for (const auto& name : rep.selected) {
      const auto* e = rep.find(name, method);
      if (!e || !(e->cost > 0)) {
        ++excluded;
        continue;
      }
      if (skip_tpu && e->tpu_estimated) continue;
      pts.push_back({e->publication_date, e->cost, e->model});
    }
    return std::pair{pts, excluded};
  };
  for (auto method : cfg.methods) {
    auto [pts, excluded] = series_for(method, false);
    rep.trends.push_back(fit_series(to_string(method), "USD", std::move(pts), excluded));
  }
  if (cfg.has("no_tpu_trend")) {
    auto [pts, excluded] = series_for(CostMethod::amortized, true);
    rep.trends.push_back(fit_series("amortized_no_tpu", "USD", std::move(pts), excluded));
  }
  if (cfg.has("power")) {
    std::vector<TrendPoint> pts;
    std::size_t excluded = 0;
    for (const auto& m : selected) {
      try {
        pts.push_back({m.publication_date, cluster_power_kw(m, data, params), m.name});
      } catch (const Error&) {
        ++excluded;
      }
    }
    rep.trends.push_back(fit_series("power", "kW", std::move(pts), excluded));
  }

  if (cfg.has("breakdown")) {
    BreakdownRow mean{"mean"};
    for (const auto& name : rep.selected) {
      const auto* e = rep.find(name, CostMethod::amortized);
      if (!e || !e->amortized || !(e->cost > 0)) continue;
      const auto& d = *e->amortized;
      BreakdownRow row{name, d.chips, d.server_rest, d.interconnect, d.energy_cost};
      // Averages are over per-model fractions so that large runs do not dominate.
      mean.chips += row.fraction(row.chips);
      mean.server_rest += row.fraction(row.server_rest);
      mean.interconnect += row.fraction(row.interconnect);
      mean.energy += row.fraction(row.energy);
      rep.breakdown.push_back(row);
    }
    if (!rep.breakdown.empty()) {
      const double n = static_cast<double>(rep.breakdown.size());
      mean.chips /= n;
      mean.server_rest /= n;
      mean.interconnect /= n;
      mean.energy /= n;
      rep.breakdown_mean = mean;
    }
  }

  if (cfg.has("dev_cost")) {
    for (const auto& fixture : cfg.staff) {
      const auto* e = rep.find(fixture.model, CostMethod::amortized);
      if (!e || !e->amortized) {
        rep.failures.push_back({fixture.model, CostMethod::amortized, "no amortized estimate for development cost"});
        continue;
      }
      DevCostInputs in;
      in.chip_hours = e->chip_hours;
      in.start_value_per_chip = e->amortized->start_value.value;
      in.depreciation_rate = e->amortized->depreciation_rate;
      in.energy = e->amortized->energy;
      const auto s = derive_seed(seed, "dev_cost/" + fixture.model);
      auto with = fixture.staff;
      with.include_equity = true;
      auto without = fixture.staff;
      without.include_equity = false;
      rep.dev_costs.push_back({fixture.model, total_dev_cost(in, with, cfg.n_samples, s, cfg.workers),
                               total_dev_cost(in, without, cfg.n_samples, s, cfg.workers)});
    }
  }

  if (cfg.has("uncertainty")) {
    for (auto method : {CostMethod::amortized, CostMethod::acquisition})
      for (auto kind : {HardwareKind::gpu, HardwareKind::tpu}) {
        const auto tag = "uncertainty/" + to_string(method) + "/" + to_string(kind);
        rep.uncertainty.push_back(
            {method, kind,
             simulate_relative_uncertainty(method, kind, cfg.variable_set(method, kind), std::max<std::size_t>(cfg.n_samples, 10000),
                                           derive_seed(seed, tag), cfg.workers)});
      }
  }

  if (cfg.has("sensitivity"))
    for (const auto& sc : cfg.scenarios()) rep.scenarios.push_back(run_scenario(params, cfg.selection, sc, data));

  if (cfg.has("ground_truth")) rep.ground_truth = validate_ground_truth(rep.estimates);

  return rep;
}

/// Loads the configured datasets, hashes inputs and runs the pipeline.
inline Report run_pipeline(const RunConfig& cfg) {
  cfg.validate(true);
  const auto data = load_config_datasets(cfg);
  return run_pipeline(cfg, data, make_provenance(cfg));
}

}  // namespace fcost
