#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fcost/csv.hpp"
#include "fcost/dev_cost.hpp"
#include "fcost/estimates.hpp"
#include "fcost/frontier_selection.hpp"
#include "fcost/sensitivity.hpp"
#include "fcost/uncertainty.hpp"

namespace fcost {

// Optional analyses layered on top of per-model estimation.
inline const std::set<std::string>& known_analyses() {
  static const std::set<std::string> names{"no_tpu_trend", "power",       "breakdown",   "dev_cost",
                                           "uncertainty",  "sensitivity", "ground_truth"};
  return names;
}

struct StaffFixture {
  std::string model;
  StaffModel staff;

  bool operator==(const StaffFixture&) const = default;
};

struct RunConfig {
  std::string models_path;
  std::string prices_path;
  std::string hardware_path;
  std::string electricity_path;
  SelectionMethod selection;
  std::vector<CostMethod> methods{CostMethod::amortized, CostMethod::cloud, CostMethod::acquisition};
  std::set<std::string> analyses;
  PipelineParams params;
  std::vector<StaffFixture> staff;
  // "method.GPU" / "method.TPU" -> replacement intervals by variable name.
  std::map<std::string, std::vector<VariableSpec>> uncertainty_overrides;
  std::vector<Scenario> custom_scenarios;
  std::optional<std::vector<std::string>> scenario_names;  // empty = full suite
  std::optional<std::uint64_t> seed;
  std::size_t n_samples = 100000;
  std::string output_dir = "out";
  unsigned workers = 0;

  RunConfig() { params.tpu_costs = default_tpu_costs(); }

  bool has(const std::string& analysis) const { return analyses.count(analysis) > 0; }

  void validate(bool check_paths = true) const {
    if (!seed) throw ConfigError("config must set run.seed");
    selection.validate();
    params.validate();
    for (const auto& a : analyses)
      if (!known_analyses().count(a)) throw ConfigError("unknown analysis '" + a + "'");
    for (const auto& s : staff) s.staff.validate();
    if (check_paths)
      for (const auto* p : {&models_path, &prices_path, &hardware_path, &electricity_path}) {
        if (p->empty()) throw ConfigError("config is missing a dataset path");
        if (!std::filesystem::exists(*p)) throw ConfigError("dataset path does not exist: " + *p);
      }
  }

  std::vector<VariableSpec> variable_set(CostMethod method, HardwareKind kind) const {
    auto vars = default_variable_set(method, kind);
    auto it = uncertainty_overrides.find(to_string(method) + "." + to_string(kind));
    if (it == uncertainty_overrides.end()) return vars;
    for (const auto& o : it->second) {
      bool replaced = false;
      for (auto& v : vars)
        if (v.name == o.name) {
          v.distribution = o.distribution;
          replaced = true;
        }
      if (!replaced) vars.push_back(o);
    }
    return vars;
  }

  std::vector<Scenario> scenarios() const {
    auto all = scenario_suite();
    for (const auto& s : custom_scenarios) all.push_back(s);
    if (!scenario_names) return all;
    std::vector<Scenario> out;
    for (const auto& name : *scenario_names) {
      bool found = false;
      for (const auto& s : all)
        if (s.name == name) {
          out.push_back(s);
          found = true;
        }
      if (!found) throw ConfigError("unknown scenario '" + name + "'");
    }
    return out;
  }
};

namespace config_detail {

inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto t = csv::trim(v);
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc{} || p != t.data() + t.size()) throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
  return x;
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError("'" + key + "' expects true/false, got '" + v + "'");
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  for (auto& item : csv::split_record(v))
    if (!item.empty()) out.push_back(item);
  return out;
}

inline Date to_date(const std::string& key, const std::string& v) {
  auto d = parse_date(csv::trim(v));
  if (!d) throw ConfigError("'" + key + "' expects YYYY-MM-DD, got '" + v + "'");
  return *d;
}

inline IntervalDistribution to_distribution(const std::string& key, const std::string& v) {
  std::istringstream in(v);
  std::string kind;
  in >> kind;
  std::vector<double> args;
  std::string tok;
  while (in >> tok) args.push_back(to_double(key, tok));
  if (kind == "lognormal" && args.size() == 2) return IntervalDistribution::log_normal(args[0], args[1]);
  if (kind == "normal" && args.size() == 2) return IntervalDistribution::normal(args[0], args[1]);
  if (kind == "point" && args.size() == 1) return IntervalDistribution::point(args[0]);
  throw ConfigError("'" + key + "' expects 'lognormal LO HI', 'normal LO HI' or 'point V', got '" + v + "'");
}

inline std::string distribution_text(const IntervalDistribution& d) {
  switch (d.kind) {
    case IntervalDistribution::Kind::log_normal_from_ci: return "lognormal " + fmt(d.low) + " " + fmt(d.high);
    case IntervalDistribution::Kind::normal_from_ci: return "normal " + fmt(d.low) + " " + fmt(d.high);
    case IntervalDistribution::Kind::point: return "point " + fmt(d.low);
  }
  return "";
}

inline std::string resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return path.lexically_normal().string();
}

inline StaffFixture& staff_fixture(RunConfig& cfg, const std::string& model) {
  for (auto& s : cfg.staff)
    if (s.model == model) return s;
  cfg.staff.push_back({model, StaffModel{}});
  return cfg.staff.back();
}

inline SelectionMethod::Variant to_variant(const std::string& v) {
  if (v == "top_n") return SelectionMethod::Variant::top_n;
  if (v == "compute_quantile") return SelectionMethod::Variant::compute_quantile;
  if (v == "residual_from_trend") return SelectionMethod::Variant::residual_from_trend;
  throw ConfigError("unknown selection variant '" + v + "'");
}

}  // namespace config_detail

/// Applies one `key = value` setting from section `section`. Relative paths
/// resolve against `base_dir`.
inline void apply_setting(RunConfig& cfg, const std::string& section, const std::string& key, const std::string& value,
                          const std::filesystem::path& base_dir = {}) {
  using namespace config_detail;
  const std::string where = section + "." + key;
  auto unknown = [&]() -> void { throw ConfigError("unrecognized config key '" + where + "'"); };

  if (section == "run") {
    if (key == "seed") {
      std::uint64_t seed = 0;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), seed);
      if (ec != std::errc{} || ptr != value.data() + value.size())
        throw ConfigError(where + " must be a nonnegative integer, got '" + value + "'");
      cfg.seed = seed;
    }
    else if (key == "n_samples") cfg.n_samples = static_cast<std::size_t>(to_double(where, value));
    else if (key == "output_dir") cfg.output_dir = resolve(base_dir, value);
    else if (key == "workers") cfg.workers = static_cast<unsigned>(to_double(where, value));
    else if (key == "methods") {
      cfg.methods.clear();
      for (const auto& m : split_list(value)) cfg.methods.push_back(parse_cost_method(m));
    } else if (key == "analyses") {
      cfg.analyses.clear();
      for (const auto& a : split_list(value)) {
        if (!known_analyses().count(a)) throw ConfigError("unknown analysis '" + a + "'");
        cfg.analyses.insert(a);
      }
    } else if (key == "scenarios") {
      auto names = split_list(value);
      if (names.size() == 1 && names[0] == "all") cfg.scenario_names.reset();
      else cfg.scenario_names = names;
    } else unknown();
  } else if (section == "data") {
    if (key == "models") cfg.models_path = resolve(base_dir, value);
    else if (key == "prices") cfg.prices_path = resolve(base_dir, value);
    else if (key == "hardware") cfg.hardware_path = resolve(base_dir, value);
    else if (key == "electricity") cfg.electricity_path = resolve(base_dir, value);
    else unknown();
  } else if (section == "selection") {
    auto& s = cfg.selection;
    if (key == "variant") s.variant = to_variant(value);
    else if (key == "n") s.n = static_cast<int>(to_double(where, value));
    else if (key == "q") s.q = to_double(where, value);
    else if (key == "top_fraction") s.top_fraction = to_double(where, value);
    else if (key == "window_start") s.window_start = to_date(where, value);
    else if (key == "window_end") s.window_end = to_date(where, value);
    else if (key == "exclude_finetunes") s.exclude_finetunes = to_bool(where, value);
    else unknown();
  } else if (section == "constants") {
    auto& p = cfg.params;
    if (key == "depreciation_rate") p.depreciation_rate = to_double(where, value);
    else if (key == "price_performance_rate") p.price_performance_rate = to_double(where, value);
    else if (key == "gpu_acquisition_buffer_days") p.gpu_acquisition_buffer_days = to_double(where, value);
    else if (key == "training_start_buffer_days") p.training_start_buffer_days = to_double(where, value);
    else if (key == "median_training_time_hours") p.median_training_time_hours = to_double(where, value);
    else if (key == "default_utilization") p.default_utilization = to_double(where, value);
    else if (key == "interconnect_fraction") p.factors.interconnect_fraction = to_double(where, value);
    else if (key == "procurement_buffer_months") p.cloud.procurement_buffer_months = static_cast<int>(to_double(where, value));
    else unknown();
  } else if (section == "chip_to_server") {
    if (key == "default") cfg.params.factors.chip_to_server.fallback = to_double(where, value);
    else cfg.params.factors.chip_to_server.set(key, to_double(where, value));
  } else if (section == "pue") {
    if (key == "default") cfg.params.pue_by_developer.fallback = to_double(where, value);
    else cfg.params.pue_by_developer.set(key, to_double(where, value));
  } else if (section == "power_ratio") {
    if (key == "default") cfg.params.power_ratio_by_manufacturer.fallback = to_double(where, value);
    else cfg.params.power_ratio_by_manufacturer.set(key, to_double(where, value));
  } else if (section == "providers") {
    auto& c = cfg.params.cloud;
    if (key == "default") c.default_provider = value;
    else {
      bool found = false;
      for (auto& rule : c.developer_provider)
        if (rule.first == key) {
          rule.second = value;
          found = true;
        }
      if (!found) c.developer_provider.emplace_back(key, value);
    }
  } else if (section == "similar_hardware") {
    cfg.params.cloud.similar_hardware[key] = split_list(value);
  } else if (section.rfind("tpu_cost.", 0) == 0) {
    const auto name = section.substr(9);
    auto [it, inserted] = cfg.params.tpu_costs.try_emplace(name);
    auto& t = it->second;
    if (key == "performance_ratio") t.performance_ratio = to_double(where, value);
    else if (key == "release_date") t.tpu_release_date = to_date(where, value);
    else if (key == "equivalent_gpu_price") t.equivalent_gpu_price = to_double(where, value);
    else if (key == "reference_server_cost_per_chip") t.reference_server_cost_per_chip = to_double(where, value);
    else if (key == "reference_chip_cost") t.reference_chip_cost = to_double(where, value);
    else if (key == "reference_release_date") t.reference_release_date = to_date(where, value);
    else unknown();
  } else if (section.rfind("staff.", 0) == 0) {
    auto& s = staff_fixture(cfg, section.substr(6)).staff;
    if (key.rfind("role.", 0) == 0) {
      const auto comma = value.find(',');
      StaffRole role;
      role.name = key.substr(5);
      role.count = static_cast<int>(to_double(where, value.substr(0, comma)));
      if (comma != std::string::npos) role.fte = to_distribution(where, csv::trim(value.substr(comma + 1)));
      bool replaced = false;
      for (auto& r : s.roles)
        if (r.name == role.name) {
          r = role;
          replaced = true;
        }
      if (!replaced) s.roles.push_back(role);
    } else if (key == "duration") s.development_duration = to_distribution(where, value);
    else if (key == "base_salary") s.base_salary = to_distribution(where, value);
    else if (key == "equity") s.equity = to_distribution(where, value);
    else if (key == "salary_overhead") s.salary_overhead = to_distribution(where, value);
    else if (key == "include_equity") s.include_equity = to_bool(where, value);
    else unknown();
  } else if (section.rfind("uncertainty.", 0) == 0) {
    const auto id = section.substr(12);
    const auto dot = id.find('.');
    if (dot == std::string::npos) throw ConfigError("uncertainty section needs method.CLASS: '" + section + "'");
    const auto method = parse_cost_method(id.substr(0, dot));
    const auto cls = id.substr(dot + 1);
    if (cls != "GPU" && cls != "TPU") throw ConfigError("uncertainty class must be GPU or TPU: '" + section + "'");
    VariableSpec v{key, to_distribution(where, value), {method}};
    validate_variable(v);
    auto& list = cfg.uncertainty_overrides[id];
    bool replaced = false;
    for (auto& existing : list)
      if (existing.name == key) {
        existing = v;
        replaced = true;
      }
    if (!replaced) list.push_back(v);
  } else if (section.rfind("scenario.", 0) == 0) {
    const auto name = section.substr(9);
    Scenario* target = nullptr;
    for (auto& s : cfg.custom_scenarios)
      if (s.name == name) target = &s;
    if (!target) {
      cfg.custom_scenarios.push_back({name, {}, std::nullopt});
      target = &cfg.custom_scenarios.back();
    }
    if (key == "reference_change") {
      target->reference_change = to_double(where, value);
    } else {
      auto single = ScenarioOverrides::parse({{key, value}});
      auto& o = target->overrides;
      if (single.depreciation_rate) o.depreciation_rate = single.depreciation_rate;
      if (single.gpu_acquisition_buffer_days) o.gpu_acquisition_buffer_days = single.gpu_acquisition_buffer_days;
      if (single.training_start_buffer_days) o.training_start_buffer_days = single.training_start_buffer_days;
      if (single.selection_variant) o.selection_variant = single.selection_variant;
      if (single.top_n) o.top_n = single.top_n;
      if (single.quantile) o.quantile = single.quantile;
      if (single.top_fraction) o.top_fraction = single.top_fraction;
    }
  } else {
    throw ConfigError("unrecognized config section '[" + section + "]'");
  }
}

/// Parses the INI-style config text: `[section]` headers, `key = value`
/// lines, `#` comments.
inline RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {}) {
  RunConfig cfg;
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = csv::trim(line);
    if (t.empty() || t.front() == '#' || t.front() == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      section = csv::trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty()) throw ConfigError("line " + std::to_string(lineno) + ": setting outside a section");
    try {
      apply_setting(cfg, section, csv::trim(t.substr(0, eq)), csv::trim(t.substr(eq + 1)), base_dir);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  return parse_config(in, std::filesystem::path(path).parent_path());
}

/// Applies a `section.key=value` override (the CLI's --set flag). The
/// section is everything before the last dot.
inline void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override must look like section.key=value: '" + assignment + "'");
  const auto path = csv::trim(assignment.substr(0, eq));
  const auto dot = path.rfind('.');
  if (dot == std::string::npos) throw ConfigError("override key needs a section: '" + path + "'");
  apply_setting(cfg, path.substr(0, dot), path.substr(dot + 1), csv::trim(assignment.substr(eq + 1)));
}

/// Canonical text form of a config; parsing it reproduces the config.
inline std::string to_config_text(const RunConfig& cfg) {
  using namespace config_detail;
  std::ostringstream o;
  o << "[run]\n";
  if (cfg.seed) o << "seed = " << *cfg.seed << "\n";
  o << "n_samples = " << cfg.n_samples << "\n";
  o << "output_dir = " << cfg.output_dir << "\n";
  o << "workers = " << cfg.workers << "\n";
  o << "methods = ";
  for (std::size_t i = 0; i < cfg.methods.size(); ++i) o << (i ? ", " : "") << to_string(cfg.methods[i]);
  o << "\nanalyses = ";
  bool first = true;
  for (const auto& a : cfg.analyses) {
    o << (first ? "" : ", ") << a;
    first = false;
  }
  o << "\nscenarios = ";
  if (!cfg.scenario_names) o << "all";
  else
    for (std::size_t i = 0; i < cfg.scenario_names->size(); ++i) o << (i ? ", " : "") << (*cfg.scenario_names)[i];
  o << "\n\n[data]\n";
  o << "models = " << cfg.models_path << "\nprices = " << cfg.prices_path << "\nhardware = " << cfg.hardware_path
    << "\nelectricity = " << cfg.electricity_path << "\n\n";

  const auto& s = cfg.selection;
  o << "[selection]\nvariant = " << to_string(s.variant) << "\nn = " << s.n << "\nq = " << fmt(s.q)
    << "\ntop_fraction = " << fmt(s.top_fraction) << "\nwindow_start = " << format_date(s.window_start)
    << "\nwindow_end = " << format_date(s.window_end) << "\nexclude_finetunes = " << (s.exclude_finetunes ? "true" : "false")
    << "\n\n";

  const auto& p = cfg.params;
  o << "[constants]\ndepreciation_rate = " << fmt(p.depreciation_rate)
    << "\nprice_performance_rate = " << fmt(p.price_performance_rate)
    << "\ngpu_acquisition_buffer_days = " << fmt(p.gpu_acquisition_buffer_days)
    << "\ntraining_start_buffer_days = " << fmt(p.training_start_buffer_days)
    << "\nmedian_training_time_hours = " << fmt(p.median_training_time_hours)
    << "\ndefault_utilization = " << fmt(p.default_utilization)
    << "\ninterconnect_fraction = " << fmt(p.factors.interconnect_fraction)
    << "\nprocurement_buffer_months = " << p.cloud.procurement_buffer_months << "\n\n";

  auto table = [&](const char* name, const MatchTable& t) {
    o << "[" << name << "]\n";
    for (const auto& [k, v] : t.rules) o << k << " = " << fmt(v) << "\n";
    o << "default = " << fmt(t.fallback) << "\n\n";
  };
  table("chip_to_server", p.factors.chip_to_server);
  table("pue", p.pue_by_developer);
  table("power_ratio", p.power_ratio_by_manufacturer);

  o << "[providers]\n";
  for (const auto& [k, v] : p.cloud.developer_provider) o << k << " = " << v << "\n";
  o << "default = " << p.cloud.default_provider << "\n\n[similar_hardware]\n";
  for (const auto& [k, v] : p.cloud.similar_hardware) {
    o << k << " = ";
    for (std::size_t i = 0; i < v.size(); ++i) o << (i ? ", " : "") << csv::escape(v[i]);
    o << "\n";
  }
  o << "\n";
  for (const auto& [name, t] : p.tpu_costs) {
    o << "[tpu_cost." << name << "]\nperformance_ratio = " << fmt(t.performance_ratio)
      << "\nrelease_date = " << format_date(t.tpu_release_date) << "\nequivalent_gpu_price = " << fmt(t.equivalent_gpu_price)
      << "\nreference_server_cost_per_chip = " << fmt(t.reference_server_cost_per_chip)
      << "\nreference_chip_cost = " << fmt(t.reference_chip_cost)
      << "\nreference_release_date = " << format_date(t.reference_release_date) << "\n\n";
  }
  for (const auto& f : cfg.staff) {
    o << "[staff." << f.model << "]\n";
    for (const auto& r : f.staff.roles)
      o << "role." << r.name << " = " << r.count << ", " << distribution_text(r.fte) << "\n";
    o << "duration = " << distribution_text(f.staff.development_duration)
      << "\nbase_salary = " << distribution_text(f.staff.base_salary)
      << "\nequity = " << distribution_text(f.staff.equity)
      << "\nsalary_overhead = " << distribution_text(f.staff.salary_overhead)
      << "\ninclude_equity = " << (f.staff.include_equity ? "true" : "false") << "\n\n";
  }
  for (const auto& [id, vars] : cfg.uncertainty_overrides) {
    o << "[uncertainty." << id << "]\n";
    for (const auto& v : vars) o << v.name << " = " << distribution_text(v.distribution) << "\n";
    o << "\n";
  }
  for (const auto& sc : cfg.custom_scenarios) {
    o << "[scenario." << sc.name << "]\n";
    const auto& ov = sc.overrides;
    if (ov.depreciation_rate) o << "depreciation_rate = " << fmt(*ov.depreciation_rate) << "\n";
    if (ov.gpu_acquisition_buffer_days) o << "gpu_acquisition_buffer_days = " << fmt(*ov.gpu_acquisition_buffer_days) << "\n";
    if (ov.training_start_buffer_days) o << "training_start_buffer_days = " << fmt(*ov.training_start_buffer_days) << "\n";
    if (ov.selection_variant) o << "selection = " << to_string(*ov.selection_variant) << "\n";
    if (ov.top_n) o << "top_n = " << *ov.top_n << "\n";
    if (ov.quantile) o << "quantile = " << fmt(*ov.quantile) << "\n";
    if (ov.top_fraction) o << "top_fraction = " << fmt(*ov.top_fraction) << "\n";
    if (sc.reference_change) o << "reference_change = " << fmt(*sc.reference_change) << "\n";
    o << "\n";
  }
  return o.str();
}

}  // namespace fcost
