#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "fcost/data_model.hpp"
#include "fcost/dates.hpp"
#include "fcost/hardware_cost.hpp"

namespace fcost {

struct CloudConfig {
  // Ordered developer-substring -> provider rules.
  std::vector<std::pair<std::string, std::string>> developer_provider{
      {"Google", "Google Cloud"},   {"DeepMind", "Google Cloud"},       {"Alphabet", "Google Cloud"},
      {"OpenAI", "Microsoft Azure"}, {"Microsoft", "Microsoft Azure"},
  };
  std::string default_provider = "Amazon Web Services";
  // Hardware -> ordered list of similar hardware used as price stand-ins.
  std::map<std::string, std::vector<std::string>> similar_hardware;
  int procurement_buffer_months = 2;

  bool operator==(const CloudConfig&) const = default;
};

inline std::string preferred_provider(std::string_view developer, const CloudConfig& cfg = {}) {
  for (const auto& [key, provider] : cfg.developer_provider)
    if (iequals_substr(developer, key)) return provider;
  return cfg.default_provider;
}

/// Estimated date the compute was rented: publication, minus training time,
/// minus a preparation buffer in calendar months.
inline Date procurement_date(const ModelRecord& model, double median_training_time_hours = kDefaultMedianTrainingHours,
                             int buffer_months = 2) {
  const double hours = model.training_time_hours.value_or(median_training_time_hours);
  return add_months(add_days(model.publication_date, -hours / 24.0), -buffer_months);
}

struct PriceQuote {
  double price_per_chip_hour = 0.0;
  PriceRecord matched_record;
  int fallback_level = 0;  // 0 = exact hardware, provider and 3yr commitment
  std::string provider;
  double imputation_factor = 1.0;  // applied at level 5 only
};

inline constexpr int kMaxFallbackLevel = 5;

inline int commitment_rank(const PriceRecord& p) {
  switch (p.commitment.value_or(Commitment::on_demand)) {
    case Commitment::three_year: return 0;
    case Commitment::one_year: return 1;
    case Commitment::on_demand: return 2;
  }
  return 3;
}

namespace detail {

inline long date_distance(const PriceRecord& p, Date target) {
  return std::labs(static_cast<long>((p.price_date - target).count()));
}

// Deterministic ordering key among records eligible at one fallback level.
inline auto match_key(const PriceRecord& p, Date target, int sibling_rank, bool commitment_first) {
  const long dist = date_distance(p, target);
  const int crank = commitment_rank(p);
  return std::make_tuple(sibling_rank, commitment_first ? crank : 0, dist, p.price_date, commitment_first ? 0 : crank,
                         p.vendor, p.hardware_type, p.price_usd);
}

inline int sibling_rank(const CloudConfig& cfg, const std::string& hardware, const std::string& candidate) {
  auto it = cfg.similar_hardware.find(hardware);
  if (it == cfg.similar_hardware.end()) return -1;
  for (std::size_t i = 0; i < it->second.size(); ++i)
    if (it->second[i] == candidate) return static_cast<int>(i);
  return -1;
}

}  // namespace detail

/// Whether `record` is admissible at `level` for the given hardware/provider.
/// Level 5 additionally needs specs for both the target and source hardware.
inline bool eligible_at_level(int level, const PriceRecord& record, const std::string& hardware,
                              const std::string& provider, const CloudConfig& cfg) {
  if (record.kind != PriceKind::cloud_hourly) return false;
  const bool exact = record.hardware_type == hardware;
  const bool sibling = detail::sibling_rank(cfg, hardware, record.hardware_type) >= 0;
  const bool same_provider = record.vendor == provider;
  switch (level) {
    case 0: return exact && same_provider && record.commitment == Commitment::three_year;
    case 1: return exact && same_provider;
    case 2: return exact;
    case 3: return sibling && same_provider;
    case 4: return sibling;
    case 5: return true;
    default: return false;
  }
}

/// Most applicable cloud price for a model, walking the fallback chain from
/// exact matches down to price-performance imputation.
inline PriceQuote match_price(const ModelRecord& model, std::span<const PriceRecord> prices,
                              std::span<const HardwareSpec> specs, Date target_date, const CloudConfig& cfg = {},
                              double r = 0.14) {
  const std::string provider = preferred_provider(model.developer, cfg);
  auto find_spec = [&](const std::string& name) -> const HardwareSpec* {
    for (const auto& s : specs)
      if (s.name == name) return &s;
    return nullptr;
  };
  const HardwareSpec* target_spec = find_spec(model.hardware_type);

  for (int level = 0; level <= kMaxFallbackLevel; ++level) {
    const PriceRecord* best = nullptr;
    decltype(detail::match_key(std::declval<const PriceRecord&>(), target_date, 0, true)) best_key;
    for (const auto& p : prices) {
      if (!eligible_at_level(level, p, model.hardware_type, provider, cfg)) continue;
      if (level == 5 && (!target_spec || !find_spec(p.hardware_type))) continue;
      const int srank = (level == 3 || level == 4) ? detail::sibling_rank(cfg, model.hardware_type, p.hardware_type) : 0;
      auto key = detail::match_key(p, target_date, srank, level != 5);
      if (!best || key < best_key) {
        best = &p;
        best_key = key;
      }
    }
    if (!best) continue;
    PriceQuote q;
    q.matched_record = *best;
    q.fallback_level = level;
    q.provider = best->vendor;
    if (level == 5) {
      const HardwareSpec* source_spec = find_spec(best->hardware_type);
      q.imputation_factor = (target_spec->peak_flops / source_spec->peak_flops) *
                            date_adjustment_factor(source_spec->release_date, target_spec->release_date, r);
    }
    q.price_per_chip_hour = best->price_usd * q.imputation_factor;
    return q;
  }
  throw NoApplicablePrice(model.name);
}

inline double cloud_training_cost(double chip_hours, const PriceQuote& quote) {
  return quote.price_per_chip_hour * chip_hours;
}

}  // namespace fcost
