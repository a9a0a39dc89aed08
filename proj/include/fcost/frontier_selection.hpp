#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "fcost/data_model.hpp"
#include "fcost/stats.hpp"
#include "fcost/trend_stats.hpp"

namespace fcost {

struct SelectionMethod {
  enum class Variant { top_n, compute_quantile, residual_from_trend };

  Variant variant = Variant::top_n;
  int n = 10;
  double q = 0.9;
  double top_fraction = 0.2;
  Date window_start = make_date(2015, 10, 1);
  Date window_end = make_date(2023, 12, 31);
  bool exclude_finetunes = true;

  static SelectionMethod top_n_method(int n) {
    SelectionMethod m;
    m.n = n;
    return m;
  }

  void validate() const {
    if (variant == Variant::top_n && n < 1) throw ConfigError("top_n requires N >= 1");
    if (variant == Variant::compute_quantile && !(q > 0 && q < 1))
      throw ConfigError("compute_quantile requires q in (0,1)");
    if (variant == Variant::residual_from_trend && !(top_fraction > 0 && top_fraction < 1))
      throw ConfigError("residual_from_trend requires top_fraction in (0,1)");
  }

  bool operator==(const SelectionMethod&) const = default;
};

inline std::string to_string(SelectionMethod::Variant v) {
  switch (v) {
    case SelectionMethod::Variant::top_n: return "top_n";
    case SelectionMethod::Variant::compute_quantile: return "compute_quantile";
    case SelectionMethod::Variant::residual_from_trend: return "residual_from_trend";
  }
  return "?";
}

namespace detail {

// Strict ordering for rank: higher compute first, then earlier publication,
// then name.
inline bool outranks(const ModelRecord& a, const ModelRecord& b) {
  const double ca = a.training_compute.value_or(0.0);
  const double cb = b.training_compute.value_or(0.0);
  if (ca != cb) return ca > cb;
  if (a.publication_date != b.publication_date) return a.publication_date < b.publication_date;
  return a.name < b.name;
}

inline bool release_order(const ModelRecord& a, const ModelRecord& b) {
  if (a.publication_date != b.publication_date) return a.publication_date < b.publication_date;
  return a.name < b.name;
}

}  // namespace detail

/// Models eligible for frontier selection: compute known, inside the
/// window, and (optionally) not a fine-tune of another listed model.
inline std::vector<ModelRecord> selection_pool(std::span<const ModelRecord> models, const SelectionMethod& method) {
  std::vector<ModelRecord> pool;
  for (const auto& m : models) {
    if (!m.training_compute) continue;
    if (m.publication_date < method.window_start || m.publication_date > method.window_end) continue;
    if (method.exclude_finetunes && m.finetune_parent) continue;
    pool.push_back(m);
  }
  return pool;
}

/// 1-based rank of `model` by compute among pool members released on or
/// before it.
inline int rank_at_release(std::span<const ModelRecord> pool, const ModelRecord& model) {
  int rank = 1;
  for (const auto& other : pool) {
    if (other.name == model.name && other.publication_date == model.publication_date) continue;
    if (other.publication_date > model.publication_date) continue;
    if (detail::outranks(other, model)) ++rank;
  }
  return rank;
}

inline std::vector<ModelRecord> select_frontier(std::span<const ModelRecord> models, const SelectionMethod& method) {
  method.validate();
  const auto pool = selection_pool(models, method);
  std::vector<ModelRecord> out;

  switch (method.variant) {
    case SelectionMethod::Variant::top_n:
      for (const auto& m : pool)
        if (rank_at_release(pool, m) <= method.n) out.push_back(m);
      break;

    case SelectionMethod::Variant::compute_quantile:
      for (const auto& m : pool) {
        std::vector<double> earlier;
        for (const auto& o : pool)
          if (o.publication_date <= m.publication_date) earlier.push_back(*o.training_compute);
        if (*m.training_compute >= stats::quantile(earlier, method.q)) out.push_back(m);
      }
      break;

    case SelectionMethod::Variant::residual_from_trend: {
      if (pool.size() < 3) break;
      std::vector<TrendPoint> pts;
      for (const auto& m : pool) pts.push_back({m.publication_date, *m.training_compute, m.name});
      const auto fit = fit_loglinear(pts);
      std::vector<std::size_t> idx(pool.size());
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (fit.residuals[a] != fit.residuals[b]) return fit.residuals[a] > fit.residuals[b];
        return detail::release_order(pool[a], pool[b]);
      });
      const auto k = static_cast<std::size_t>(std::ceil(method.top_fraction * static_cast<double>(pool.size())));
      for (std::size_t i = 0; i < k && i < idx.size(); ++i)
        if (fit.residuals[idx[i]] > 0) out.push_back(pool[idx[i]]);
      break;
    }
  }
  std::stable_sort(out.begin(), out.end(), detail::release_order);
  return out;
}

}  // namespace fcost
