#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

#include "fcost/error.hpp"

namespace fcost {

// Standard normal quantile at 0.95.
inline constexpr double kZ95 = 1.6448536269514722;

/// A distribution specified by its 90% interval (5th and 95th percentiles).
struct IntervalDistribution {
  enum class Kind { log_normal_from_ci, normal_from_ci, point };

  Kind kind = Kind::point;
  double low = 0.0;
  double high = 0.0;

  static IntervalDistribution log_normal(double low, double high) {
    IntervalDistribution d{Kind::log_normal_from_ci, low, high};
    d.validate();
    return d;
  }
  static IntervalDistribution normal(double low, double high) {
    IntervalDistribution d{Kind::normal_from_ci, low, high};
    d.validate();
    return d;
  }
  static IntervalDistribution point(double value) { return {Kind::point, value, value}; }

  void validate() const {
    if (!std::isfinite(low) || !std::isfinite(high)) throw ConfigError("interval bounds must be finite");
    switch (kind) {
      case Kind::log_normal_from_ci:
        if (!(low > 0 && low < high)) throw ConfigError("log-normal interval needs 0 < low < high");
        break;
      case Kind::normal_from_ci:
        if (!(low < high)) throw ConfigError("normal interval needs low < high");
        break;
      case Kind::point:
        if (low != high) throw ConfigError("point distribution needs low == high");
        break;
    }
  }

  // Location and scale of the underlying normal (log scale for log-normal).
  double mu() const {
    return kind == Kind::log_normal_from_ci ? (std::log(low) + std::log(high)) / 2.0 : (low + high) / 2.0;
  }
  double sigma() const {
    switch (kind) {
      case Kind::log_normal_from_ci: return (std::log(high) - std::log(low)) / (2.0 * kZ95);
      case Kind::normal_from_ci: return (high - low) / (2.0 * kZ95);
      case Kind::point: return 0.0;
    }
    return 0.0;
  }

  double analytic_median() const {
    return kind == Kind::log_normal_from_ci ? std::sqrt(low * high) : (low + high) / 2.0;
  }

  double from_standard_normal(double z) const {
    switch (kind) {
      case Kind::log_normal_from_ci: return std::exp(mu() + sigma() * z);
      case Kind::normal_from_ci: return mu() + sigma() * z;
      case Kind::point: return low;
    }
    return low;
  }

  bool operator==(const IntervalDistribution&) const = default;
};

/// Independent random stream identified by (seed, stream id).
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)};
    engine_.seed(seq);
  }

  double standard_normal() { return normal_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

inline double sample_interval(const IntervalDistribution& dist, RandomStream& stream) {
  if (dist.kind == IntervalDistribution::Kind::point) return dist.low;
  return dist.from_standard_normal(stream.standard_normal());
}

inline constexpr std::size_t kDrawsPerStream = 4096;

/// Runs `draw(stream, index)` for every index in [0, n). Draws are grouped
/// into fixed blocks, each with its own stream keyed by block number, so
/// output does not depend on the worker count.
template <typename T, typename Draw>
std::vector<T> parallel_draws(std::size_t n, std::uint64_t seed, Draw draw, unsigned workers = 0) {
  std::vector<T> out(n);
  const std::size_t blocks = (n + kDrawsPerStream - 1) / kDrawsPerStream;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(blocks, 1)));

  auto run_block = [&](std::size_t block) {
    RandomStream stream(seed, block);
    const std::size_t end = std::min(n, (block + 1) * kDrawsPerStream);
    for (std::size_t i = block * kDrawsPerStream; i < end; ++i) out[i] = draw(stream, i);
  };

  if (workers <= 1) {
    for (std::size_t b = 0; b < blocks; ++b) run_block(b);
    return out;
  }
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t b = w; b < blocks; b += workers) run_block(b);
    });
  pool.clear();
  return out;
}

}  // namespace fcost
