#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "almcluster/errors.hpp"
#include "almcluster/partition.hpp"
#include "almcluster/rng.hpp"
#include "almcluster/serial.hpp"

namespace almcluster {

/// Parameters of the correlated-lognormal scenario model: K indicators whose
/// log-returns per period are jointly normal with the given drift and
/// covariance, starting from strictly positive levels.
struct EconomicModelConfig {
  std::uint32_t indicator_count = 0;       // K
  std::uint32_t period_count = 0;          // T, stored time points per scenario
  std::vector<double> drift;               // K per-period expected log-returns
  std::vector<std::vector<double>> covariance;  // K x K
  std::vector<double> initial_levels;      // K, all > 0
  std::uint64_t seed = 0;
};

/// Lower-triangular factor of a symmetric positive semi-definite matrix.
/// Rank deficiency is fine: a pivot that collapses to zero just zeroes its
/// column. Pivots below -1e-12 (scaled by the largest diagonal) reject the
/// matrix as not PSD.
inline std::vector<std::vector<double>> psd_factor(const std::vector<std::vector<double>>& a) {
  const std::size_t k = a.size();
  double max_diag = 1.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (a[i].size() != k) throw ConfigError("covariance matrix is not square");
    max_diag = std::max(max_diag, std::abs(a[i][i]));
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(a[i][j] - a[j][i]) > 1e-12 * std::max(1.0, std::abs(a[i][j])))
        throw ConfigError("covariance matrix is not symmetric");
  }
  const double tol = 1e-12 * max_diag;
  std::vector<std::vector<double>> l(k, std::vector<double>(k, 0.0));
  for (std::size_t j = 0; j < k; ++j) {
    double d = a[j][j];
    for (std::size_t r = 0; r < j; ++r) d -= l[j][r] * l[j][r];
    if (d < -tol) throw ConfigError("covariance matrix is not positive semi-definite");
    if (d <= tol) continue;  // rank-deficient direction, column stays zero
    l[j][j] = std::sqrt(d);
    for (std::size_t i = j + 1; i < k; ++i) {
      double s = a[i][j];
      for (std::size_t r = 0; r < j; ++r) s -= l[i][r] * l[j][r];
      l[i][j] = s / l[j][j];
    }
  }
  return l;
}

inline void validate(const EconomicModelConfig& cfg) {
  if (cfg.indicator_count < 1) throw ConfigError("indicator_count must be >= 1");
  if (cfg.period_count < 2) throw ConfigError("period_count must be >= 2");
  if (cfg.drift.size() != cfg.indicator_count) throw ConfigError("drift size != indicator_count");
  if (cfg.covariance.size() != cfg.indicator_count)
    throw ConfigError("covariance size != indicator_count");
  if (cfg.initial_levels.size() != cfg.indicator_count)
    throw ConfigError("initial_levels size != indicator_count");
  for (double v : cfg.initial_levels)
    if (v <= 0) throw ConfigError("initial levels must be strictly positive");
  psd_factor(cfg.covariance);  // throws when not symmetric PSD
}

/// Stable hash of the model configuration, used to check that master and
/// workers regenerate from the same recipe.
inline std::uint64_t config_digest(const EconomicModelConfig& cfg) {
  serial::Fnv1a h;
  h.update_u64(cfg.indicator_count);
  h.update_u64(cfg.period_count);
  h.update_u64(cfg.seed);
  for (double v : cfg.drift) h.update_f64(v);
  for (const auto& row : cfg.covariance)
    for (double v : row) h.update_f64(v);
  for (double v : cfg.initial_levels) h.update_f64(v);
  return h.digest();
}

/// One scenario: `periods` consecutive indicator-level vectors.
struct ScenarioView {
  const double* data = nullptr;
  std::uint32_t periods = 0;
  std::uint32_t indicators = 0;

  [[nodiscard]] double level(std::uint32_t t, std::uint32_t k) const {
    return data[static_cast<std::size_t>(t) * indicators + k];
  }
};

/// N scenarios of T periods and K indicators, row-major [n][t][k].
/// `first_index` is the global index of scenario 0, so a worker's slice of a
/// larger set keeps its identity (and its per-scenario random substreams).
struct ScenarioSet {
  std::uint64_t count = 0;           // N
  std::uint32_t period_count = 0;    // T
  std::uint32_t indicator_count = 0; // K
  std::uint64_t seed = 0;
  std::uint64_t config_digest = 0;
  std::uint64_t first_index = 0;
  std::vector<double> data;

  [[nodiscard]] ScenarioView scenario(std::uint64_t n) const {
    return {data.data() + n * period_count * indicator_count, period_count, indicator_count};
  }
  bool operator==(const ScenarioSet&) const = default;
};

namespace detail {

inline void fill_scenario(const EconomicModelConfig& cfg,
                          const std::vector<std::vector<double>>& factor,
                          std::uint64_t scenario_index, double* out) {
  const std::uint32_t k = cfg.indicator_count;
  CounterRng rng(cfg.seed, scenario_index);
  for (std::uint32_t j = 0; j < k; ++j) out[j] = cfg.initial_levels[j];
  std::vector<double> z(k);
  for (std::uint32_t t = 1; t < cfg.period_count; ++t) {
    for (std::uint32_t j = 0; j < k; ++j) z[j] = rng.next_normal();
    double* row = out + static_cast<std::size_t>(t) * k;
    const double* prev = row - k;
    for (std::uint32_t j = 0; j < k; ++j) {
      double g = cfg.drift[j];
      for (std::uint32_t r = 0; r <= j; ++r) g += factor[j][r] * z[r];
      row[j] = prev[j] * std::exp(g);
    }
  }
}

}  // namespace detail

/// Generates scenarios [range.lo, range.hi) of a `total`-scenario set. The
/// result is bit-identical to the corresponding slice of the full set,
/// whatever machine generates it.
inline ScenarioSet generate_scenario_range(const EconomicModelConfig& cfg, std::uint64_t total,
                                           IndexRange range) {
  validate(cfg);
  if (total < 1) throw ValidationError("generate_scenarios: count must be >= 1");
  if (range.lo >= range.hi || range.hi > total)
    throw ValidationError("generate_scenario_range: bad range");
  const auto factor = psd_factor(cfg.covariance);

  ScenarioSet set;
  set.count = range.size();
  set.period_count = cfg.period_count;
  set.indicator_count = cfg.indicator_count;
  set.seed = cfg.seed;
  set.config_digest = config_digest(cfg);
  set.first_index = range.lo;
  set.data.resize(set.count * cfg.period_count * cfg.indicator_count);
  const std::size_t stride = static_cast<std::size_t>(cfg.period_count) * cfg.indicator_count;
  for (std::uint64_t n = range.lo; n < range.hi; ++n)
    detail::fill_scenario(cfg, factor, n, set.data.data() + (n - range.lo) * stride);
  return set;
}

inline ScenarioSet generate_scenarios(const EconomicModelConfig& cfg, std::uint64_t count) {
  return generate_scenario_range(cfg, count, {0, count});
}

/// Fixed-mix investment strategy: target allocation weights on the K
/// indicators, an optional per-period contribution, and a flag controlling
/// whether the allocation is rebalanced back to the targets each period.
struct StrategyParams {
  std::vector<double> weights;
  double contribution_rate = 0.0;
  bool rebalance = true;
};

inline void validate(const StrategyParams& p) {
  if (p.weights.empty()) throw ValidationError("strategy needs at least one weight");
  double sum = 0.0;
  for (double w : p.weights) {
    if (w < 0.0 || w > 1.0) throw ValidationError("weights must lie in [0, 1]");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("weights must sum to 1");
  if (p.contribution_rate < 0.0 || p.contribution_rate > 1.0)
    throw ValidationError("contribution_rate must lie in [0, 1]");
}

struct EvaluationOutcome {
  std::vector<double> values;  // one terminal total return per scenario
};

/// Runs the strategy over one scenario: wealth starts at 1, each period
/// grows by the weight-blended indicator returns and receives the
/// contribution. Returns terminal wealth (total return).
inline double evaluate_strategy(const StrategyParams& params, const ScenarioView& scenario) {
  validate(params);
  if (scenario.periods < 2) throw ValidationError("scenario needs at least 2 periods");
  if (scenario.indicators != params.weights.size())
    throw ValidationError("weight count does not match scenario indicators");

  const std::uint32_t k = scenario.indicators;
  if (params.rebalance) {
    double wealth = 1.0;
    for (std::uint32_t t = 1; t < scenario.periods; ++t) {
      double blended = 0.0;
      for (std::uint32_t j = 0; j < k; ++j)
        blended += params.weights[j] * (scenario.level(t, j) / scenario.level(t - 1, j));
      wealth = wealth * blended + params.contribution_rate;
    }
    return wealth;
  }
  // Buy-and-hold: per-asset holdings drift with their own returns;
  // contributions are invested at the target weights.
  std::vector<double> holdings(k);
  for (std::uint32_t j = 0; j < k; ++j) holdings[j] = params.weights[j];
  for (std::uint32_t t = 1; t < scenario.periods; ++t) {
    for (std::uint32_t j = 0; j < k; ++j) {
      holdings[j] *= scenario.level(t, j) / scenario.level(t - 1, j);
      holdings[j] += params.contribution_rate * params.weights[j];
    }
  }
  double wealth = 0.0;
  for (double h : holdings) wealth += h;
  return wealth;
}

/// Evaluates the strategy on scenarios [subset.lo, subset.hi) of the set
/// (local indices). Element i of the result is scenario subset.lo + i; the
/// outcome is independent of evaluation order by construction.
inline EvaluationOutcome evaluate_set(const StrategyParams& params, const ScenarioSet& set,
                                      std::optional<IndexRange> subset = std::nullopt) {
  const IndexRange range = subset.value_or(IndexRange{0, set.count});
  if (range.lo >= range.hi) throw ValidationError("evaluate_set: empty subset");
  if (range.hi > set.count) throw ValidationError("evaluate_set: subset out of bounds");
  EvaluationOutcome out;
  out.values.reserve(range.size());
  for (std::uint64_t n = range.lo; n < range.hi; ++n)
    out.values.push_back(evaluate_strategy(params, set.scenario(n)));
  return out;
}

}  // namespace almcluster
