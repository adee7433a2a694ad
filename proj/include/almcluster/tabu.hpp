#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "almcluster/errors.hpp"
#include "almcluster/scenario.hpp"
#include "almcluster/stats.hpp"

namespace almcluster {

struct TabuConfig {
  std::uint32_t max_iterations = 5000;
  std::uint32_t tabu_tenure = 7;
  double step_size = 0.1;  // weight grid step; 1/step_size must be integral
  std::uint64_t seed = 0;
  double risk_aversion = 0.0;
  bool vary_contribution = true;  // when false the contribution rate is held fixed
};

inline void validate(const TabuConfig& cfg) {
  if (cfg.tabu_tenure < 1) throw ValidationError("tabu_tenure must be >= 1");
  if (cfg.step_size <= 0 || cfg.step_size > 1) throw ValidationError("step_size must be in (0, 1]");
  const double cells = 1.0 / cfg.step_size;
  if (std::abs(cells - std::round(cells)) > 1e-9)
    throw ValidationError("step_size must divide 1 into an integer grid");
  if (cfg.risk_aversion < 0) throw ValidationError("risk_aversion must be >= 0");
}

/// Move signature: a transfer of one grid step of weight from asset `from`
/// to asset `to`. Contribution moves borrow the sentinel ids K (up) and K+1
/// (down), so reversing any move is just swapping the pair.
struct Move {
  std::uint32_t from = 0;
  std::uint32_t to = 0;

  [[nodiscard]] Move reversed() const { return {to, from}; }
  auto operator<=>(const Move&) const = default;
};

/// All parameter points one grid step away: every feasible weight transfer
/// between two assets plus, unless fixed, the contribution rate nudged up or
/// down (clamped to [0, 1]). Moves that would leave the simplex are dropped,
/// so corners have fewer neighbors.
inline std::vector<std::pair<Move, StrategyParams>> neighborhood(const StrategyParams& p,
                                                                 double step,
                                                                 bool vary_contribution = true) {
  validate(p);
  const auto k = static_cast<std::uint32_t>(p.weights.size());
  std::vector<std::pair<Move, StrategyParams>> out;
  for (std::uint32_t i = 0; i < k; ++i) {
    if (p.weights[i] < step - 1e-12) continue;
    for (std::uint32_t j = 0; j < k; ++j) {
      if (i == j || p.weights[j] + step > 1.0 + 1e-12) continue;
      StrategyParams q = p;
      q.weights[i] = std::max(0.0, q.weights[i] - step);
      q.weights[j] = std::min(1.0, q.weights[j] + step);
      out.push_back({Move{i, j}, std::move(q)});
    }
  }
  if (vary_contribution) {
    const double up = std::min(1.0, p.contribution_rate + step);
    if (up > p.contribution_rate + 1e-15) {
      StrategyParams q = p;
      q.contribution_rate = up;
      out.push_back({Move{k, k + 1}, std::move(q)});
    }
    const double down = std::max(0.0, p.contribution_rate - step);
    if (down < p.contribution_rate - 1e-15) {
      StrategyParams q = p;
      q.contribution_rate = down;
      out.push_back({Move{k + 1, k}, std::move(q)});
    }
  }
  return out;
}

struct TabuState {
  StrategyParams current;
  StrategyParams best;
  double best_objective = std::numeric_limits<double>::infinity();
  std::deque<Move> tabu_list;  // most recent first, length <= tenure
  std::uint32_t iteration = 0;
};

using Evaluator = std::function<ObjectiveValue(const StrategyParams&)>;

/// One search iteration: evaluate the neighborhood, admit non-tabu moves and
/// tabu ones that beat the best known objective (aspiration), take the best
/// admissible move even when it is uphill, and make its reversal tabu.
/// Returns the accepted objective, or nothing when no move is admissible.
inline std::optional<double> step(TabuState& state, const Evaluator& evaluator,
                                  const TabuConfig& cfg) {
  validate(cfg);
  auto neighbors = neighborhood(state.current, cfg.step_size, cfg.vary_contribution);
  ++state.iteration;

  const Move* best_move = nullptr;
  const StrategyParams* best_params = nullptr;
  double best_obj = std::numeric_limits<double>::infinity();
  for (const auto& [move, params] : neighbors) {
    double obj;
    try {
      obj = evaluator(params).objective;
    } catch (const std::exception& e) {
      throw std::runtime_error("tabu iteration " + std::to_string(state.iteration) +
                               ": evaluator failed: " + e.what());
    }
    const bool tabu =
        std::find(state.tabu_list.begin(), state.tabu_list.end(), move) != state.tabu_list.end();
    if (tabu && !(obj < state.best_objective)) continue;
    // Deterministic tie-break: the lexicographically smallest move wins.
    if (obj < best_obj || (obj == best_obj && best_move && move < *best_move)) {
      best_obj = obj;
      best_move = &move;
      best_params = &params;
    }
  }
  if (!best_move) return std::nullopt;

  state.tabu_list.push_front(best_move->reversed());
  while (state.tabu_list.size() > cfg.tabu_tenure) state.tabu_list.pop_back();
  state.current = *best_params;
  if (best_obj < state.best_objective) {
    state.best_objective = best_obj;
    state.best = state.current;
  }
  return best_obj;
}

struct TraceRow {
  std::uint32_t iteration = 0;
  double objective = 0.0;       // objective of the accepted move
  double best_objective = 0.0;  // best seen so far
};

struct OptimizeResult {
  StrategyParams best;
  double best_objective = 0.0;
  std::vector<TraceRow> trace;
  std::uint32_t iterations = 0;  // search steps actually executed
  std::uint64_t evaluations = 0; // evaluator calls, start point included
};

/// Full search loop: evaluates the start point, then steps until the
/// iteration budget runs out or the neighborhood offers no admissible move.
inline OptimizeResult optimize(const Evaluator& evaluator, const TabuConfig& cfg,
                               const StrategyParams& initial) {
  validate(cfg);
  validate(initial);
  TabuState state;
  state.current = initial;
  state.best = initial;
  state.best_objective = evaluator(initial).objective;

  OptimizeResult result;
  result.evaluations = 1;
  const auto counting = [&](const StrategyParams& p) {
    ++result.evaluations;
    return evaluator(p);
  };
  for (std::uint32_t i = 0; i < cfg.max_iterations; ++i) {
    const auto accepted = step(state, counting, cfg);
    if (!accepted) break;
    result.trace.push_back({state.iteration, *accepted, state.best_objective});
  }
  result.best = state.best;
  result.best_objective = state.best_objective;
  result.iterations = state.iteration;
  return result;
}

inline std::string trace_csv(const OptimizeResult& result) {
  std::ostringstream out;
  out.precision(17);
  out << "iteration,objective,best_objective\n";
  for (const auto& row : result.trace)
    out << row.iteration << "," << row.objective << "," << row.best_objective << "\n";
  return out.str();
}

}  // namespace almcluster
