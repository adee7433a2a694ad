#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "almcluster/errors.hpp"
#include "almcluster/topology.hpp"

namespace almcluster {

/// Mergeable (count, sum, sum of squares) triple. Enough to recover the mean
/// and the population stdev of a distributed outcome vector without a second
/// pass over the data.
struct ReductionSummary {
  std::uint64_t count = 0;
  double sum = 0.0;
  double sum_sq = 0.0;

  bool operator==(const ReductionSummary&) const = default;
};

struct ObjectiveValue {
  double mean = 0.0;
  double stdev = 0.0;
  double objective = 0.0;
};

inline ReductionSummary summarize(std::span<const double> values) {
  ReductionSummary s;
  s.count = values.size();
  for (double v : values) {
    s.sum += v;
    s.sum_sq += v * v;
  }
  return s;
}

/// Componentwise addition; associative and commutative, identity (0,0,0).
inline ReductionSummary merge(const ReductionSummary& a, const ReductionSummary& b) {
  return {a.count + b.count, a.sum + b.sum, a.sum_sq + b.sum_sq};
}

/// Population mean/stdev from a summary. The max(0, .) guard absorbs the
/// slightly negative variance the one-pass formula can produce in floating
/// point on near-constant data.
inline ObjectiveValue finalize(const ReductionSummary& s) {
  if (s.count == 0) throw ValidationError("finalize: empty summary");
  ObjectiveValue out;
  const double n = static_cast<double>(s.count);
  out.mean = s.sum / n;
  out.stdev = std::sqrt(std::max(0.0, s.sum_sq / n - out.mean * out.mean));
  return out;
}

/// Risk-adjusted objective -(mean - risk_aversion * stdev), negated so the
/// search loop always minimizes.
inline ObjectiveValue objective(const ReductionSummary& s, double risk_aversion) {
  if (risk_aversion < 0) throw ValidationError("objective: risk_aversion must be >= 0");
  ObjectiveValue out = finalize(s);
  out.objective = -(out.mean - risk_aversion * out.stdev);
  return out;
}

/// Circulates per-node summaries around a ring for node_count steps: each
/// step every node hands the value it last received (initially its own) to
/// its left neighbor and folds in the value arriving from the right. Values
/// are origin-tagged so the final step, which returns each node its own
/// value, adds nothing twice. Every node ends with the global merge.
inline std::vector<ReductionSummary> ring_allreduce(std::span<const ReductionSummary> per_node,
                                                    const Topology& ring) {
  const std::uint64_t q = ring.node_count;
  if (q < 2) throw ValidationError("ring_allreduce: ring must have at least 2 nodes");
  if (per_node.size() != q) throw ValidationError("ring_allreduce: need one summary per ring node");
  if (!is_simple_cycle(ring)) throw ValidationError("ring_allreduce: topology is not a simple cycle");

  std::vector<ReductionSummary> acc(per_node.begin(), per_node.end());
  // (origin, summary) pair in flight at each node.
  std::vector<std::pair<std::uint64_t, ReductionSummary>> in_flight(q);
  for (std::uint64_t k = 0; k < q; ++k) in_flight[k] = {k, per_node[k]};

  for (std::uint64_t step = 0; step < q; ++step) {
    std::vector<std::pair<std::uint64_t, ReductionSummary>> received(q);
    for (std::uint64_t k = 0; k < q; ++k) {
      const std::uint64_t right = (k + 1) % q;  // node k receives from its right neighbor
      received[k] = in_flight[right];
    }
    for (std::uint64_t k = 0; k < q; ++k) {
      if (received[k].first != k) acc[k] = merge(acc[k], received[k].second);
      in_flight[k] = received[k];
    }
  }
  return acc;
}

}  // namespace almcluster
