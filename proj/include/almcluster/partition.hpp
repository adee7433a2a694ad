#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "almcluster/errors.hpp"

namespace almcluster {

/// Half-open index range [lo, hi).
struct IndexRange {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;

  [[nodiscard]] std::uint64_t size() const { return hi - lo; }
  bool operator==(const IndexRange&) const = default;
};

/// Contiguous split of [0, total) across `machines` ranges, sizes differing
/// by at most one. Range i belongs to machine i; machine 0 is the master.
struct PartitionPlan {
  std::vector<IndexRange> assignments;
  std::uint64_t total = 0;
  std::uint64_t machines = 0;
};

namespace detail {

// floor(N/Q) everywhere, plus one extra for the first N mod Q machines.
inline PartitionPlan balance_unchecked(std::uint64_t scenario_count, std::uint64_t machine_count) {
  const std::uint64_t portion = scenario_count / machine_count;
  const std::uint64_t rest = scenario_count - portion * machine_count;
  PartitionPlan plan;
  plan.total = scenario_count;
  plan.machines = machine_count;
  plan.assignments.reserve(machine_count);
  std::uint64_t next = 0;
  for (std::uint64_t i = 0; i < machine_count; ++i) {
    const std::uint64_t size = portion + (i < rest ? 1 : 0);
    plan.assignments.push_back({next, next + size});
    next += size;
  }
  return plan;
}

}  // namespace detail

/// Splits `scenario_count` work items over `machine_count` machines so the
/// per-machine counts differ by at most one. Machines that would sit idle are
/// refused: callers must not request more machines than items.
inline PartitionPlan balance(std::uint64_t scenario_count, std::uint64_t machine_count) {
  if (machine_count < 1) throw ValidationError("balance: machine_count must be >= 1");
  if (scenario_count < 1) throw ValidationError("balance: scenario_count must be >= 1");
  if (scenario_count < machine_count) {
    throw ValidationError("balance: " + std::to_string(machine_count) + " machines for " +
                          std::to_string(scenario_count) + " scenarios would leave machines idle");
  }
  return detail::balance_unchecked(scenario_count, machine_count);
}

}  // namespace almcluster
