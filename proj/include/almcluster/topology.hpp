#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "almcluster/errors.hpp"

namespace almcluster {

enum class TopologyKind { star, tree, ring, ring_of_rings, optimal_tree };

inline const char* to_string(TopologyKind k) {
  switch (k) {
    case TopologyKind::star: return "star";
    case TopologyKind::tree: return "tree";
    case TopologyKind::ring: return "ring";
    case TopologyKind::ring_of_rings: return "ring_of_rings";
    case TopologyKind::optimal_tree: return "optimal_tree";
  }
  return "?";
}

/// Communication graph. Node ids are 0..node_count-1; node 0 is the root
/// whenever a root exists (star and tree kinds). `labels` carries the
/// creation-step label of each node for optimal trees and is empty otherwise.
struct Topology {
  TopologyKind kind = TopologyKind::star;
  std::uint32_t node_count = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  std::optional<std::uint32_t> root;
  std::vector<std::uint32_t> labels;

  // Derived rooted structure; empty for pure rings.
  std::vector<std::int64_t> parent;                 // -1 at the root
  std::vector<std::vector<std::uint32_t>> children; // in service (label, id) order

  [[nodiscard]] std::vector<std::uint32_t> degrees() const {
    std::vector<std::uint32_t> deg(node_count, 0);
    for (auto [a, b] : edges) {
      ++deg[a];
      ++deg[b];
    }
    return deg;
  }
};

/// One directed transfer within a schedule round.
struct SchedulePair {
  std::uint32_t sender = 0;
  std::uint32_t receiver = 0;
  bool operator==(const SchedulePair&) const = default;
};

/// Ordered rounds of simultaneous transfers. In a broadcast every sender of
/// round r already holds the datum and no node appears twice within a round.
struct BroadcastSchedule {
  std::vector<std::vector<SchedulePair>> rounds;

  [[nodiscard]] std::size_t round_count() const { return rounds.size(); }
  [[nodiscard]] std::size_t transfer_count() const {
    std::size_t n = 0;
    for (const auto& r : rounds) n += r.size();
    return n;
  }
};

namespace detail {

inline void attach(Topology& t, std::uint32_t parent_id, std::uint32_t child_id) {
  t.edges.emplace_back(parent_id, child_id);
  t.parent[child_id] = parent_id;
  t.children[parent_id].push_back(child_id);
}

inline void init_rooted(Topology& t, std::uint32_t n) {
  t.node_count = n;
  t.root = 0;
  t.parent.assign(n, -1);
  t.children.assign(n, {});
}

// Service priority of a child: optimal trees serve by creation-step label,
// everything else by node id.
inline std::uint64_t service_key(const Topology& t, std::uint32_t node) {
  const std::uint64_t label = t.labels.empty() ? node : t.labels[node];
  return (label << 32) | node;
}

inline void sort_children_for_service(Topology& t) {
  for (auto& kids : t.children) {
    std::sort(kids.begin(), kids.end(), [&](std::uint32_t a, std::uint32_t b) {
      return service_key(t, a) < service_key(t, b);
    });
  }
}

}  // namespace detail

/// Master directly connected to q-1 slaves (one-level tree).
inline Topology build_star(std::uint32_t q) {
  if (q < 1) throw ValidationError("build_star: need at least one node");
  Topology t;
  t.kind = TopologyKind::star;
  detail::init_rooted(t, q);
  for (std::uint32_t i = 1; i < q; ++i) detail::attach(t, 0, i);
  return t;
}

/// Multi-level master tree. fanouts[l] is the child count of every node at
/// depth l; ids are assigned breadth-first, so e.g. fanouts {3, 2} gives the
/// root 0 three mid-level masters 1..3 each with two slaves among 4..9.
inline Topology build_tree(const std::vector<std::uint32_t>& fanouts) {
  if (fanouts.empty()) throw ValidationError("build_tree: fanout list is empty");
  for (auto f : fanouts)
    if (f < 1) throw ValidationError("build_tree: fanouts must be >= 1");

  std::uint64_t total = 1, level = 1;
  for (auto f : fanouts) {
    level *= f;
    total += level;
  }
  Topology t;
  t.kind = TopologyKind::tree;
  detail::init_rooted(t, static_cast<std::uint32_t>(total));

  std::vector<std::uint32_t> frontier{0};
  std::uint32_t next_id = 1;
  for (auto f : fanouts) {
    std::vector<std::uint32_t> next_frontier;
    for (auto node : frontier) {
      for (std::uint32_t c = 0; c < f; ++c) {
        detail::attach(t, node, next_id);
        next_frontier.push_back(next_id);
        ++next_id;
      }
    }
    frontier = std::move(next_frontier);
  }
  return t;
}

/// Simple cycle 0-1-...-(q-1)-0. Index order is the ring order.
inline Topology build_ring(std::uint32_t q) {
  if (q < 3) throw ValidationError("build_ring: a ring needs at least 3 nodes");
  Topology t;
  t.kind = TopologyKind::ring;
  t.node_count = q;
  for (std::uint32_t i = 0; i < q; ++i) t.edges.emplace_back(i, (i + 1) % q);
  return t;
}

/// Nested ring description: a ring of `size` positions, where selected
/// positions are junction machines shared with a lower-level ring.
struct RingSpec {
  std::uint32_t size = 0;
  std::vector<std::pair<std::uint32_t, RingSpec>> subrings;  // (position, nested ring)
};

namespace detail {

inline void build_ring_rec(Topology& t, const RingSpec& spec, std::uint32_t junction,
                           bool has_junction, std::uint32_t& next_id) {
  if (spec.size < 3) throw ValidationError("build_ring_of_rings: every ring needs >= 3 nodes");
  std::vector<std::uint32_t> ids(spec.size);
  std::uint32_t start = 0;
  if (has_junction) {
    ids[0] = junction;  // shared machine, position 0 of the subring
    start = 1;
  }
  for (std::uint32_t i = start; i < spec.size; ++i) ids[i] = next_id++;
  for (std::uint32_t i = 0; i < spec.size; ++i)
    t.edges.emplace_back(ids[i], ids[(i + 1) % spec.size]);

  std::set<std::uint32_t> used;
  for (const auto& [pos, sub] : spec.subrings) {
    if (pos >= spec.size) throw ValidationError("build_ring_of_rings: subring position out of range");
    if (!used.insert(pos).second)
      throw ValidationError("build_ring_of_rings: at most one subring per position");
    build_ring_rec(t, sub, ids[pos], true, next_id);
  }
}

}  // namespace detail

/// Ring of rings: each listed position of the top ring is a junction machine
/// belonging to both its ring and the nested one, so no machine exceeds
/// degree 4 (two network cards per ring membership).
inline Topology build_ring_of_rings(const RingSpec& spec) {
  Topology t;
  t.kind = TopologyKind::ring_of_rings;
  std::uint32_t next_id = 0;
  detail::build_ring_rec(t, spec, 0, false, next_id);
  t.node_count = next_id;
  return t;
}

/// Doubling tree: start from the root labeled 0; at step s every existing
/// node gains one child labeled s, so k steps produce 2^k nodes. The
/// remaining p - 2^k machines hang as extra leaves off the lowest-labeled
/// nodes, labeled k+1. Broadcast completes in ceil(log2 p) rounds.
inline Topology build_optimal_tree(std::uint32_t p) {
  if (p < 1) throw ValidationError("build_optimal_tree: need at least one node");
  Topology t;
  t.kind = TopologyKind::optimal_tree;
  detail::init_rooted(t, p);
  t.labels.assign(p, 0);

  std::uint32_t count = 1;
  std::uint32_t step = 0;
  while (count * 2 <= p) {
    ++step;
    for (std::uint32_t i = 0; i < count; ++i) {
      const std::uint32_t child = count + i;
      detail::attach(t, i, child);
      t.labels[child] = step;
    }
    count *= 2;
  }
  const std::uint32_t extras = p - count;  // < count, one per host node
  for (std::uint32_t j = 0; j < extras; ++j) {
    const std::uint32_t child = count + j;
    detail::attach(t, j, child);
    t.labels[child] = step + 1;
  }
  detail::sort_children_for_service(t);
  return t;
}

/// Root-to-leaves dissemination rounds. Every node that holds the datum and
/// still has unserved children sends each round, to the unserved child with
/// the smallest (label, id) key; rings have no root and are rejected.
inline BroadcastSchedule broadcast_schedule(const Topology& t) {
  if (!t.root.has_value())
    throw ValidationError("broadcast_schedule: topology has no root; rings circulate instead");
  BroadcastSchedule schedule;
  std::vector<bool> informed(t.node_count, false);
  std::vector<std::size_t> next_child(t.node_count, 0);
  informed[*t.root] = true;
  std::uint32_t informed_count = 1;

  while (informed_count < t.node_count) {
    std::vector<SchedulePair> round;
    for (std::uint32_t node = 0; node < t.node_count; ++node) {
      if (!informed[node] || next_child[node] >= t.children[node].size()) continue;
      const std::uint32_t child = t.children[node][next_child[node]];
      ++next_child[node];
      round.push_back({node, child});
    }
    if (round.empty()) throw ValidationError("broadcast_schedule: disconnected topology");
    for (const auto& p : round) {
      informed[p.receiver] = true;
      ++informed_count;
    }
    schedule.rounds.push_back(std::move(round));
  }
  return schedule;
}

/// Leaves-to-root collection: the broadcast rounds reversed with every pair
/// flipped, so each node has heard from all children before it sends up.
inline BroadcastSchedule reduce_schedule(const Topology& t) {
  BroadcastSchedule schedule = broadcast_schedule(t);
  std::reverse(schedule.rounds.begin(), schedule.rounds.end());
  for (auto& round : schedule.rounds)
    for (auto& p : round) std::swap(p.sender, p.receiver);
  return schedule;
}

/// Alternating even/odd pairing of a ring: even rounds the even-indexed
/// machines send to their left neighbor, odd rounds the odd-indexed ones do,
/// so every link carries exactly one transfer per two rounds. Requires an
/// even ring size (the pairing is a 2-coloring of the cycle).
inline BroadcastSchedule ring_even_odd_schedule(const Topology& ring, std::size_t rounds) {
  if (ring.kind != TopologyKind::ring)
    throw ValidationError("ring_even_odd_schedule: not a ring");
  if (ring.node_count % 2 != 0)
    throw ValidationError("ring_even_odd_schedule: ring size must be even");
  BroadcastSchedule schedule;
  for (std::size_t r = 0; r < rounds; ++r) {
    std::vector<SchedulePair> round;
    for (std::uint32_t i = r % 2; i < ring.node_count; i += 2) {
      const std::uint32_t left = (i + ring.node_count - 1) % ring.node_count;
      round.push_back({i, left});
    }
    schedule.rounds.push_back(std::move(round));
  }
  return schedule;
}

/// True when the edge set is exactly the cycle 0-1-...-(n-1)-0; the 2-node
/// ring degenerates to the single pair (0, 1).
inline bool is_simple_cycle(const Topology& t) {
  if (t.node_count < 2) return false;
  std::set<std::pair<std::uint32_t, std::uint32_t>> canon;
  for (auto [a, b] : t.edges) canon.insert({std::min(a, b), std::max(a, b)});
  if (t.node_count == 2) return canon == std::set<std::pair<std::uint32_t, std::uint32_t>>{{0, 1}};
  if (canon.size() != t.node_count) return false;
  for (std::uint32_t i = 0; i < t.node_count; ++i) {
    const std::uint32_t j = (i + 1) % t.node_count;
    if (!canon.contains({std::min(i, j), std::max(i, j)})) return false;
  }
  return true;
}

inline std::string format_edge_list(const Topology& t) {
  std::ostringstream out;
  for (auto [a, b] : t.edges) out << a << " " << b << "\n";
  return out.str();
}

/// CSV rows (round, sender, receiver), rounds numbered from 1.
inline std::string schedule_csv(const BroadcastSchedule& s) {
  std::ostringstream out;
  out << "round,sender,receiver\n";
  for (std::size_t r = 0; r < s.rounds.size(); ++r)
    for (const auto& p : s.rounds[r]) out << (r + 1) << "," << p.sender << "," << p.receiver << "\n";
  return out.str();
}

}  // namespace almcluster
