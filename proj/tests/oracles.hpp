#pragma once

// Independent reference implementations the tests check the library against.
// Everything here is deliberately written the slow, obvious way and shares
// no code with the headers under include/.

#include <cmath>
#include <cstdint>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "almcluster/topology.hpp"

namespace oracles {

/// Two-pass mean and population stdev.
inline std::pair<double, double> two_pass_mean_stdev(std::span<const double> v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= static_cast<double>(v.size());
  return {mean, std::sqrt(var)};
}

/// Literal transcription of the balancing loop: integer-part portion, then
/// portion+1 scenarios for the first Rest machines.
inline std::vector<std::uint64_t> literal_partition_sizes(std::uint64_t number_of_scenarios,
                                                          std::uint64_t cluster_size) {
  const std::uint64_t portion_size = number_of_scenarios / cluster_size;
  const std::uint64_t rest = number_of_scenarios - portion_size * cluster_size;
  std::vector<std::uint64_t> sizes;
  for (std::uint64_t i = 0; i < cluster_size; ++i) {
    if (i < rest)
      sizes.push_back(portion_size + 1);
    else
      sizes.push_back(portion_size);
  }
  return sizes;
}

/// Validates a broadcast schedule against the dissemination rules: senders
/// already hold the datum, receivers do not, every pair is a topology edge,
/// no node appears twice in a round, and afterwards everyone holds it.
/// Returns the number of rounds.
inline std::size_t check_broadcast_schedule(const almcluster::Topology& t,
                                            const almcluster::BroadcastSchedule& s) {
  if (!t.root) throw std::runtime_error("oracle: schedule needs a rooted topology");
  std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (auto [a, b] : t.edges) edges.insert({std::min(a, b), std::max(a, b)});

  std::vector<bool> holds(t.node_count, false);
  holds[*t.root] = true;
  for (const auto& round : s.rounds) {
    std::set<std::uint32_t> busy;
    for (const auto& p : round) {
      if (!holds[p.sender]) throw std::runtime_error("oracle: sender does not hold the datum");
      if (holds[p.receiver]) throw std::runtime_error("oracle: receiver already informed");
      if (!edges.contains({std::min(p.sender, p.receiver), std::max(p.sender, p.receiver)}))
        throw std::runtime_error("oracle: pair is not a topology edge");
      if (!busy.insert(p.sender).second || !busy.insert(p.receiver).second)
        throw std::runtime_error("oracle: node appears twice in one round");
    }
    for (const auto& p : round) holds[p.receiver] = true;
  }
  for (bool h : holds)
    if (!h) throw std::runtime_error("oracle: some node never receives the datum");
  return s.rounds.size();
}

/// Naive matrix-vector product, double loop.
inline std::vector<double> naive_matvec(const std::vector<std::vector<double>>& a,
                                        std::span<const double> x) {
  std::vector<double> z;
  for (const auto& row : a) {
    double s = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) s += row[i] * x[i];
    z.push_back(s);
  }
  return z;
}

/// Central finite differences of a scalar function of the independent
/// variables, with the dependent ones recomputed as A x at every probe.
template <typename F>
std::vector<double> central_differences(F&& f, std::vector<double> x, double h) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f(x);
    x[i] = keep - h;
    const double down = f(x);
    x[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

}  // namespace oracles
