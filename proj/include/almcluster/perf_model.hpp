#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "almcluster/errors.hpp"

namespace almcluster {

/// Analytic timing parameters: how long one scenario takes on one machine
/// and how long one sequential message transaction costs.
struct PerfParams {
  double per_scenario_time = 0.0;  // minutes per scenario, single machine
  double transaction_time = 0.0;   // minutes per message leg
};

enum class Protocol { tcp, udp, any };

inline const char* to_string(Protocol p) {
  switch (p) {
    case Protocol::tcp: return "tcp";
    case Protocol::udp: return "udp";
    case Protocol::any: return "any";
  }
  return "?";
}

inline Protocol protocol_from_string(const std::string& s) {
  if (s == "tcp") return Protocol::tcp;
  if (s == "udp") return Protocol::udp;
  if (s == "any") return Protocol::any;
  throw ValidationError("unknown protocol '" + s + "'");
}

struct MeasurementRow {
  std::uint64_t scenario_count = 0;
  std::uint32_t machine_count = 0;
  double duration = 0.0;  // minutes
  Protocol protocol = Protocol::any;
};

inline std::uint32_t ceil_log2(std::uint32_t m) {
  std::uint32_t rounds = 0;
  std::uint32_t reach = 1;
  while (reach < m) {
    reach *= 2;
    ++rounds;
  }
  return rounds;
}

/// Star (one-level tree) cluster time for `machines` total machines, master
/// included in the compute split: compute/machines plus one transaction per
/// slave, i.e. (machines - 1) sequential message legs.
inline double predict_star(std::uint64_t scen, std::uint32_t machines, const PerfParams& p) {
  if (machines < 1) throw ValidationError("predict_star: machines must be >= 1");
  if (scen < machines) throw ValidationError("predict_star: fewer scenarios than machines");
  const double compute = p.per_scenario_time * static_cast<double>(scen) / machines;
  return compute + static_cast<double>(machines - 1) * p.transaction_time;
}

/// Doubling-tree cluster time: the transaction term grows as ceil(log2 m)
/// instead of linearly.
inline double predict_optimal_tree(std::uint64_t scen, std::uint32_t machines, const PerfParams& p) {
  if (machines < 1) throw ValidationError("predict_optimal_tree: machines must be >= 1");
  if (scen < machines) throw ValidationError("predict_optimal_tree: fewer scenarios than machines");
  const double compute = p.per_scenario_time * static_cast<double>(scen) / machines;
  return compute + static_cast<double>(ceil_log2(machines)) * p.transaction_time;
}

/// Smallest machine count m (>= 2) at which adding machines to a star stops
/// paying off: cluster_time / transaction_time < m * (m - 1).
inline std::uint32_t break_even_star(double scen_cluster_time, double tt) {
  if (tt <= 0) throw ValidationError("break_even_star: transaction time must be > 0");
  const double ratio = scen_cluster_time / tt;
  std::uint32_t m = 2;
  while (ratio >= static_cast<double>(m) * (m - 1)) ++m;
  return m;
}

struct RowFit {
  MeasurementRow row;
  double baseline = 0.0;          // single-machine time for scen/machines
  double transaction_time = 0.0;  // per machine leg
};

struct ProtocolFit {
  Protocol protocol = Protocol::any;
  double transaction_time = 0.0;     // mean of the per-row values
  double max_relative_spread = 0.0;  // max |row - mean| / mean
  std::vector<RowFit> rows;
};

struct TransactionTimeFit {
  std::optional<ProtocolFit> tcp;
  std::optional<ProtocolFit> udp;
  double single_rate = 0.0;  // least-squares minutes per scenario over the 1-machine rows
};

namespace detail {

// Single-machine duration at `target` scenarios: an exact row when one
// exists, otherwise the nearest row scaled linearly.
inline double single_baseline(const std::vector<MeasurementRow>& singles, double target) {
  const MeasurementRow* best = nullptr;
  double best_dist = 0.0;
  for (const auto& s : singles) {
    const double dist = std::abs(static_cast<double>(s.scenario_count) - target);
    if (!best || dist < best_dist ||
        (dist == best_dist && s.scenario_count < best->scenario_count)) {
      best = &s;
      best_dist = dist;
    }
  }
  if (!best) throw InsufficientDataError("no single-machine baseline rows");
  return best->duration * target / static_cast<double>(best->scenario_count);
}

inline std::optional<ProtocolFit> fit_protocol(const std::vector<MeasurementRow>& cluster,
                                               const std::vector<MeasurementRow>& singles,
                                               Protocol which) {
  ProtocolFit fit;
  fit.protocol = which;
  for (const auto& row : cluster) {
    if (row.protocol != which) continue;
    const double target = static_cast<double>(row.scenario_count) / row.machine_count;
    RowFit rf;
    rf.row = row;
    rf.baseline = single_baseline(singles, target);
    rf.transaction_time = (row.duration - rf.baseline) / (row.machine_count - 1);
    fit.rows.push_back(rf);
  }
  if (fit.rows.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& rf : fit.rows) sum += rf.transaction_time;
  fit.transaction_time = sum / static_cast<double>(fit.rows.size());
  for (const auto& rf : fit.rows) {
    const double spread = std::abs(rf.transaction_time - fit.transaction_time) /
                          std::abs(fit.transaction_time);
    fit.max_relative_spread = std::max(fit.max_relative_spread, spread);
  }
  return fit;
}

}  // namespace detail

/// Recovers the per-machine transaction time for each protocol from measured
/// cluster runs against single-machine baselines, TT = (Tc - Ts(scen/m)) /
/// (m - 1). Also fits the single-machine per-scenario rate (least squares
/// through the origin), for use by the prediction curves.
inline TransactionTimeFit fit_transaction_time(const std::vector<MeasurementRow>& rows) {
  std::vector<MeasurementRow> singles, cluster;
  for (const auto& r : rows) {
    if (r.machine_count == 0) throw ValidationError("measurement row with zero machines");
    (r.machine_count == 1 ? singles : cluster).push_back(r);
  }
  if (singles.empty()) throw InsufficientDataError("no single-machine rows to use as baselines");
  if (cluster.empty()) throw InsufficientDataError("no cluster rows to fit transaction time from");

  TransactionTimeFit out;
  double num = 0.0, den = 0.0;
  for (const auto& s : singles) {
    const double n = static_cast<double>(s.scenario_count);
    num += n * s.duration;
    den += n * n;
  }
  out.single_rate = num / den;
  out.tcp = detail::fit_protocol(cluster, singles, Protocol::tcp);
  out.udp = detail::fit_protocol(cluster, singles, Protocol::udp);
  if (!out.tcp && !out.udp) throw InsufficientDataError("cluster rows carry no tcp or udp protocol tag");
  return out;
}

struct CurvePoint {
  std::string topology;  // "star" or "optimal_tree"
  std::uint64_t scenario_count = 0;
  std::uint32_t machines = 0;
  std::uint32_t slaves = 0;
  double minutes = 0.0;
  double speedup = 0.0;          // single-machine time / cluster time
  bool slower_than_prev = false; // marker: adding this machine increased the time
};

/// Predicted time and speedup for both topologies across a machine range.
inline std::vector<CurvePoint> efficiency_curves(const std::vector<std::uint64_t>& scen_list,
                                                 std::uint32_t machines_lo, std::uint32_t machines_hi,
                                                 const PerfParams& p) {
  if (machines_lo < 1 || machines_hi < machines_lo)
    throw ValidationError("efficiency_curves: bad machine range");
  std::vector<CurvePoint> points;
  for (const char* topo : {"star", "optimal_tree"}) {
    for (auto scen : scen_list) {
      double prev = 0.0;
      for (std::uint32_t m = machines_lo; m <= machines_hi; ++m) {
        CurvePoint cp;
        cp.topology = topo;
        cp.scenario_count = scen;
        cp.machines = m;
        cp.slaves = m - 1;
        cp.minutes = topo == std::string("star") ? predict_star(scen, m, p)
                                                 : predict_optimal_tree(scen, m, p);
        cp.speedup = (p.per_scenario_time * static_cast<double>(scen)) / cp.minutes;
        cp.slower_than_prev = (m > machines_lo && cp.minutes > prev);
        prev = cp.minutes;
        points.push_back(cp);
      }
    }
  }
  return points;
}

inline std::string curves_csv(const std::vector<CurvePoint>& points) {
  std::ostringstream out;
  out << "topology,scenarios,machines,slaves,minutes,speedup,slower_than_prev\n";
  out.precision(10);
  for (const auto& cp : points) {
    out << cp.topology << "," << cp.scenario_count << "," << cp.machines << "," << cp.slaves << ","
        << cp.minutes << "," << cp.speedup << "," << (cp.slower_than_prev ? 1 : 0) << "\n";
  }
  return out.str();
}

/// Parses measurement rows from CSV with columns
/// scenarios,machines,duration_minutes,protocol. A header line is skipped
/// when present; parse failures name the offending row.
inline std::vector<MeasurementRow> parse_measurements_csv(std::istream& in) {
  std::vector<MeasurementRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.back() == '\r') {
      while (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
    }
    if (line_no == 1 && line.find("scenarios") != std::string::npos) continue;
    std::istringstream ls(line);
    std::string field;
    MeasurementRow row;
    try {
      if (!std::getline(ls, field, ',')) throw ValidationError("missing scenarios");
      row.scenario_count = std::stoull(field);
      if (!std::getline(ls, field, ',')) throw ValidationError("missing machines");
      row.machine_count = static_cast<std::uint32_t>(std::stoul(field));
      if (!std::getline(ls, field, ',')) throw ValidationError("missing duration");
      row.duration = std::stod(field);
      if (!std::getline(ls, field, ',')) throw ValidationError("missing protocol");
      row.protocol = protocol_from_string(field);
    } catch (const std::exception& e) {
      throw ValidationError("measurements CSV row " + std::to_string(line_no) + ": " + e.what());
    }
    if (row.scenario_count == 0 || row.machine_count == 0 || row.duration <= 0)
      throw ValidationError("measurements CSV row " + std::to_string(line_no) +
                            ": fields must be positive");
    rows.push_back(row);
  }
  return rows;
}

}  // namespace almcluster
