#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "almcluster/errors.hpp"
#include "almcluster/partition.hpp"

namespace almcluster {

/// Linear map from the independent variables x (dimension dim_m) to the
/// dependent ones z = A x, so the full point of the constrained domain is
/// (x, z) with n_total = dim_m + rows(A) coordinates.
struct ConstraintMatrix {
  std::vector<std::vector<double>> a;  // (n_total - dim_m) rows of dim_m entries
  std::uint32_t dim_m = 0;

  [[nodiscard]] std::uint32_t dependent_count() const { return static_cast<std::uint32_t>(a.size()); }
  [[nodiscard]] std::uint32_t n_total() const { return dim_m + dependent_count(); }
};

inline void validate(const ConstraintMatrix& cm) {
  if (cm.dim_m < 1) throw ValidationError("constraint matrix needs dim_m >= 1");
  for (const auto& row : cm.a)
    if (row.size() != cm.dim_m) throw ValidationError("constraint matrix row width != dim_m");
}

/// Dependent values z_j = sum_i a[j][i] * x_i for the requested rows (all
/// rows when the subset is omitted). Row blocks evaluate independently, so a
/// partition of rows concatenates to the full result exactly.
inline std::vector<double> eval_dependent(const ConstraintMatrix& cm, std::span<const double> x,
                                          std::optional<IndexRange> rows = std::nullopt) {
  validate(cm);
  if (x.size() != cm.dim_m) throw ValidationError("eval_dependent: x size != dim_m");
  const IndexRange range = rows.value_or(IndexRange{0, cm.dependent_count()});
  if (range.hi > cm.dependent_count() || range.lo > range.hi)
    throw ValidationError("eval_dependent: row subset out of bounds");
  std::vector<double> z;
  z.reserve(range.size());
  for (std::uint64_t j = range.lo; j < range.hi; ++j) {
    double s = 0.0;
    for (std::uint32_t i = 0; i < cm.dim_m; ++i) s += cm.a[j][i] * x[i];
    z.push_back(s);
  }
  return z;
}

/// Partial derivatives of the objective at a full point: dF/dx over the
/// independent coordinates and dF/dz over the dependent ones.
struct ObjectivePartials {
  std::vector<double> dx;
  std::vector<double> dz;
};

using PartialsFn =
    std::function<ObjectivePartials(std::span<const double> x, std::span<const double> z)>;

/// Chain-rule gradient through the dependent variables:
/// g_i = dF/dx_i + sum_j dF/dz_j * a[j][i], using dz_j/dx_i = a[j][i].
inline std::vector<double> gradient(const PartialsFn& f_partials, const ConstraintMatrix& cm,
                                    std::span<const double> x) {
  const std::vector<double> z = eval_dependent(cm, x);
  const ObjectivePartials p = f_partials(x, z);
  if (p.dx.size() != cm.dim_m) throw ValidationError("gradient: dF/dx size != dim_m");
  if (p.dz.size() != cm.dependent_count())
    throw ValidationError("gradient: dF/dz size != dependent count");
  std::vector<double> g(p.dx);
  for (std::uint32_t j = 0; j < cm.dependent_count(); ++j)
    for (std::uint32_t i = 0; i < cm.dim_m; ++i) g[i] += p.dz[j] * cm.a[j][i];
  return g;
}

/// Per-machine slice of the matrix: a balanced block of rows (for objective
/// evaluation) and a balanced block of columns (for the gradient). The
/// duplicated elements are the row-block/column-block crossings each machine
/// stores twice rather than re-sending per gradient call.
struct RowColPlan {
  std::vector<IndexRange> rows;
  std::vector<IndexRange> cols;
  std::uint32_t machine_count = 0;

  [[nodiscard]] std::uint64_t duplicated_elements(std::uint32_t machine) const {
    return rows[machine].size() * cols[machine].size();
  }
  [[nodiscard]] std::uint64_t total_duplicated_elements() const {
    std::uint64_t total = 0;
    for (std::uint32_t k = 0; k < machine_count; ++k) total += duplicated_elements(k);
    return total;
  }
};

inline RowColPlan plan_distribution(const ConstraintMatrix& cm, std::uint32_t machine_count) {
  validate(cm);
  if (machine_count < 1) throw ValidationError("plan_distribution: need at least one machine");
  const std::uint64_t rows = cm.dependent_count();
  const std::uint64_t cols = cm.dim_m;
  if (machine_count > rows && machine_count > cols)
    throw ValidationError("plan_distribution: more machines than rows and columns");
  RowColPlan plan;
  plan.machine_count = machine_count;
  plan.rows = detail::balance_unchecked(rows, machine_count).assignments;
  plan.cols = detail::balance_unchecked(cols, machine_count).assignments;
  return plan;
}

struct ObjectiveTiming {
  double sequential = 0.0;
  double parallel = 0.0;
  bool parallel_wins = false;  // dim_m * (1 - 1/q) * t_scalar > t_in + t_out
};

/// Sequential vs distributed cost of one objective evaluation: dim_m scalar
/// products either on one machine or split q ways plus the input broadcast
/// and the result send-back.
inline ObjectiveTiming distributed_objective_time(std::uint32_t dim_m, std::uint32_t q,
                                                  double t_scalar, double t_in, double t_out) {
  if (dim_m < 1 || q < 1) throw ValidationError("distributed_objective_time: bad dimensions");
  if (t_scalar <= 0 || t_in < 0 || t_out < 0)
    throw ValidationError("distributed_objective_time: times must be positive");
  ObjectiveTiming t;
  t.sequential = static_cast<double>(dim_m) * t_scalar;
  t.parallel = t.sequential / q + t_in + t_out;
  t.parallel_wins = t.sequential * (1.0 - 1.0 / q) > t_in + t_out;
  return t;
}

/// Matrix CSV: a "rows,cols" header line, then row-major values one matrix
/// row per line.
inline ConstraintMatrix load_matrix_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("matrix CSV: missing header");
  std::istringstream hs(line);
  std::string field;
  std::uint64_t rows = 0, cols = 0;
  try {
    if (!std::getline(hs, field, ',')) throw ValidationError("no row count");
    rows = std::stoull(field);
    if (!std::getline(hs, field, ',')) throw ValidationError("no column count");
    cols = std::stoull(field);
  } catch (const std::exception& e) {
    throw ValidationError(std::string("matrix CSV header: ") + e.what());
  }
  ConstraintMatrix cm;
  cm.dim_m = static_cast<std::uint32_t>(cols);
  for (std::uint64_t r = 0; r < rows; ++r) {
    if (!std::getline(in, line))
      throw ValidationError("matrix CSV row " + std::to_string(r + 2) + ": missing");
    std::istringstream ls(line);
    std::vector<double> row;
    while (std::getline(ls, field, ',')) row.push_back(std::stod(field));
    if (row.size() != cols)
      throw ValidationError("matrix CSV row " + std::to_string(r + 2) + ": expected " +
                            std::to_string(cols) + " values, got " + std::to_string(row.size()));
    cm.a.push_back(std::move(row));
  }
  return cm;
}

}  // namespace almcluster
