#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "elasteig/adaptive.hpp"

namespace elasteig {

struct TableRow {
  std::string block;  // e.g. "nu=0.35"
  int mode = 1;
  std::vector<double> values;  // sqrt(kappa_hat) per level
  double order = 0.0;
  double extrapolated = 0.0;   // sqrt(kappa_hat) limit
  std::optional<double> reference;
};

struct ReportTable {
  std::vector<std::string> columns;  // one label per level
  std::vector<double> h;             // mesh size per level
  std::vector<TableRow> rows;
  int digits = 4;
};

struct TableBlock {
  std::string label;
  const ConvergenceHistory* history = nullptr;
};

struct TableSpec {
  std::vector<std::string> column_labels;  // defaults to the dof counts of the first block
  int digits = 4;
  int min_levels = 4;
};

/// Frequencies sqrt(kappa_hat), their extrapolated limit and the least-squares
/// order of |value - limit| against h. Every block must have the same levels
/// count and mode list.
ReportTable build_table(const std::vector<TableBlock>& blocks, const TableSpec& spec = {});

/// Fixed-point text of `x` with `digits` decimals, ties to even.
std::string format_fixed(double x, int digits);
/// The double nearest to `x` printed with `digits` decimals.
double round_fixed(double x, int digits);

void write_table_csv(std::ostream& out, const ReportTable& table);
ReportTable read_table_csv(std::istream& in);

/// One row per iteration: dof, err, eta_sq, eff and reference curves
/// err_0 (dof/dof_0)^-0.66 and err_0 (dof/dof_0)^-1 anchored at the first row.
void emit_plot_data(std::ostream& out, const ConvergenceHistory& history, int mode);

void write_history_csv(std::ostream& out, const ConvergenceHistory& history);

} // namespace elasteig
