#include "elasteig/postprocess.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "elasteig/error.hpp"

namespace elasteig {

std::string format_fixed(double x, int digits) {
  if (std::isnan(x)) return "nan";
  char buf[128];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, digits);
  if (res.ec != std::errc()) throw InputError("value too large to format");
  return std::string(buf, res.ptr);
}

double round_fixed(double x, int digits) {
  const std::string s = format_fixed(x, digits);
  double v = 0.0;
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

namespace {

std::string full(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

double parse_double(const std::string& s, int line) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw InputError("table csv line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

} // namespace

ReportTable build_table(const std::vector<TableBlock>& blocks, const TableSpec& spec) {
  if (blocks.empty()) throw InputError("table needs at least one history");
  ReportTable table;
  table.digits = spec.digits;
  const ConvergenceHistory& first = *blocks.front().history;
  const std::size_t levels = first.records.size();
  if (levels == 0) throw InputError("table: empty history");
  if (static_cast<int>(levels) < spec.min_levels) {
    throw InputError("table needs at least " + std::to_string(spec.min_levels) + " levels");
  }
  table.h = first.h_values();
  if (!spec.column_labels.empty()) {
    if (spec.column_labels.size() != levels) throw InputError("table: column label count");
    table.columns = spec.column_labels;
  } else {
    for (const auto& r : first.records) table.columns.push_back(std::to_string(r.dofs));
  }
  for (const auto& block : blocks) {
    const ConvergenceHistory& h = *block.history;
    if (h.records.size() != levels || h.modes.size() != first.modes.size()) {
      throw InputError("table: histories differ in level or mode counts");
    }
    const std::vector<double> hv = h.h_values();
    for (int mode : h.modes) {
      TableRow row;
      row.block = block.label;
      row.mode = mode;
      for (double k : h.values(mode)) row.values.push_back(std::sqrt(k));
      row.extrapolated = extrapolate(hv, row.values).value;
      std::vector<double> err;
      for (double v : row.values) err.push_back(std::abs(v - row.extrapolated));
      row.order = fit_power_law(hv, err).slope;
      for (const auto& ref : h.references) {
        if (ref.mode == mode) row.reference = std::sqrt(ref.kappa_hat);
      }
      table.rows.push_back(row);
    }
  }
  return table;
}

void write_table_csv(std::ostream& out, const ReportTable& table) {
  out << "# digits=" << table.digits << '\n';
  out << "# h=";
  for (std::size_t i = 0; i < table.h.size(); ++i) out << (i ? " " : "") << full(table.h[i]);
  out << '\n';
  out << "block,mode";
  for (const auto& c : table.columns) out << ',' << c;
  out << ",order,extrapolated,reference\n";
  for (const auto& r : table.rows) {
    out << r.block << ',' << r.mode;
    for (double v : r.values) out << ',' << format_fixed(v, table.digits);
    out << ',' << format_fixed(r.order, table.digits) << ','
        << format_fixed(r.extrapolated, table.digits) << ','
        << (r.reference ? format_fixed(*r.reference, table.digits) : "") << '\n';
  }
}

ReportTable read_table_csv(std::istream& in) {
  ReportTable t;
  std::string line;
  int lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line.rfind("# digits=", 0) == 0) {
      t.digits = std::stoi(line.substr(9));
      continue;
    }
    if (line.rfind("# h=", 0) == 0) {
      std::istringstream is(line.substr(4));
      std::string tok;
      while (is >> tok) t.h.push_back(parse_double(tok, lineno));
      continue;
    }
    if (line[0] == '#') continue;
    const auto cells = split(line, ',');
    if (!header) {
      if (cells.size() < 5 || cells[0] != "block") {
        throw InputError("table csv line " + std::to_string(lineno) + ": missing header");
      }
      t.columns.assign(cells.begin() + 2, cells.end() - 3);
      header = true;
      continue;
    }
    if (cells.size() != t.columns.size() + 5) {
      throw InputError("table csv line " + std::to_string(lineno) + ": wrong field count");
    }
    TableRow r;
    r.block = cells[0];
    r.mode = std::stoi(cells[1]);
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      r.values.push_back(parse_double(cells[2 + i], lineno));
    }
    const std::size_t b = 2 + t.columns.size();
    r.order = parse_double(cells[b], lineno);
    r.extrapolated = parse_double(cells[b + 1], lineno);
    if (!cells[b + 2].empty()) r.reference = parse_double(cells[b + 2], lineno);
    t.rows.push_back(r);
  }
  if (!header) throw InputError("table csv: no header");
  return t;
}

void emit_plot_data(std::ostream& out, const ConvergenceHistory& history, int mode) {
  if (history.empty()) throw InputError("plot data: empty history");
  const int k = history.mode_position(mode);
  const auto& r0 = history.records.front();
  out << "dof,err,eta_sq,eff,ref_dof_m066,ref_dof_m1\n";
  out.precision(12);
  for (const auto& r : history.records) {
    const double ratio = static_cast<double>(r.dofs) / static_cast<double>(r0.dofs);
    const double e0 = r0.err.empty() ? NAN : r0.err[k];
    out << r.dofs << ',' << (r.err.empty() ? NAN : r.err[k]) << ',' << r.eta * r.eta << ','
        << r.eff << ',' << e0 * std::pow(ratio, -0.66) << ',' << e0 / ratio << '\n';
  }
}

void write_history_csv(std::ostream& out, const ConvergenceHistory& history) {
  out << "iteration,dofs,cells,h_max,eta,theta,eff,marked,seconds,max_residual";
  for (int m : history.modes) {
    out << ",kappa_hat_" << m << ",sqrt_kappa_hat_" << m << ",err_" << m << ",crossing_" << m;
  }
  out << '\n';
  out.precision(17);
  for (const auto& r : history.records) {
    out << r.iteration << ',' << r.dofs << ',' << r.cells << ',' << r.h_max << ',' << r.eta << ','
        << r.theta << ',' << r.eff << ',' << r.marked << ',' << r.seconds << ','
        << r.max_residual;
    for (std::size_t k = 0; k < history.modes.size(); ++k) {
      out << ',' << r.kappa_hat[k] << ',' << std::sqrt(r.kappa_hat[k]) << ','
          << (r.err.empty() ? NAN : r.err[k]) << ','
          << (k < r.crossing.size() && r.crossing[k] != 0 ? 1 : 0);
    }
    out << '\n';
  }
}

} // namespace elasteig
