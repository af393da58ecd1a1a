#include "slice_embed/report.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <string>

#include "slice_embed/errors.hpp"
#include "slice_embed/text.hpp"

namespace slice_embed {

namespace {

std::string field(double value, bool present) { return present ? format_number(value) : std::string(); }

ReportRow mean_row(const SweepCell& cell, const std::vector<ReportRow>& seeds, bool any_failed) {
  ReportRow mean;
  mean.k_rel = cell.k_rel;
  mean.d_e2e_ms = cell.d_e2e_ms;
  mean.seed = "mean";
  if (seeds.empty()) {
    mean.status = "failed";
    return mean;
  }
  bool all_empty = true;
  for (const auto& row : seeds) {
    mean.cpu_util_pct += row.cpu_util_pct;
    mean.bw_util_pct += row.bw_util_pct;
    mean.acceptance_pct += row.acceptance_pct;
    mean.mean_solver_s += row.mean_solver_s;
    mean.limit_flags += row.limit_flags;
    all_empty = all_empty && row.status == "empty";
  }
  const double n = static_cast<double>(seeds.size());
  mean.cpu_util_pct /= n;
  mean.bw_util_pct /= n;
  mean.acceptance_pct /= n;
  mean.mean_solver_s /= n;
  mean.status = any_failed ? "partial" : all_empty ? "empty" : "ok";
  return mean;
}

}  // namespace

std::vector<ReportRow> report_rows(const std::vector<CellResult>& cells, bool timing) {
  std::vector<ReportRow> rows;
  for (const auto& cell : cells) {
    std::vector<ReportRow> seeds;
    for (const auto& run : cell.runs) {
      ReportRow row;
      row.k_rel = cell.cell.k_rel;
      row.d_e2e_ms = cell.cell.d_e2e_ms;
      row.cpu_util_pct = run.cpu_util_pct;
      row.bw_util_pct = run.bw_util_pct;
      row.acceptance_pct = run.acceptance_pct;
      row.mean_solver_s = timing ? run.mean_solver_s : 0.0;
      row.seed = std::to_string(run.seed);
      row.limit_flags = run.limit_flags;
      row.status = run.acceptance_defined ? "ok" : "empty";
      seeds.push_back(row);
    }
    rows.insert(rows.end(), seeds.begin(), seeds.end());
    rows.push_back(mean_row(cell.cell, seeds, cell.failed()));
  }
  return rows;
}

void write_results(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << kResultsHeader << '\n';
  for (const auto& row : rows) {
    const bool present = row.status != "failed";
    out << row.k_rel << ',' << format_number(row.d_e2e_ms) << ',' << field(row.cpu_util_pct, present) << ','
        << field(row.bw_util_pct, present) << ',' << field(row.acceptance_pct, present) << ','
        << field(row.mean_solver_s, present) << ',' << row.seed << ',' << row.limit_flags << ',' << row.status
        << '\n';
  }
}

std::vector<ReportRow> read_results(std::istream& in) {
  std::vector<ReportRow> rows;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line) || trim(line) != kResultsHeader) throw ParseError("unexpected results header", 1);
  ++line_no;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cols = split(trim(line), ',');
    if (cols.size() != 9) throw ParseError("expected 9 columns", line_no);
    try {
      ReportRow row;
      row.k_rel = static_cast<unsigned>(parse_integer(cols[0]));
      row.d_e2e_ms = parse_number(cols[1]);
      row.seed = std::string(cols[6]);
      row.limit_flags = static_cast<std::size_t>(parse_integer(cols[7]));
      row.status = std::string(cols[8]);
      if (row.status != "failed") {
        row.cpu_util_pct = parse_number(cols[2]);
        row.bw_util_pct = parse_number(cols[3]);
        row.acceptance_pct = parse_number(cols[4]);
        row.mean_solver_s = parse_number(cols[5]);
      }
      rows.push_back(std::move(row));
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return rows;
}

void write_events(std::ostream& out, const std::vector<CellResult>& cells, bool timing) {
  for (const auto& cell : cells) {
    for (const auto& run : cell.runs) {
      for (const auto& record : run.records) {
        const bool accepted = record.status == RequestStatus::kAccept;
        out << "req=" << record.id << " cell=" << cell.cell.k_rel << ',' << format_number(cell.cell.d_e2e_ms)
            << " seed=" << run.seed << " status=" << to_string(record.status)
            << " obj=" << (accepted ? format_number(record.objective) : "-")
            << " delay=" << (accepted ? format_number(record.realized_delay) : "-")
            << " wall=" << format_number(timing ? record.wall : 0.0);
        if (!record.reason.empty()) out << " reason=" << record.reason;
        out << '\n';
      }
    }
  }
}

namespace {

void write_table(std::ostream& out, std::vector<ReportRow> rows, bool by_delay_first) {
  std::erase_if(rows, [](const ReportRow& row) { return row.seed != "mean" || row.status == "failed"; });
  std::stable_sort(rows.begin(), rows.end(), [&](const ReportRow& a, const ReportRow& b) {
    if (by_delay_first) {
      if (a.d_e2e_ms != b.d_e2e_ms) return a.d_e2e_ms < b.d_e2e_ms;
      return a.k_rel < b.k_rel;
    }
    if (a.k_rel != b.k_rel) return a.k_rel < b.k_rel;
    return a.d_e2e_ms < b.d_e2e_ms;
  });
  out << "# d_e2e_ms k_rel cpu_util_pct bw_util_pct acceptance_pct mean_solver_s\n";
  for (const auto& row : rows) {
    out << format_number(row.d_e2e_ms) << ' ' << row.k_rel << ' ' << format_number(row.cpu_util_pct) << ' '
        << format_number(row.bw_util_pct) << ' ' << format_number(row.acceptance_pct) << ' '
        << format_number(row.mean_solver_s) << '\n';
  }
}

}  // namespace

void write_krel_table(std::ostream& out, const std::vector<ReportRow>& rows) { write_table(out, rows, true); }
void write_e2e_table(std::ostream& out, const std::vector<ReportRow>& rows) { write_table(out, rows, false); }

}  // namespace slice_embed
