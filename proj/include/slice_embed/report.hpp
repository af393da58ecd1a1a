#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "slice_embed/admission.hpp"

namespace slice_embed {

/// results.csv header, in column order.
inline constexpr const char* kResultsHeader =
    "k_rel,d_e2e_ms,cpu_util_pct,bw_util_pct,acceptance_pct,mean_solver_s,seed,limit_flags,status";

/// One results.csv line. `seed` is a number or "mean". Numeric fields are
/// empty for a cell whose every seed failed.
struct ReportRow {
  unsigned k_rel = 0;
  double d_e2e_ms = 0.0;
  double cpu_util_pct = 0.0;
  double bw_util_pct = 0.0;
  double acceptance_pct = 0.0;
  double mean_solver_s = 0.0;
  std::string seed;
  std::size_t limit_flags = 0;
  /// ok | empty (no requests, acceptance undefined) | partial (mean over
  /// the seeds that finished) | failed
  std::string status;
};

/// Per-seed rows followed by the mean row, cell by cell. Without `timing`,
/// solver times are written as 0.
std::vector<ReportRow> report_rows(const std::vector<CellResult>& cells, bool timing);

void write_results(std::ostream& out, const std::vector<ReportRow>& rows);
/// Throws ParseError on a malformed file.
std::vector<ReportRow> read_results(std::istream& in);

/// `req=<id> cell=<k>,<d> seed=<s> status=<..> obj=<v|-> delay=<ms|-> wall=<s>`
void write_events(std::ostream& out, const std::vector<CellResult>& cells, bool timing);

/// Whitespace-separated plot tables built from the mean rows: one ordered by
/// d_e2e then k_rel, one by k_rel then d_e2e.
void write_krel_table(std::ostream& out, const std::vector<ReportRow>& rows);
void write_e2e_table(std::ostream& out, const std::vector<ReportRow>& rows);

}  // namespace slice_embed
