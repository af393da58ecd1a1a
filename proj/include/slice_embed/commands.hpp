#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "slice_embed/config.hpp"
#include "slice_embed/oracle.hpp"

namespace slice_embed {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitPartial = 2;
inline constexpr int kExitMismatch = 3;

/// Reads SLICE_EMBED_LOG (trace, debug, info, warn, error, critical, off)
/// and routes log output to standard error. Default level: warn.
void configure_logging();

/// Runs every cell and seed and writes results.csv and events.log to the
/// output directory; with `plot_tables` also krel_table.dat and
/// e2e_table.dat. Nothing is written when the config is rejected.
int cmd_run(const std::string& config_path, const RunOverrides& overrides, bool plot_tables, std::ostream& out,
            std::ostream& err);

/// Compares `solvers` against the brute-force oracle. On a mismatch the first
/// failing instance goes to `<out_dir>/oracle_failure_<index>.txt`.
int cmd_oracle_check(const OracleCheckOptions& options, const std::string& out_dir,
                     const std::vector<NamedSolver>& solvers, std::ostream& out, std::ostream& err);

/// Writes `<out_dir>/request_<index>.lp` for the first cell and seed of the
/// config.
int cmd_export_lp(const std::string& config_path, const RunOverrides& overrides, std::size_t index,
                  std::ostream& out, std::ostream& err);

}  // namespace slice_embed
