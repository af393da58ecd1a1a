#include "slice_embed/commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "slice_embed/errors.hpp"
#include "slice_embed/formulation.hpp"
#include "slice_embed/report.hpp"
#include "slice_embed/solver.hpp"
#include "slice_embed/text.hpp"

namespace slice_embed {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigurationError("cannot write '" + path.string() + "'");
  return out;
}

/// Config file plus overrides, validated. Throws on any problem.
RunSettings settings_for(const std::string& config_path, const RunOverrides& overrides) {
  auto settings = load_config(config_path);
  apply_overrides(settings, overrides);
  settings.resolved().validate();
  return settings;
}

}  // namespace

void configure_logging() {
  auto logger = spdlog::stderr_logger_mt("slice-embed");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("SLICE_EMBED_LOG")) {
    spdlog::set_level(spdlog::level::from_str(level));
  }
}

int cmd_run(const std::string& config_path, const RunOverrides& overrides, bool plot_tables, std::ostream& out,
            std::ostream& err) {
  RunSettings settings;
  ExperimentConfig config;
  try {
    settings = settings_for(config_path, overrides);
    config = settings.resolved();
  } catch (const Error& e) {
    err << config_path << ": " << e.what() << '\n';
    return kExitConfig;
  }

  const auto cells = sweep(config);
  const auto rows = report_rows(cells, settings.timing);
  try {
    const fs::path dir = settings.output_dir;
    fs::create_directories(dir);
    {
      auto file = open_output(dir / "results.csv");
      write_results(file, rows);
    }
    {
      auto file = open_output(dir / "events.log");
      write_events(file, cells, settings.timing);
    }
    if (plot_tables) {
      auto krel = open_output(dir / "krel_table.dat");
      write_krel_table(krel, rows);
      auto e2e = open_output(dir / "e2e_table.dat");
      write_e2e_table(e2e, rows);
    }
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kExitConfig;
  }

  bool partial = false;
  for (const auto& cell : cells) {
    for (const auto& failure : cell.failures) {
      err << "cell k_rel=" << cell.cell.k_rel << " d_e2e=" << format_number(cell.cell.d_e2e_ms) << ' ' << failure
          << '\n';
      partial = true;
    }
  }
  for (const auto& row : rows) {
    if (row.seed != "mean") continue;
    out << "k_rel=" << row.k_rel << " d_e2e=" << format_number(row.d_e2e_ms) << " acceptance="
        << format_number(row.acceptance_pct) << "% cpu=" << format_number(row.cpu_util_pct)
        << "% bw=" << format_number(row.bw_util_pct) << "% status=" << row.status << '\n';
  }
  return partial ? kExitPartial : kExitOk;
}

int cmd_oracle_check(const OracleCheckOptions& options, const std::string& out_dir,
                     const std::vector<NamedSolver>& solvers, std::ostream& out, std::ostream& err) {
  const OracleSolverFn oracle = [](const SubstrateNetwork& network, const SliceRequest& request,
                                   std::span<const double> delays) {
    return brute_force_solve(network, request, delays);
  };
  OracleReport report;
  try {
    report = run_oracle_check(options, solvers, oracle);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitConfig;
  }
  for (const auto& line : report.lines) spdlog::info("{}", line);
  out << "instances=" << report.instances << " feasible=" << report.feasible
      << " comparisons=" << report.comparisons << " mismatches=" << report.mismatches
      << " max_deviation=" << format_number(report.max_deviation) << '\n';
  if (report.mismatches == 0) return kExitOk;

  for (const auto& line : report.lines) {
    if (line.find("MISMATCH") != std::string::npos) err << line << '\n';
  }
  if (report.first_failure) {
    try {
      fs::create_directories(out_dir);
      const auto path = fs::path(out_dir) / ("oracle_failure_" + std::to_string(report.first_failure_index) + ".txt");
      auto file = open_output(path);
      write_instance(file, *report.first_failure);
      err << "failing instance written to " << path.string() << '\n';
    } catch (const std::exception& e) {
      err << e.what() << '\n';
    }
  }
  return kExitMismatch;
}

int cmd_export_lp(const std::string& config_path, const RunOverrides& overrides, std::size_t index,
                  std::ostream& out, std::ostream& err) {
  try {
    const auto settings = settings_for(config_path, overrides);
    const auto config = settings.resolved();
    const auto problem = problem_at(config, config.cells.front(), config.seeds.front(), index);
    const fs::path dir = settings.output_dir;
    fs::create_directories(dir);
    const auto path = dir / ("request_" + std::to_string(index) + ".lp");
    auto file = open_output(path);
    write_lp(file, problem);
    out << path.string() << '\n';
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace slice_embed
