#include <doctest.h>

#include <map>
#include <sstream>
#include <string>

#include "slice_embed/config.hpp"
#include "slice_embed/errors.hpp"
#include "slice_embed/report.hpp"

using namespace slice_embed;

namespace {

const char* kMinimal =
    "# minimal\n"
    "topology.server_count = 4\n"
    "topology.servers_per_edge_switch = 2\n"
    "topology.edge_switch_count = 2\n"
    "topology.aggregation_switch_count = 2\n"
    "topology.datacenter_switch_count = 1\n"
    "workload.request_count = 3\n"
    "workload.vnfs_per_slice = 2\n"
    "experiment.k_rel = 1, 2\n"
    "experiment.d_e2e_ms = 20, 40, 60\n";

std::size_t error_line(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_config(in);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_CASE("minimal config") {
  std::istringstream in(kMinimal);
  const auto settings = parse_config(in);
  const auto config = settings.resolved();
  REQUIRE(config.cells.size() == 6);
  CHECK(config.cells[0] == SweepCell{1, 20.0});
  CHECK(config.cells[1] == SweepCell{1, 40.0});
  CHECK(config.cells[3] == SweepCell{2, 20.0});
  CHECK(config.seeds == std::vector<std::uint64_t>{1, 2, 3, 4});
  CHECK(config.bound_mode == BoundMode::kCpu);
  CHECK(config.delay_mode == DelayMode::kRecompute);
  CHECK(settings.output_dir == "out");
  CHECK(!settings.timing);
}

TEST_CASE("every documented key is accepted") {
  std::string text = kMinimal;
  text += "topology.server_cpu_ghz = 10\n"
          "topology.server_edge_bw_mbps = 200\n"
          "topology.edge_agg_bw_mbps = 2000\n"
          "topology.agg_dc_bw_mbps = 9000\n"
          "topology.server_edge_delay_ms = 0.2\n"
          "topology.edge_agg_delay_ms = 0.2\n"
          "topology.agg_dc_delay_ms = 0.2\n"
          "workload.cpu_demand_ghz = 1, 2\n"
          "workload.bw_demand_mbps = 10, 20\n"
          "workload.proc_delay_ms = 0.1, 0.2\n"
          "workload.incompatible = 0:1, 1:3\n"
          "experiment.seeds = 7\n"
          "experiment.bound_mode = bw\n"
          "experiment.delay_mode = frozen\n"
          "experiment.jobs = 2\n"
          "solver.strategy = most-fractional\n"
          "solver.node_limit = 5000\n"
          "output.dir = somewhere\n"
          "output.timing = true\n";
  std::istringstream in(text);
  const auto settings = parse_config(in);
  const auto& e = settings.experiment;
  CHECK(e.topology.server_cpu_ghz == 10.0);
  CHECK(e.workload.bw_demand.hi == 20.0);
  CHECK(e.workload.incompatible.size() == 2);
  CHECK(e.seeds == std::vector<std::uint64_t>{7});
  CHECK(e.bound_mode == BoundMode::kBandwidth);
  CHECK(e.delay_mode == DelayMode::kFrozen);
  CHECK(e.solver.strategy == BranchStrategy::kMostFractional);
  CHECK(e.solver.node_limit == 5000);
  CHECK(settings.output_dir == "somewhere");
  CHECK(settings.timing);
  std::size_t keys = 0;
  for (const auto& key : config_keys()) keys += text.find(key + " =") != std::string::npos;
  CHECK(keys == config_keys().size());
}

TEST_CASE("config errors cite their line") {
  CHECK(error_line(std::string(kMinimal) + "topology.bogus = 1\n") == 11);
  CHECK(error_line(std::string(kMinimal) + "workload.request_count = 4\n") == 11);
  CHECK(error_line(std::string(kMinimal) + "experiment.bound_mode = gpu\n") == 11);
  CHECK(error_line(std::string(kMinimal) + "no equals sign\n") == 11);
  CHECK(error_line("topology.server_count = four\n") == 1);
  CHECK(error_line("topology.server_count = 4\ntopology.servers_per_edge_switch = 3\n") == 2);
  // Counts that parse but do not multiply out.
  std::string text = kMinimal;
  text.replace(text.find("servers_per_edge_switch = 2"), 27, "servers_per_edge_switch = 3");
  CHECK(error_line(text) > 0);
}

TEST_CASE("missing required key") {
  std::string text = kMinimal;
  text.erase(text.find("topology.server_count"), std::string("topology.server_count = 4\n").size());
  std::istringstream in(text);
  CHECK_THROWS_WITH_AS(parse_config(in), doctest::Contains("topology.server_count"), ParseError);
}

TEST_CASE("overrides") {
  std::istringstream in(kMinimal);
  auto settings = parse_config(in);
  RunOverrides overrides;
  overrides.k_rel = 3;
  overrides.seed = 9;
  overrides.requests = 0;
  overrides.bound_mode = BoundMode::kBandwidth;
  overrides.output_dir = "elsewhere";
  apply_overrides(settings, overrides);
  const auto config = settings.resolved();
  CHECK(config.cells.size() == 3);
  CHECK(config.cells[0].k_rel == 3);
  CHECK(config.seeds == std::vector<std::uint64_t>{9});
  CHECK(config.workload.request_count == 0);
  CHECK(config.bound_mode == BoundMode::kBandwidth);
  CHECK(settings.output_dir == "elsewhere");
}

TEST_CASE("missing config file") {
  CHECK_THROWS_AS(load_config("/nonexistent/desk.cfg"), ConfigurationError);
}

namespace {

CellResult fake_cell(unsigned k, std::vector<double> cpu, std::vector<std::size_t> limits) {
  CellResult cell;
  cell.cell = SweepCell{k, 500.0};
  for (std::size_t s = 0; s < cpu.size(); ++s) {
    RunMetrics run;
    run.cell = cell.cell;
    run.seed = s + 1;
    run.cpu_util_pct = cpu[s];
    run.bw_util_pct = cpu[s] / 3.0;
    run.acceptance_pct = 100.0 - cpu[s];
    run.mean_solver_s = 0.01 * static_cast<double>(s);
    run.limit_flags = limits[s];
    run.acceptance_defined = true;
    cell.runs.push_back(run);
  }
  return cell;
}

}  // namespace

TEST_CASE("report rows: per seed, then the mean") {
  const auto rows = report_rows({fake_cell(1, {10.0, 20.0, 33.3}, {0, 1, 2})}, true);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].seed == "1");
  CHECK(rows[3].seed == "mean");
  CHECK(rows[3].cpu_util_pct == doctest::Approx((10.0 + 20.0 + 33.3) / 3.0));
  CHECK(rows[3].limit_flags == 3);
  CHECK(rows[3].status == "ok");
  CHECK(rows[2].mean_solver_s == doctest::Approx(0.02));
  CHECK(report_rows({fake_cell(1, {10.0}, {0})}, false)[0].mean_solver_s == 0.0);
}

TEST_CASE("failed and partial cells") {
  auto partial = fake_cell(2, {10.0}, {0});
  partial.failures = {"seed 2: boom"};
  CellResult failed;
  failed.cell = SweepCell{3, 500.0};
  failed.failures = {"seed 1: boom"};
  const auto rows = report_rows({partial, failed}, false);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].status == "partial");
  CHECK(rows[2].status == "failed");
  std::ostringstream out;
  write_results(out, rows);
  CHECK(out.str().find("\n3,500,,,,,mean,0,failed\n") != std::string::npos);
}

TEST_CASE("results.csv round trip reproduces the mean rows") {
  const auto rows = report_rows(
      {fake_cell(1, {10.1, 20.7, 33.3, 41.9}, {0, 0, 1, 0}), fake_cell(5, {1.0 / 3.0, 2.0 / 7.0}, {0, 0})}, true);
  std::ostringstream out;
  write_results(out, rows);
  CHECK(out.str().rfind(std::string(kResultsHeader) + "\n", 0) == 0);
  std::istringstream in(out.str());
  const auto back = read_results(in);
  REQUIRE(back.size() == rows.size());

  // Re-aggregate the per-seed rows exactly the way the writer does.
  std::map<unsigned, std::vector<ReportRow>> seeds;
  for (const auto& row : back) {
    if (row.seed != "mean") seeds[row.k_rel].push_back(row);
  }
  for (const auto& row : back) {
    if (row.seed != "mean") continue;
    const auto& group = seeds[row.k_rel];
    double cpu = 0.0, bw = 0.0, acc = 0.0, solve = 0.0;
    std::size_t limits = 0;
    for (const auto& s : group) {
      cpu += s.cpu_util_pct;
      bw += s.bw_util_pct;
      acc += s.acceptance_pct;
      solve += s.mean_solver_s;
      limits += s.limit_flags;
    }
    const double n = static_cast<double>(group.size());
    CHECK(row.cpu_util_pct == cpu / n);
    CHECK(row.bw_util_pct == bw / n);
    CHECK(row.acceptance_pct == acc / n);
    CHECK(row.mean_solver_s == solve / n);
    CHECK(row.limit_flags == limits);
  }
  std::ostringstream again;
  write_results(again, back);
  CHECK(again.str() == out.str());
}

TEST_CASE("malformed results.csv") {
  std::istringstream bad_header("k,d\n");
  CHECK_THROWS_AS(read_results(bad_header), ParseError);
  std::istringstream short_row(std::string(kResultsHeader) + "\n1,500,1\n");
  try {
    read_results(short_row);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("event lines") {
  auto cell = fake_cell(1, {10.0}, {0});
  RequestRecord accepted;
  accepted.id = 0;
  accepted.status = RequestStatus::kAccept;
  accepted.objective = 1.5;
  accepted.realized_delay = 4.25;
  accepted.wall = 0.5;
  RequestRecord rejected;
  rejected.id = 1;
  rejected.reason = "infeasible";
  cell.runs[0].records = {accepted, rejected};
  std::ostringstream out;
  write_events(out, {cell}, false);
  CHECK(out.str() ==
        "req=0 cell=1,500 seed=1 status=accept obj=1.5 delay=4.25 wall=0\n"
        "req=1 cell=1,500 seed=1 status=reject obj=- delay=- wall=0 reason=infeasible\n");
}

TEST_CASE("plot tables keep mean rows only") {
  const auto rows = report_rows({fake_cell(2, {10.0, 20.0}, {0, 0}), fake_cell(1, {5.0, 5.0}, {0, 0})}, false);
  std::ostringstream krel, e2e;
  write_krel_table(krel, rows);
  write_e2e_table(e2e, rows);
  CHECK(krel.str() ==
        "# d_e2e_ms k_rel cpu_util_pct bw_util_pct acceptance_pct mean_solver_s\n"
        "500 1 5 1.6666666666666667 95 0\n"
        "500 2 15 5 85 0\n");
  CHECK(e2e.str() == krel.str());
}
