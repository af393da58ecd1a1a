#include <doctest.h>

#include <sstream>

#include "slice_embed/admission.hpp"
#include "slice_embed/errors.hpp"
#include "slice_embed/report.hpp"

using namespace slice_embed;

namespace {

ExperimentConfig desk_config(std::size_t requests) {
  ExperimentConfig config;
  config.topology.server_count = 20;
  config.topology.servers_per_edge_switch = 10;
  config.topology.edge_switch_count = 2;
  config.topology.aggregation_switch_count = 2;
  config.topology.datacenter_switch_count = 2;
  config.workload.request_count = requests;
  config.workload.vnfs_per_slice = 5;
  config.cells = {SweepCell{2, 500.0}};
  config.seeds = {1};
  return config;
}

std::string events_of(const std::vector<CellResult>& cells) {
  std::ostringstream out;
  write_events(out, cells, false);
  return out.str();
}

}  // namespace

TEST_CASE("zero requests: nothing allocated, acceptance flagged undefined") {
  const auto metrics = run_experiment(desk_config(0), SweepCell{1, 500.0}, 1);
  CHECK(metrics.records.empty());
  CHECK(metrics.cpu_util_pct == 0.0);
  CHECK(metrics.bw_util_pct == 0.0);
  CHECK(metrics.acceptance_pct == 0.0);
  CHECK(!metrics.acceptance_defined);
}

TEST_CASE("request above total datacenter CPU is rejected without a solve") {
  auto config = desk_config(1);
  config.workload.cpu_demand = DemandRange{60.0, 60.0};  // 5 x 60 GHz > 240 GHz
  const auto metrics = run_experiment(config, SweepCell{5, 500.0}, 1);
  REQUIRE(metrics.records.size() == 1);
  CHECK(metrics.records[0].status == RequestStatus::kReject);
  CHECK(metrics.records[0].reason == "aggregate-cpu");
  CHECK(!metrics.records[0].solver_invoked);
  CHECK(metrics.acceptance_pct == 0.0);
}

TEST_CASE("bandwidth-bound mode scales only the access links") {
  auto config = desk_config(1);
  config.bound_mode = BoundMode::kBandwidth;
  const auto topology = config.effective_topology();
  CHECK(topology.server_edge_bw == doctest::Approx(100.0));
  CHECK(topology.edge_agg_bw == config.topology.edge_agg_bw);
  CHECK(topology.agg_dc_bw == config.topology.agg_dc_bw);
}

TEST_CASE("accepted requests replay cleanly") {
  auto config = desk_config(40);
  for (const unsigned k : {1u, 3u}) {
    for (const auto mode : {DelayMode::kRecompute, DelayMode::kFrozen}) {
      config.delay_mode = mode;
      const auto run = run_experiment(config, SweepCell{k, 30.0}, 2);
      CHECK(run.accepted > 0);
      const auto violations = verify_run(config, run);
      CHECK(violations.empty());
      for (const auto& record : run.records) {
        if (record.status != RequestStatus::kAccept) continue;
        CHECK(record.realized_delay <= 30.0 + 1e-6);
      }
    }
  }
}

TEST_CASE("verify_run catches a tampered record") {
  const auto config = desk_config(10);
  auto run = run_experiment(config, SweepCell{1, 500.0}, 1);
  REQUIRE(run.accepted > 0);
  for (auto& record : run.records) {
    if (record.status != RequestStatus::kAccept) continue;
    record.assignment.assign(record.assignment.size(), 0);  // K=1 broken
    break;
  }
  CHECK(!verify_run(config, run).empty());
}

TEST_CASE("single-cell sweep equals run_experiment") {
  auto config = desk_config(15);
  const auto cells = sweep(config);
  REQUIRE(cells.size() == 1);
  REQUIRE(cells[0].runs.size() == 1);
  const auto direct = run_experiment(config, config.cells[0], 1);
  CHECK(cells[0].runs[0].acceptance_pct == direct.acceptance_pct);
  CHECK(cells[0].runs[0].cpu_util_pct == direct.cpu_util_pct);
  CHECK(cells[0].runs[0].bw_util_pct == direct.bw_util_pct);
  CHECK(events_of(cells) == events_of({CellResult{config.cells[0], {direct}, {}}}));
}

TEST_CASE("thread count does not change results") {
  auto config = desk_config(12);
  config.cells = {SweepCell{1, 500.0}, SweepCell{2, 40.0}, SweepCell{4, 500.0}};
  config.seeds = {1, 2};
  config.jobs = 1;
  const auto serial = sweep(config);
  config.jobs = 3;
  const auto parallel = sweep(config);
  CHECK(events_of(serial) == events_of(parallel));
  std::ostringstream a, b;
  write_results(a, report_rows(serial, false));
  write_results(b, report_rows(parallel, false));
  CHECK(a.str() == b.str());
}

TEST_CASE("problem_at rejects an out-of-range index") {
  const auto config = desk_config(3);
  CHECK_NOTHROW(problem_at(config, config.cells[0], 1, 2));
  CHECK_THROWS_AS(problem_at(config, config.cells[0], 1, 3), ConfigurationError);
}

TEST_CASE("mean_of averages in run order") {
  RunMetrics a, b;
  a.cpu_util_pct = 10.0;
  b.cpu_util_pct = 20.0;
  a.limit_flags = 1;
  b.limit_flags = 2;
  const auto mean = mean_of({a, b});
  CHECK(mean.cpu_util_pct == 15.0);
  CHECK(mean.limit_flags == 3);
  CHECK(mean_of({}).cpu_util_pct == 0.0);
}

TEST_CASE("experiment validation") {
  auto config = desk_config(1);
  config.cells.clear();
  CHECK_THROWS_AS(config.validate(), ConfigurationError);
  config = desk_config(1);
  config.seeds.clear();
  CHECK_THROWS_AS(config.validate(), ConfigurationError);
  config = desk_config(1);
  config.cells = {SweepCell{0, 500.0}};
  CHECK_THROWS_AS(config.validate(), ConfigurationError);
}

TEST_CASE("mode names") {
  CHECK(parse_bound_mode("bw") == BoundMode::kBandwidth);
  CHECK(!parse_bound_mode("gpu"));
  CHECK(parse_delay_mode("frozen") == DelayMode::kFrozen);
  CHECK(to_string(DelayMode::kRecompute) == "recompute");
  CHECK(to_string(RequestStatus::kLimit) == "limit");
}
