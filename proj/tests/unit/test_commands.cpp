#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "slice_embed/commands.hpp"
#include "slice_embed/errors.hpp"
#include "slice_embed/oracle.hpp"
#include "slice_embed/report.hpp"
#include "slice_embed/solver.hpp"

using namespace slice_embed;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = SLICE_EMBED_SOURCE_DIR;

/// Fresh, empty directory under the system temp dir.
fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("slice_embed_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

fs::path write_file(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
  return path;
}

std::string small_config(const fs::path& out_dir) {
  return "topology.server_count = 4\n"
         "topology.servers_per_edge_switch = 2\n"
         "topology.edge_switch_count = 2\n"
         "topology.aggregation_switch_count = 2\n"
         "topology.datacenter_switch_count = 2\n"
         "workload.request_count = 6\n"
         "workload.vnfs_per_slice = 3\n"
         "experiment.k_rel = 1, 3\n"
         "experiment.d_e2e_ms = 50\n"
         "experiment.seeds = 1, 2\n"
         "output.dir = " + out_dir.string() + "\n";
}

}  // namespace

TEST_CASE("run writes results.csv and events.log") {
  const auto dir = scratch("run");
  const auto cfg = write_file(dir / "small.cfg", small_config(dir / "out"));
  std::ostringstream out, err;
  CHECK(cmd_run(cfg.string(), {}, false, out, err) == kExitOk);
  CHECK(err.str().empty());
  std::istringstream csv(slurp(dir / "out" / "results.csv"));
  const auto rows = read_results(csv);
  CHECK(rows.size() == 2 * (2 + 1));
  CHECK(fs::exists(dir / "out" / "events.log"));
  CHECK(!fs::exists(dir / "out" / "krel_table.dat"));

  std::ostringstream out2;
  CHECK(cmd_run(cfg.string(), {}, true, out2, err) == kExitOk);
  CHECK(fs::exists(dir / "out" / "krel_table.dat"));
  CHECK(fs::exists(dir / "out" / "e2e_table.dat"));
}

TEST_CASE("--k-rel 1 --requests 0 gives one zero-utilization cell") {
  const auto dir = scratch("zero");
  const auto cfg = write_file(dir / "small.cfg", small_config(dir / "out"));
  RunOverrides overrides;
  overrides.k_rel = 1;
  overrides.requests = 0;
  overrides.seed = 1;
  std::ostringstream out, err;
  REQUIRE(cmd_run(cfg.string(), overrides, false, out, err) == kExitOk);
  std::istringstream csv(slurp(dir / "out" / "results.csv"));
  const auto rows = read_results(csv);
  REQUIRE(rows.size() == 2);  // seed 1 and its mean
  for (const auto& row : rows) {
    CHECK(row.k_rel == 1);
    CHECK(row.cpu_util_pct == 0.0);
    CHECK(row.bw_util_pct == 0.0);
    CHECK(row.status == "empty");
  }
  CHECK(slurp(dir / "out" / "events.log").empty());
}

TEST_CASE("config without topology exits 1 and writes nothing") {
  const auto dir = scratch("bad");
  std::string text = small_config(dir / "out");
  text = text.substr(text.find("workload."));
  const auto cfg = write_file(dir / "bad.cfg", text);
  std::ostringstream out, err;
  CHECK(cmd_run(cfg.string(), {}, true, out, err) == kExitConfig);
  CHECK(err.str().find("topology") != std::string::npos);
  CHECK(err.str().find("line") != std::string::npos);
  CHECK(!fs::exists(dir / "out"));

  CHECK(cmd_run((dir / "missing.cfg").string(), {}, false, out, err) == kExitConfig);
  CHECK(!fs::exists(dir / "out"));
}

TEST_CASE("oracle-check on 50 small instances") {
  const auto dir = scratch("oracle");
  OracleCheckOptions options;
  options.count = 50;
  options.max_servers = 4;
  std::ostringstream out, err;
  CHECK(cmd_oracle_check(options, dir.string(), default_solvers(), out, err) == kExitOk);
  CHECK(out.str().find("instances=50 ") == 0);
  CHECK(out.str().find("mismatches=0") != std::string::npos);
  CHECK(fs::is_empty(dir));
}

TEST_CASE("oracle-check with zero instances") {
  OracleCheckOptions options;
  options.count = 0;
  std::ostringstream out, err;
  CHECK(cmd_oracle_check(options, scratch("oracle0").string(), default_solvers(), out, err) == kExitOk);
  CHECK(out.str().find("instances=0 feasible=0 comparisons=0 mismatches=0") == 0);
}

TEST_CASE("a corrupted solver is caught and its instance saved") {
  const auto dir = scratch("corrupt");
  const std::vector<NamedSolver> corrupted = {NamedSolver{"negated", [](const MilpProblem& problem) {
                                                            auto solution = solve_milp(problem);
                                                            solution.objective = -solution.objective;
                                                            return solution;
                                                          }}};
  OracleCheckOptions options;
  options.count = 30;
  std::ostringstream out, err;
  CHECK(cmd_oracle_check(options, dir.string(), corrupted, out, err) == kExitMismatch);
  CHECK(err.str().find("MISMATCH") != std::string::npos);

  fs::path saved;
  for (const auto& entry : fs::directory_iterator(dir)) saved = entry.path();
  REQUIRE(!saved.empty());
  CHECK(saved.filename().string().rfind("oracle_failure_", 0) == 0);

  // The saved instance replays to the same oracle answer as a fresh draw.
  std::ifstream in(saved);
  const auto replay = read_instance(in);
  const auto index = std::stoul(saved.stem().string().substr(15));
  std::mt19937_64 rng(options.seed);
  OracleInstance original;
  for (std::size_t n = 0; n <= index; ++n) original = generate_oracle_instance(rng, options.max_servers, options.max_vnfs);
  const auto a = brute_force_solve(replay.network, replay.request);
  const auto b = brute_force_solve(original.network, original.request);
  CHECK(a.status == b.status);
  CHECK(a.objective == b.objective);
}

TEST_CASE("instance text round trip") {
  std::mt19937_64 rng(17);
  for (int n = 0; n < 20; ++n) {
    const auto instance = generate_oracle_instance(rng, 5, 3);
    std::ostringstream first;
    write_instance(first, instance);
    std::istringstream in(first.str());
    const auto back = read_instance(in);
    std::ostringstream second;
    write_instance(second, back);
    CHECK(second.str() == first.str());
  }
  std::istringstream junk("server S1 12\n");
  CHECK_THROWS_AS(read_instance(junk), ParseError);
}

TEST_CASE("generated oracle instances stay in scope") {
  std::mt19937_64 rng(5);
  for (int n = 0; n < 200; ++n) {
    const auto instance = generate_oracle_instance(rng, 5, 3);
    CHECK(instance.network.server_count() >= 2);
    CHECK(instance.network.server_count() <= 5);
    CHECK(instance.request.vnfs.size() >= 2);
    CHECK(instance.request.vnfs.size() <= 3);
    CHECK(instance.request.isolation_degree >= 1);
    CHECK(instance.request.isolation_degree <= 3);
    double total_bw = 0.0;
    for (const auto& vlink : instance.request.vlinks) total_bw += vlink.bw_demand;
    // Even if every virtual link shared one link, it stays at or below half load.
    for (const auto& link : instance.network.links()) CHECK(total_bw <= 0.5 * link.bw_residual + 1e-9);
  }
}

TEST_CASE("export-lp") {
  const auto dir = scratch("export");
  const auto cfg = write_file(dir / "small.cfg", small_config(dir / "out"));
  std::ostringstream out, err;
  REQUIRE(cmd_export_lp(cfg.string(), {}, 0, out, err) == kExitOk);
  const auto first = slurp(dir / "out" / "request_0.lp");
  const auto binary = first.substr(first.find("\nBinary\n") + 8);
  std::istringstream names(binary.substr(0, binary.find("End")));
  std::size_t count = 0;
  for (std::string name; names >> name;) ++count;
  CHECK(count == 3 * 4);

  REQUIRE(cmd_export_lp(cfg.string(), {}, 0, out, err) == kExitOk);
  CHECK(slurp(dir / "out" / "request_0.lp") == first);

  CHECK(cmd_export_lp(cfg.string(), {}, 5, out, err) == kExitOk);
  CHECK(cmd_export_lp(cfg.string(), {}, 6, out, err) == kExitConfig);
  CHECK(!fs::exists(dir / "out" / "request_6.lp"));
}

TEST_CASE("exported LP solves to the in-memory optimum") {
  const auto dir = scratch("export_solve");
  const auto cfg = write_file(dir / "small.cfg", small_config(dir / "out"));
  std::ostringstream out, err;
  REQUIRE(cmd_export_lp(cfg.string(), {}, 4, out, err) == kExitOk);
  std::ifstream in(dir / "out" / "request_4.lp");
  const auto reread = read_lp(in);
  auto settings = load_config(cfg.string());
  const auto config = settings.resolved();
  const auto problem = problem_at(config, config.cells.front(), config.seeds.front(), 4);
  SolverOptions options;
  options.strategy = BranchStrategy::kMostFractional;
  const auto a = solve_milp(reread, options);
  const auto b = solve_milp(problem);
  REQUIRE(a.status == b.status);
  if (a.optimal()) CHECK(std::abs(a.objective - b.objective) <= 1e-6);
}

TEST_CASE("desk run matches the committed golden results.csv") {
  const auto dir = scratch("golden");
  RunOverrides overrides;
  overrides.output_dir = (dir / "out").string();
  std::ostringstream out, err;
  REQUIRE(cmd_run((kSource / "configs" / "desk.cfg").string(), overrides, false, out, err) == kExitOk);
  CHECK(slurp(dir / "out" / "results.csv") == slurp(kSource / "tests" / "data" / "desk_results.csv"));
}
