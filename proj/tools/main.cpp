#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "slice_embed/admission.hpp"
#include "slice_embed/commands.hpp"

namespace {

using slice_embed::BoundMode;
using slice_embed::DelayMode;
using slice_embed::RunOverrides;

struct RunFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> k_rel;
  std::optional<double> d_e2e;
  std::optional<std::string> bound_mode;
  std::optional<std::string> delay_mode;
  std::optional<std::string> out;
  std::optional<std::size_t> requests;
  std::optional<unsigned> jobs;
  bool timing = false;

  void attach(CLI::App& app) {
    app.add_option("--config", config, "Experiment config file")->required();
    app.add_option("--seed", seed, "Run a single replicate seed");
    app.add_option("--k-rel", k_rel, "Run a single isolation degree");
    app.add_option("--d-e2e", d_e2e, "Run a single end-to-end delay budget (ms)");
    app.add_option("--bound-mode", bound_mode, "cpu or bw")->check(CLI::IsMember({"cpu", "bw"}));
    app.add_option("--delay-mode", delay_mode, "recompute or frozen")->check(CLI::IsMember({"recompute", "frozen"}));
    app.add_option("--out", out, "Output directory");
    app.add_option("--requests", requests, "Requests per run");
    app.add_option("--jobs", jobs, "Worker threads");
    app.add_flag("--timing", timing, "Record solver wall-clock times");
  }

  RunOverrides overrides() const {
    RunOverrides o;
    o.seed = seed;
    o.k_rel = k_rel;
    o.d_e2e_ms = d_e2e;
    if (bound_mode) o.bound_mode = slice_embed::parse_bound_mode(*bound_mode);
    if (delay_mode) o.delay_mode = slice_embed::parse_delay_mode(*delay_mode);
    o.output_dir = out;
    o.requests = requests;
    o.jobs = jobs;
    if (timing) o.timing = true;
    return o;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slice embedding and admission experiments"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "Run the configured cells and write results.csv and events.log");
  run_flags.attach(*run);

  RunFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "Like run, plus krel_table.dat and e2e_table.dat");
  sweep_flags.attach(*sweep);

  slice_embed::OracleCheckOptions oracle_options;
  std::string oracle_out = ".";
  auto* oracle = app.add_subcommand("oracle-check", "Compare the MILP solver with brute force on tiny instances");
  oracle->add_option("--count", oracle_options.count, "Number of instances");
  oracle->add_option("--seed", oracle_options.seed, "Generator seed");
  oracle->add_option("--max-servers", oracle_options.max_servers, "Largest server count")
      ->check(CLI::Range(2, 6));
  oracle->add_option("--max-vnfs", oracle_options.max_vnfs, "Largest VNF count")->check(CLI::Range(2, 4));
  oracle->add_option("--out", oracle_out, "Directory for failing instances");

  RunFlags export_flags;
  std::size_t index = 0;
  auto* export_lp = app.add_subcommand("export-lp", "Write the MILP of one request as an LP file");
  export_flags.attach(*export_lp);
  export_lp->add_option("--index", index, "Request index")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : slice_embed::kExitConfig;
  }

  slice_embed::configure_logging();
  if (run->parsed()) {
    return slice_embed::cmd_run(run_flags.config, run_flags.overrides(), false, std::cout, std::cerr);
  }
  if (sweep->parsed()) {
    return slice_embed::cmd_run(sweep_flags.config, sweep_flags.overrides(), true, std::cout, std::cerr);
  }
  if (oracle->parsed()) {
    return slice_embed::cmd_oracle_check(oracle_options, oracle_out, slice_embed::default_solvers(), std::cout,
                                         std::cerr);
  }
  return slice_embed::cmd_export_lp(export_flags.config, export_flags.overrides(), index, std::cout, std::cerr);
}
