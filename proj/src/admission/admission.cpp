#include "slice_embed/admission.hpp"

#include <spdlog/spdlog.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <thread>

#include "slice_embed/commit.hpp"
#include "slice_embed/errors.hpp"
#include "slice_embed/text.hpp"

namespace slice_embed {

std::string_view to_string(BoundMode mode) { return mode == BoundMode::kCpu ? "cpu" : "bw"; }
std::string_view to_string(DelayMode mode) { return mode == DelayMode::kRecompute ? "recompute" : "frozen"; }

std::optional<BoundMode> parse_bound_mode(std::string_view text) {
  if (text == "cpu") return BoundMode::kCpu;
  if (text == "bw") return BoundMode::kBandwidth;
  return std::nullopt;
}

std::optional<DelayMode> parse_delay_mode(std::string_view text) {
  if (text == "recompute") return DelayMode::kRecompute;
  if (text == "frozen") return DelayMode::kFrozen;
  return std::nullopt;
}

std::string_view to_string(RequestStatus status) {
  switch (status) {
    case RequestStatus::kAccept:
      return "accept";
    case RequestStatus::kReject:
      return "reject";
    case RequestStatus::kLimit:
      return "limit";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  topology.validate();
  workload.validate();
  if (cells.empty()) throw ConfigurationError("the sweep has no cells");
  if (seeds.empty()) throw ConfigurationError("at least one seed is required");
  for (const auto& cell : cells) {
    if (cell.k_rel < 1) throw ConfigurationError("k_rel must be >= 1");
    if (!(cell.d_e2e_ms > 0.0) || !std::isfinite(cell.d_e2e_ms)) {
      throw ConfigurationError("d_e2e_ms must be positive");
    }
  }
  if (jobs < 1) throw ConfigurationError("jobs must be >= 1");
}

TopologyConfig ExperimentConfig::effective_topology() const {
  TopologyConfig result = topology;
  if (bound_mode == BoundMode::kBandwidth) result.server_edge_bw *= kBandwidthBoundFactor;
  return result;
}

WorkloadParams ExperimentConfig::workload_for(const SweepCell& cell, std::uint64_t seed) const {
  WorkloadParams params = workload;
  params.isolation_degree = cell.k_rel;
  params.delay_budget = cell.d_e2e_ms;
  params.rng_seed = seed;
  return params;
}

namespace {

// Runs the admission loop. With `stop_at`, returns the problem of that
// request instead of solving it.
RunMetrics simulate(const ExperimentConfig& config, const SweepCell& cell, std::uint64_t seed,
                    std::optional<std::size_t> stop_at, MilpProblem* stopped) {
  config.validate();
  RunMetrics metrics;
  metrics.cell = cell;
  metrics.seed = seed;
  SubstrateNetwork network = build_fat_tree(config.effective_topology());
  const auto frozen = link_delays(network);
  const auto requests = generate_workload(config.workload_for(cell, seed));
  if (stop_at && *stop_at >= requests.size()) {
    throw ConfigurationError("request index " + std::to_string(*stop_at) + " is out of range (" +
                             std::to_string(requests.size()) + " requests)");
  }
  double solver_time = 0.0;
  std::size_t solver_calls = 0;
  for (const auto& request : requests) {
    RequestRecord record;
    record.id = request.id;
    record.request = request;
    const auto delays = config.delay_mode == DelayMode::kRecompute ? link_delays(network) : frozen;
    if (stop_at && request.id == *stop_at) {
      *stopped = build_problem(network, request, delays);
      return metrics;
    }
    const auto aggregate = check_aggregate(network, request);
    if (!aggregate.feasible) {
      record.reason = aggregate.reason == AggregateShortfall::kCpu ? "aggregate-cpu" : "aggregate-bw";
      spdlog::debug("request {} rejected before solving: {}", request.id, aggregate.detail);
      metrics.records.push_back(std::move(record));
      continue;
    }
    const auto problem = build_problem(network, request, delays);
    record.solver_invoked = true;
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto solution = solve_milp(problem, config.solver);
      record.wall = solution.stats.wall_time;
      record.stats = solution.stats;
      if (solution.optimal()) {
        network = commit_allocation(network, solution, request);
        record.status = RequestStatus::kAccept;
        record.objective = solution.objective;
        record.realized_delay = realized_delay(solution, request, delays);
        record.assignment = solution.assignment;
        record.flows = solution.flows;
        ++metrics.accepted;
      } else {
        record.reason = "infeasible";
      }
    } catch (const ResourceLimitError& e) {
      record.wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      record.stats.branch_nodes = e.nodes();
      record.status = RequestStatus::kLimit;
      record.reason = e.had_incumbent() ? "limit-with-incumbent" : "limit";
      ++metrics.limit_flags;
      spdlog::warn("request {} hit the node limit: {}", request.id, e.what());
    }
    solver_time += record.wall;
    ++solver_calls;
    spdlog::debug("request {} {} {}", request.id, to_string(record.status), format_stats(record.stats));
    metrics.records.push_back(std::move(record));
  }
  const auto use = utilization(network);
  metrics.cpu_util_pct = use.cpu_pct;
  metrics.bw_util_pct = use.bw_pct;
  metrics.acceptance_defined = !requests.empty();
  metrics.acceptance_pct =
      requests.empty() ? 0.0 : 100.0 * static_cast<double>(metrics.accepted) / static_cast<double>(requests.size());
  metrics.mean_solver_s = solver_calls == 0 ? 0.0 : solver_time / static_cast<double>(solver_calls);
  metrics.final_network = std::move(network);
  return metrics;
}

}  // namespace

RunMetrics run_experiment(const ExperimentConfig& config, const SweepCell& cell, std::uint64_t seed) {
  return simulate(config, cell, seed, std::nullopt, nullptr);
}

MilpProblem problem_at(const ExperimentConfig& config, const SweepCell& cell, std::uint64_t seed,
                       std::size_t index) {
  MilpProblem problem;
  simulate(config, cell, seed, index, &problem);
  return problem;
}

CellMean mean_of(const std::vector<RunMetrics>& runs) {
  CellMean mean;
  if (runs.empty()) return mean;
  for (const auto& run : runs) {
    mean.cpu_util_pct += run.cpu_util_pct;
    mean.bw_util_pct += run.bw_util_pct;
    mean.acceptance_pct += run.acceptance_pct;
    mean.mean_solver_s += run.mean_solver_s;
    mean.limit_flags += run.limit_flags;
  }
  const double n = static_cast<double>(runs.size());
  mean.cpu_util_pct /= n;
  mean.bw_util_pct /= n;
  mean.acceptance_pct /= n;
  mean.mean_solver_s /= n;
  return mean;
}

std::vector<CellResult> sweep(const ExperimentConfig& config) {
  config.validate();
  const std::size_t seeds = config.seeds.size();
  const std::size_t tasks = config.cells.size() * seeds;
  std::vector<std::optional<RunMetrics>> results(tasks);
  std::vector<std::string> errors(tasks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t task = next++; task < tasks; task = next++) {
      const auto& cell = config.cells[task / seeds];
      const auto seed = config.seeds[task % seeds];
      try {
        results[task] = run_experiment(config, cell, seed);
      } catch (const std::exception& e) {
        errors[task] = "seed " + std::to_string(seed) + ": " + e.what();
        spdlog::error("cell k_rel={} d_e2e={} {}", cell.k_rel, format_number(cell.d_e2e_ms), errors[task]);
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(config.jobs, tasks);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  std::vector<CellResult> cells;
  for (std::size_t c = 0; c < config.cells.size(); ++c) {
    CellResult result;
    result.cell = config.cells[c];
    for (std::size_t s = 0; s < seeds; ++s) {
      auto& slot = results[c * seeds + s];
      if (slot) {
        result.runs.push_back(std::move(*slot));
      } else {
        result.failures.push_back(std::move(errors[c * seeds + s]));
      }
    }
    cells.push_back(std::move(result));
  }
  return cells;
}

std::vector<std::string> verify_run(const ExperimentConfig& config, const RunMetrics& run) {
  std::vector<std::string> violations;
  SubstrateNetwork network = build_fat_tree(config.effective_topology());
  const auto frozen = link_delays(network);
  auto fail = [&](const RequestRecord& record, const std::string& what) {
    violations.push_back("request " + std::to_string(record.id) + ": " + what);
  };
  for (const auto& record : run.records) {
    if (record.status != RequestStatus::kAccept) continue;
    const auto& request = record.request;
    const auto delays = config.delay_mode == DelayMode::kRecompute ? link_delays(network) : frozen;
    MilpSolution solution;
    solution.status = SolveStatus::kOptimal;
    solution.assignment = record.assignment;
    solution.flows = record.flows;
    if (record.assignment.size() != request.vnfs.size()) {
      fail(record, "assignment does not cover every VNF");
      continue;
    }
    const double delay = realized_delay(solution, request, delays);
    if (delay > request.delay_budget * (1.0 + 1e-9)) {
      fail(record, "realized delay " + format_number(delay) + " ms exceeds " + format_number(request.delay_budget));
    }
    std::vector<unsigned> count(network.server_count(), 0);
    for (std::size_t i = 0; i < record.assignment.size(); ++i) {
      const auto u = record.assignment[i];
      if (++count[u] > request.isolation_degree) {
        fail(record, "server " + std::to_string(u) + " holds more than K=" +
                         std::to_string(request.isolation_degree) + " VNFs");
      }
      if (!request.compatible(i, u)) fail(record, "VNF " + std::to_string(i) + " on an incompatible server");
    }
    // Net outflow of each vlink: +g at its source server, -g at its target.
    for (std::size_t k = 0; k < request.vlinks.size(); ++k) {
      const auto& vlink = request.vlinks[k];
      std::vector<double> net(network.node_count(), 0.0);
      for (const auto& flow : record.flows) {
        if (flow.vlink != k) continue;
        const auto& link = network.link(flow.link);
        const auto from = flow.forward ? link.a : link.b;
        net[from.value] += flow.mbps;
        net[link.other(from).value] -= flow.mbps;
      }
      const auto src = network.server(record.assignment[vlink.from]).node.value;
      const auto dst = network.server(record.assignment[vlink.to]).node.value;
      if (src != dst) {
        net[src] -= vlink.bw_demand;
        net[dst] += vlink.bw_demand;
      }
      for (double v : net) {
        if (std::fabs(v) > 1e-6 * (1.0 + vlink.bw_demand)) {
          fail(record, "flow of vlink " + std::to_string(k) + " is not conserved");
          break;
        }
      }
    }
    try {
      network = commit_allocation(network, solution, request);
    } catch (const ConsistencyError& e) {
      fail(record, e.what());
    }
  }
  for (std::size_t u = 0; u < network.server_count(); ++u) {
    if (network.server(u).cpu_residual != run.final_network.server(u).cpu_residual) {
      violations.push_back("terminal CPU residual of server " + std::to_string(u) + " differs on replay");
    }
  }
  for (std::size_t l = 0; l < network.link_count(); ++l) {
    if (network.links()[l].bw_residual != run.final_network.links()[l].bw_residual) {
      violations.push_back("terminal residual of link " + std::to_string(l) + " differs on replay");
    }
  }
  return violations;
}

}  // namespace slice_embed
