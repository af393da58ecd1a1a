#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slice_embed/formulation.hpp"
#include "slice_embed/slice_model.hpp"
#include "slice_embed/solution.hpp"
#include "slice_embed/solver.hpp"
#include "slice_embed/substrate.hpp"

namespace slice_embed {

enum class BoundMode { kCpu, kBandwidth };
enum class DelayMode { kRecompute, kFrozen };

std::string_view to_string(BoundMode mode);
std::string_view to_string(DelayMode mode);
std::optional<BoundMode> parse_bound_mode(std::string_view text);
std::optional<DelayMode> parse_delay_mode(std::string_view text);

/// Server-edge bandwidth factor of the bandwidth-bound regime (100 of 250 Mbps).
inline constexpr double kBandwidthBoundFactor = 0.4;

struct SweepCell {
  unsigned k_rel = 1;
  double d_e2e_ms = 500.0;
  friend bool operator==(const SweepCell&, const SweepCell&) = default;
};

struct ExperimentConfig {
  TopologyConfig topology;
  WorkloadParams workload;
  BoundMode bound_mode = BoundMode::kCpu;
  DelayMode delay_mode = DelayMode::kRecompute;
  std::vector<SweepCell> cells{SweepCell{}};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4};
  SolverOptions solver;
  unsigned jobs = 1;

  void validate() const;
  /// Topology with the bound mode applied.
  TopologyConfig effective_topology() const;
  /// Workload of one cell: the cell's K and budget, the seed as RNG seed.
  WorkloadParams workload_for(const SweepCell& cell, std::uint64_t seed) const;
};

enum class RequestStatus { kAccept, kReject, kLimit };
std::string_view to_string(RequestStatus status);

struct RequestRecord {
  std::size_t id = 0;
  RequestStatus status = RequestStatus::kReject;
  std::string reason;  // empty when accepted
  bool solver_invoked = false;
  double objective = 0.0;
  double realized_delay = 0.0;
  double wall = 0.0;  // seconds in the solver
  SolverStats stats;
  std::vector<std::size_t> assignment;
  std::vector<ArcFlow> flows;
  SliceRequest request;
};

struct RunMetrics {
  SweepCell cell;
  std::uint64_t seed = 0;
  std::vector<RequestRecord> records;
  SubstrateNetwork final_network;
  double cpu_util_pct = 0.0;
  double bw_util_pct = 0.0;
  double acceptance_pct = 0.0;
  double mean_solver_s = 0.0;
  std::size_t accepted = 0;
  std::size_t limit_flags = 0;
  /// False for a run without requests; acceptance_pct is then reported as 0.
  bool acceptance_defined = false;
};

/// Sequential admission of one seed's request stream in one cell, starting
/// from a fresh network.
RunMetrics run_experiment(const ExperimentConfig& config, const SweepCell& cell, std::uint64_t seed);

/// Problem of request `index` at its arrival-time network state.
/// Throws ConfigurationError if the index is out of range.
MilpProblem problem_at(const ExperimentConfig& config, const SweepCell& cell, std::uint64_t seed,
                       std::size_t index);

struct CellMean {
  double cpu_util_pct = 0.0;
  double bw_util_pct = 0.0;
  double acceptance_pct = 0.0;
  double mean_solver_s = 0.0;
  std::size_t limit_flags = 0;
};

/// Plain average over runs, accumulated in run order.
CellMean mean_of(const std::vector<RunMetrics>& runs);

struct CellResult {
  SweepCell cell;
  std::vector<RunMetrics> runs;        // one per completed seed, in seed order
  std::vector<std::string> failures;   // "seed <s>: <message>"
  bool failed() const { return !failures.empty(); }
};

/// Every cell for every seed. Runs are independent and use up to
/// `config.jobs` threads; results come back in cell and seed order.
std::vector<CellResult> sweep(const ExperimentConfig& config);

/// Replays accepted records from a fresh network and returns every violated
/// invariant: delay budget, isolation degree, compatibility, flow balance,
/// negative residuals and the terminal residual state.
std::vector<std::string> verify_run(const ExperimentConfig& config, const RunMetrics& run);

}  // namespace slice_embed
