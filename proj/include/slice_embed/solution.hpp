#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "slice_embed/substrate.hpp"

namespace slice_embed {

enum class SolveStatus { kOptimal, kInfeasible };

/// Flow of one virtual link over one link in one direction
/// (forward = from link.a to link.b).
struct ArcFlow {
  std::size_t vlink = 0;
  LinkId link;
  bool forward = true;
  double mbps = 0.0;
};

struct SolverStats {
  std::uint64_t branch_nodes = 0;
  std::uint64_t lp_iterations = 0;
  double wall_time = 0.0;  // seconds
};

/// `nodes=<n> lp_iters=<n> wall=<s>`
std::string format_stats(const SolverStats& stats);

struct MilpSolution {
  SolveStatus status = SolveStatus::kInfeasible;
  double objective = 0.0;
  /// Server index per VNF (optimal only).
  std::vector<std::size_t> assignment;
  /// Strictly positive flows only.
  std::vector<ArcFlow> flows;
  /// Raw variable values aligned with the problem's variables; empty for
  /// solutions that did not come from a MilpProblem.
  std::vector<double> values;
  SolverStats stats;

  bool optimal() const { return status == SolveStatus::kOptimal; }
};

}  // namespace slice_embed
