#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "slice_embed/formulation.hpp"
#include "slice_embed/simplex.hpp"
#include "slice_embed/slice_model.hpp"
#include "slice_embed/solution.hpp"
#include "slice_embed/substrate.hpp"

namespace slice_embed {

struct VariableBounds {
  double lo = 0.0;
  double hi = 0.0;
};

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;
  std::vector<double> values;  // aligned with problem.variables
  std::uint64_t iterations = 0;
};

/// LP relaxation of `problem` (integrality dropped). `bounds`, if non-empty,
/// replaces every variable's bounds. Fixed columns are substituted out and
/// singleton rows become bounds before the simplex runs.
LpSolution solve_lp(const MilpProblem& problem, std::span<const VariableBounds> bounds = {},
                    const SimplexOptions& options = {});

enum class BranchStrategy {
  /// LP-based best-first search, branching on the most fractional
  /// assignment variable (ties by lowest index; nodes by bound, then depth).
  kMostFractional,
  /// Depth-first enumeration of VNF placements with a combinatorial bound;
  /// flows are solved exactly by LP at complete placements. Needs a layout.
  kAssignmentTree,
};

struct SolverOptions {
  BranchStrategy strategy = BranchStrategy::kAssignmentTree;
  std::uint64_t node_limit = 1'000'000;
  SimplexOptions lp;
};

/// Proven-optimal solve. Throws ResourceLimitError when the node limit is
/// reached and SolverFailure when the LP layer breaks down.
MilpSolution solve_milp(const MilpProblem& problem, const SolverOptions& options = {});

/// Exhaustive oracle: every assignment, each vlink routed on one minimum
/// delay path. Throws OracleScopeError if servers^vnfs exceeds `cap`.
MilpSolution brute_force_solve(const SubstrateNetwork& network, const SliceRequest& request,
                               std::span<const double> link_delays, std::uint64_t cap = 1'000'000);
MilpSolution brute_force_solve(const SubstrateNetwork& network, const SliceRequest& request);

/// Positive flows and per-VNF servers read from raw variable values.
void extract_embedding(const MilpProblem& problem, MilpSolution& solution);

}  // namespace slice_embed
