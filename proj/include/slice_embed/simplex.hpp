#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "slice_embed/formulation.hpp"

namespace slice_embed {

struct LpRow {
  std::vector<std::size_t> index;
  std::vector<double> coef;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
};

/// min cost.x subject to rows and lower <= x <= upper. Bounds may be
/// infinite.
struct LinearProgram {
  std::vector<double> cost;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<LpRow> rows;

  std::size_t column_count() const { return cost.size(); }
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;
  std::vector<double> x;
  std::uint64_t iterations = 0;
  double tolerance_used = 0.0;
};

struct SimplexOptions {
  double tolerance = 1e-10;
  double fallback_tolerance = 1e-7;
  std::uint64_t iteration_limit = 200000;
};

/// Bounded primal simplex on a dense tableau, two phases. Retries once with
/// the fallback tolerance and Bland pricing if the first attempt stalls or
/// loses feasibility; throws SolverFailure if both attempts fail.
LpResult solve_simplex(const LinearProgram& lp, const SimplexOptions& options = {});

}  // namespace slice_embed
