#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "slice_embed/formulation.hpp"
#include "slice_embed/slice_model.hpp"
#include "slice_embed/solution.hpp"
#include "slice_embed/substrate.hpp"

namespace slice_embed {

/// A tiny network plus one request, with link capacities at least twice the
/// request's total bandwidth so single-path routing never loads a link past
/// half its residual.
struct OracleInstance {
  SubstrateNetwork network;
  SliceRequest request;
};

OracleInstance generate_oracle_instance(std::mt19937_64& rng, std::size_t max_servers, std::size_t max_vnfs);

/// `server <name> <cpu_max> <cpu_residual>`, `switch <name> <kind>` and
/// `link <a> <b> <bw_max> <bw_residual> <delay_init>` lines in node order,
/// a blank line, then the request.
void write_instance(std::ostream& out, const OracleInstance& instance);
OracleInstance read_instance(std::istream& in);

using MilpSolverFn = std::function<MilpSolution(const MilpProblem&)>;
using OracleSolverFn =
    std::function<MilpSolution(const SubstrateNetwork&, const SliceRequest&, std::span<const double>)>;

struct NamedSolver {
  std::string name;
  MilpSolverFn solve;
};

/// Both branch strategies with default options.
std::vector<NamedSolver> default_solvers();

struct OracleCheckOptions {
  std::size_t count = 200;
  std::uint64_t seed = 1;
  std::size_t max_servers = 5;
  std::size_t max_vnfs = 3;
  double tolerance = 1e-6;
};

struct OracleReport {
  std::size_t instances = 0;
  std::size_t comparisons = 0;
  std::size_t mismatches = 0;
  std::size_t feasible = 0;
  double max_deviation = 0.0;
  std::vector<std::string> lines;
  std::optional<OracleInstance> first_failure;
  std::size_t first_failure_index = 0;
};

/// Generates `count` instances and compares every solver with the oracle on
/// status, objective, and the objective recomputed from the returned
/// assignment and flows.
OracleReport run_oracle_check(const OracleCheckOptions& options, const std::vector<NamedSolver>& solvers,
                              const OracleSolverFn& oracle);

}  // namespace slice_embed
