#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "slice_embed/slice_model.hpp"
#include "slice_embed/solution.hpp"
#include "slice_embed/substrate.hpp"

namespace slice_embed {

struct AssignmentVar {
  std::size_t vnf = 0;
  std::size_t server = 0;
};

struct FlowVar {
  std::size_t vlink = 0;
  LinkId link;
  bool forward = true;
};

enum class Integrality { kBinary, kContinuous };

struct VariableRef {
  std::variant<AssignmentVar, FlowVar> kind;
  Integrality integrality = Integrality::kContinuous;
  double lo = 0.0;
  double hi = 0.0;

  bool is_assignment() const { return std::holds_alternative<AssignmentVar>(kind); }
  /// `x_<vnf>_<server>` or `f_<vlink>_<link>_<f|r>`.
  std::string name() const;
};

/// Parses a name produced by VariableRef::name(); nullopt otherwise.
std::optional<std::variant<AssignmentVar, FlowVar>> parse_variable_name(std::string_view name);

struct Term {
  std::size_t var = 0;
  double coef = 0.0;
};

/// Sparse expression with at most one entry per variable.
struct LinearExpr {
  std::vector<Term> terms;

  /// Adds to an existing entry for `var` or appends a new one.
  void add(std::size_t var, double coef);
  double evaluate(std::span<const double> values) const;
};

enum class Sense { kLessEqual, kEqual, kGreaterEqual };

/// Which modelling rule produced a row.
enum class RowFamily {
  kIsolation,
  kDelay,
  kAssign,
  kNodeCapacity,
  kFlowConservation,
  kLinkCapacity,
  kCompatibility,
};

inline constexpr std::string_view kObjectiveLabel = "eq1-obj";
std::string_view label(RowFamily family);
std::string_view sense_symbol(Sense sense);

struct ConstraintRow {
  LinearExpr expr;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
  RowFamily family = RowFamily::kIsolation;
  std::string name;
};

struct LayoutLink {
  std::size_t a = 0;  // node index
  std::size_t b = 0;
  double residual = 0.0;
  double delay = 0.0;
};

/// Snapshot of the instance behind a MilpProblem, so structure-aware search
/// can bound partial assignments without re-deriving it from rows.
struct EmbeddingLayout {
  std::size_t vnf_count = 0;
  std::size_t server_count = 0;
  std::size_t node_count = 0;
  unsigned isolation_degree = 1;
  std::vector<double> cpu_demand;       // per VNF
  std::vector<double> server_residual;  // per server
  std::vector<std::size_t> server_node;  // node index per server
  std::vector<std::uint8_t> compatible;  // vnf * server_count + server
  std::vector<VirtualLink> vlinks;
  std::vector<LayoutLink> links;
  double delay_slack = 0.0;  // delay budget minus total processing delay

  std::size_t link_count() const { return links.size(); }
  std::size_t assignment_column(std::size_t vnf, std::size_t server) const {
    return vnf * server_count + server;
  }
  std::size_t flow_column(std::size_t vlink, std::size_t link, bool forward) const {
    return vnf_count * server_count + (vlink * links.size() + link) * 2 + (forward ? 0 : 1);
  }
};

/// Minimisation MILP. Assignment variables are binary; flows continuous.
struct MilpProblem {
  std::vector<VariableRef> variables;
  LinearExpr objective;
  std::vector<ConstraintRow> rows;
  std::optional<EmbeddingLayout> layout;

  std::size_t count_rows(RowFamily family) const;
};

/// Variable order: x(i,u) at i*|servers|+u, then f(k, link, dir) per layout.
/// Row order: isolation, delay, assign, node-cap, flow-cons, link-cap, compat.
MilpProblem build_problem(const SubstrateNetwork& network, const SliceRequest& request,
                          std::span<const double> link_delays);
/// Link delays evaluated from the network's current residuals.
MilpProblem build_problem(const SubstrateNetwork& network, const SliceRequest& request);

enum class AggregateShortfall { kNone, kCpu, kBandwidth };

struct AggregateCheck {
  bool feasible = true;
  AggregateShortfall reason = AggregateShortfall::kNone;
  std::string detail;
};

/// Total demand against total datacenter residual, before any solve.
AggregateCheck check_aggregate(const SubstrateNetwork& network, const SliceRequest& request);

/// Sum over flows of (f / g_ij) * L_uv plus total processing delay,
/// recomputed from the solution's flow list.
double realized_delay(const MilpSolution& solution, const SliceRequest& request,
                      std::span<const double> link_delays);
double realized_delay(const MilpSolution& solution, const SubstrateNetwork& network,
                      const SliceRequest& request);

/// Objective recomputed from (assignment, flows) and the network state.
double embedding_objective(const SubstrateNetwork& network, const SliceRequest& request,
                           const MilpSolution& solution, std::span<const double> link_delays);

/// CPLEX-style LP text: Minimize / Subject To / Bounds / Binary / End.
void write_lp(std::ostream& out, const MilpProblem& problem);
/// Reads the subset of LP text that write_lp emits. Variable names must be
/// the x_/f_ forms; the result carries no layout.
MilpProblem read_lp(std::istream& in);

}  // namespace slice_embed
