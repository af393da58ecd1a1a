#include "slice_embed/formulation.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "slice_embed/errors.hpp"
#include "slice_embed/text.hpp"

namespace slice_embed {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace

std::string VariableRef::name() const {
  if (const auto* x = std::get_if<AssignmentVar>(&kind)) {
    return "x_" + std::to_string(x->vnf) + "_" + std::to_string(x->server);
  }
  const auto& f = std::get<FlowVar>(kind);
  return "f_" + std::to_string(f.vlink) + "_" + std::to_string(f.link.value) + (f.forward ? "_f" : "_r");
}

std::optional<std::variant<AssignmentVar, FlowVar>> parse_variable_name(std::string_view name) {
  const auto parts = split(name, '_');
  try {
    if (parts.size() == 3 && parts[0] == "x") {
      return AssignmentVar{static_cast<std::size_t>(parse_integer(parts[1])),
                           static_cast<std::size_t>(parse_integer(parts[2]))};
    }
    if (parts.size() == 4 && parts[0] == "f" && (parts[3] == "f" || parts[3] == "r")) {
      return FlowVar{static_cast<std::size_t>(parse_integer(parts[1])),
                     LinkId{static_cast<std::uint32_t>(parse_integer(parts[2]))}, parts[3] == "f"};
    }
  } catch (const std::invalid_argument&) {
  }
  return std::nullopt;
}

void LinearExpr::add(std::size_t var, double coef) {
  for (auto& term : terms) {
    if (term.var == var) {
      term.coef += coef;
      return;
    }
  }
  terms.push_back(Term{var, coef});
}

double LinearExpr::evaluate(std::span<const double> values) const {
  double total = 0.0;
  for (const auto& term : terms) total += term.coef * values[term.var];
  return total;
}

std::string_view label(RowFamily family) {
  switch (family) {
    case RowFamily::kIsolation:
      return "eq2-iso";
    case RowFamily::kDelay:
      return "eq3-delay";
    case RowFamily::kAssign:
      return "assign";
    case RowFamily::kNodeCapacity:
      return "node-cap";
    case RowFamily::kFlowConservation:
      return "flow-cons";
    case RowFamily::kLinkCapacity:
      return "link-cap";
    case RowFamily::kCompatibility:
      return "compat";
  }
  return "unknown";
}

std::string_view sense_symbol(Sense sense) {
  switch (sense) {
    case Sense::kLessEqual:
      return "<=";
    case Sense::kEqual:
      return "=";
    case Sense::kGreaterEqual:
      return ">=";
  }
  return "?";
}

std::size_t MilpProblem::count_rows(RowFamily family) const {
  std::size_t count = 0;
  for (const auto& row : rows) count += row.family == family ? 1 : 0;
  return count;
}

MilpProblem build_problem(const SubstrateNetwork& network, const SliceRequest& request,
                          std::span<const double> link_delays) {
  request.validate();
  if (link_delays.size() != network.link_count()) {
    throw ConfigurationError("link delay vector does not match the network");
  }
  const std::size_t servers = network.server_count();
  const std::size_t vnfs = request.vnfs.size();
  const std::size_t links = network.link_count();
  const std::size_t vlinks = request.vlinks.size();

  MilpProblem problem;
  EmbeddingLayout layout;
  layout.vnf_count = vnfs;
  layout.server_count = servers;
  layout.node_count = network.node_count();
  layout.isolation_degree = request.isolation_degree;
  layout.vlinks = request.vlinks;
  double processing = 0.0;
  for (const auto& vnf : request.vnfs) {
    layout.cpu_demand.push_back(vnf.cpu_demand);
    processing += vnf.proc_delay;
  }
  layout.delay_slack = request.delay_budget - processing;
  for (const auto& server : network.servers()) {
    layout.server_residual.push_back(server.cpu_residual);
    layout.server_node.push_back(server.node.value);
  }
  layout.compatible.resize(vnfs * servers);
  for (std::size_t i = 0; i < vnfs; ++i) {
    for (std::size_t u = 0; u < servers; ++u) {
      layout.compatible[i * servers + u] = request.compatible(i, u) ? 1 : 0;
    }
  }
  for (std::size_t l = 0; l < links; ++l) {
    const auto& link = network.links()[l];
    layout.links.push_back(LayoutLink{link.a.value, link.b.value, link.bw_residual, link_delays[l]});
  }

  problem.variables.reserve(vnfs * servers + vlinks * links * 2);
  for (std::size_t i = 0; i < vnfs; ++i) {
    for (std::size_t u = 0; u < servers; ++u) {
      problem.variables.push_back(VariableRef{AssignmentVar{i, u}, Integrality::kBinary, 0.0, 1.0});
    }
  }
  for (std::size_t k = 0; k < vlinks; ++k) {
    for (std::size_t l = 0; l < links; ++l) {
      for (bool forward : {true, false}) {
        problem.variables.push_back(VariableRef{
            FlowVar{k, LinkId{static_cast<std::uint32_t>(l)}, forward}, Integrality::kContinuous, 0.0, kInfinity});
      }
    }
  }

  // Placement cost weighted by server utilization, plus delay-weighted flow.
  for (std::size_t i = 0; i < vnfs; ++i) {
    for (std::size_t u = 0; u < servers; ++u) {
      const auto& server = network.server(u);
      const double weight = 1.0 - server.cpu_residual / server.cpu_max;
      const double gamma = request.compatible(i, u) ? 1.0 : 0.0;
      const double coef = weight * request.vnfs[i].cpu_demand * gamma;
      if (coef != 0.0) problem.objective.terms.push_back(Term{layout.assignment_column(i, u), coef});
    }
  }
  for (std::size_t k = 0; k < vlinks; ++k) {
    for (std::size_t l = 0; l < links; ++l) {
      if (link_delays[l] == 0.0) continue;
      for (bool forward : {true, false}) {
        problem.objective.terms.push_back(Term{layout.flow_column(k, l, forward), link_delays[l]});
      }
    }
  }

  auto& rows = problem.rows;
  for (std::size_t u = 0; u < servers; ++u) {
    ConstraintRow row{{}, Sense::kLessEqual, static_cast<double>(request.isolation_degree),
                      RowFamily::kIsolation, "iso_" + std::to_string(u)};
    for (std::size_t i = 0; i < vnfs; ++i) row.expr.terms.push_back(Term{layout.assignment_column(i, u), 1.0});
    rows.push_back(std::move(row));
  }
  {
    ConstraintRow row{{}, Sense::kLessEqual, layout.delay_slack, RowFamily::kDelay, "delay"};
    for (std::size_t k = 0; k < vlinks; ++k) {
      const double demand = request.vlinks[k].bw_demand;
      for (std::size_t l = 0; l < links; ++l) {
        if (link_delays[l] == 0.0) continue;
        for (bool forward : {true, false}) {
          row.expr.terms.push_back(Term{layout.flow_column(k, l, forward), link_delays[l] / demand});
        }
      }
    }
    rows.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < vnfs; ++i) {
    ConstraintRow row{{}, Sense::kEqual, 1.0, RowFamily::kAssign, "assign_" + std::to_string(i)};
    for (std::size_t u = 0; u < servers; ++u) row.expr.terms.push_back(Term{layout.assignment_column(i, u), 1.0});
    rows.push_back(std::move(row));
  }
  for (std::size_t u = 0; u < servers; ++u) {
    ConstraintRow row{{}, Sense::kLessEqual, network.server(u).cpu_residual, RowFamily::kNodeCapacity,
                      "cap_" + std::to_string(u)};
    for (std::size_t i = 0; i < vnfs; ++i) {
      row.expr.terms.push_back(Term{layout.assignment_column(i, u), request.vnfs[i].cpu_demand});
    }
    rows.push_back(std::move(row));
  }
  for (std::size_t k = 0; k < vlinks; ++k) {
    const auto& vlink = request.vlinks[k];
    for (std::size_t w = 0; w < network.node_count(); ++w) {
      const NodeId node{static_cast<std::uint32_t>(w)};
      ConstraintRow row{{}, Sense::kEqual, 0.0, RowFamily::kFlowConservation,
                        "flow_" + std::to_string(k) + "_" + std::to_string(w)};
      for (const auto& adj : network.neighbors(node)) {
        const auto& link = network.link(adj.link);
        const bool out_is_forward = link.a == node;
        row.expr.terms.push_back(Term{layout.flow_column(k, adj.link.value, out_is_forward), 1.0});
        row.expr.terms.push_back(Term{layout.flow_column(k, adj.link.value, !out_is_forward), -1.0});
      }
      if (const auto u = network.server_index(node)) {
        row.expr.add(layout.assignment_column(vlink.from, *u), -vlink.bw_demand);
        row.expr.add(layout.assignment_column(vlink.to, *u), vlink.bw_demand);
      }
      rows.push_back(std::move(row));
    }
  }
  for (std::size_t l = 0; l < links; ++l) {
    ConstraintRow row{{}, Sense::kLessEqual, network.links()[l].bw_residual, RowFamily::kLinkCapacity,
                      "link_" + std::to_string(l)};
    for (std::size_t k = 0; k < vlinks; ++k) {
      row.expr.terms.push_back(Term{layout.flow_column(k, l, true), 1.0});
      row.expr.terms.push_back(Term{layout.flow_column(k, l, false), 1.0});
    }
    rows.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < vnfs; ++i) {
    for (std::size_t u = 0; u < servers; ++u) {
      ConstraintRow row{{}, Sense::kLessEqual, request.compatible(i, u) ? 1.0 : 0.0, RowFamily::kCompatibility,
                        "compat_" + std::to_string(i) + "_" + std::to_string(u)};
      row.expr.terms.push_back(Term{layout.assignment_column(i, u), 1.0});
      rows.push_back(std::move(row));
    }
  }

  problem.layout = std::move(layout);
  return problem;
}

MilpProblem build_problem(const SubstrateNetwork& network, const SliceRequest& request) {
  const auto delays = link_delays(network);
  return build_problem(network, request, delays);
}

AggregateCheck check_aggregate(const SubstrateNetwork& network, const SliceRequest& request) {
  const auto demand = total_demands(request);
  double cpu_residual = 0.0, bw_residual = 0.0;
  for (const auto& server : network.servers()) cpu_residual += server.cpu_residual;
  for (const auto& link : network.links()) bw_residual += link.bw_residual;
  if (demand.cpu > cpu_residual) {
    return {false, AggregateShortfall::kCpu,
            "cpu demand " + format_number(demand.cpu) + " > residual " + format_number(cpu_residual)};
  }
  if (demand.bw > bw_residual) {
    return {false, AggregateShortfall::kBandwidth,
            "bandwidth demand " + format_number(demand.bw) + " > residual " + format_number(bw_residual)};
  }
  return {};
}

double realized_delay(const MilpSolution& solution, const SliceRequest& request,
                      std::span<const double> link_delays) {
  double delay = 0.0;
  for (const auto& vnf : request.vnfs) delay += vnf.proc_delay;
  for (const auto& flow : solution.flows) {
    delay += flow.mbps / request.vlinks.at(flow.vlink).bw_demand * link_delays[flow.link.value];
  }
  return delay;
}

double realized_delay(const MilpSolution& solution, const SubstrateNetwork& network,
                      const SliceRequest& request) {
  const auto delays = link_delays(network);
  return realized_delay(solution, request, delays);
}

double embedding_objective(const SubstrateNetwork& network, const SliceRequest& request,
                           const MilpSolution& solution, std::span<const double> link_delays) {
  double total = 0.0;
  for (std::size_t i = 0; i < solution.assignment.size(); ++i) {
    const auto u = solution.assignment[i];
    const auto& server = network.server(u);
    const double gamma = request.compatible(i, u) ? 1.0 : 0.0;
    total += (1.0 - server.cpu_residual / server.cpu_max) * request.vnfs[i].cpu_demand * gamma;
  }
  for (const auto& flow : solution.flows) total += link_delays[flow.link.value] * flow.mbps;
  return total;
}

}  // namespace slice_embed
