#include "slice_embed/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "slice_embed/errors.hpp"
#include "slice_embed/solver.hpp"
#include "slice_embed/text.hpp"

namespace slice_embed {

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
}

double uniform(std::mt19937_64& rng, double lo, double hi) { return sample_uniform(rng, DemandRange{lo, hi}); }

std::string_view status_name(const MilpSolution& solution) {
  return solution.optimal() ? "optimal" : "infeasible";
}

}  // namespace

OracleInstance generate_oracle_instance(std::mt19937_64& rng, std::size_t max_servers, std::size_t max_vnfs) {
  const std::size_t servers = pick(rng, std::min<std::size_t>(2, max_servers), std::max<std::size_t>(1, max_servers));
  const std::size_t vnfs = pick(rng, std::min<std::size_t>(2, max_vnfs), std::max<std::size_t>(1, max_vnfs));

  SliceRequest request;
  request.isolation_degree = static_cast<unsigned>(pick(rng, 1, 3));
  double processing = 0.0, total_bw = 0.0;
  for (std::size_t i = 0; i < vnfs; ++i) {
    const VnfSpec vnf{uniform(rng, 0.5, 4.0), uniform(rng, 0.3, 2.0)};
    processing += vnf.proc_delay;
    request.vnfs.push_back(vnf);
  }
  for (std::size_t i = 0; i + 1 < vnfs; ++i) {
    request.vlinks.push_back(VirtualLink{i, i + 1, uniform(rng, 30.0, 70.0)});
  }
  if (vnfs == 3 && rng() % 4 == 0) request.vlinks.push_back(VirtualLink{0, 2, uniform(rng, 30.0, 70.0)});
  for (const auto& vlink : request.vlinks) total_bw += vlink.bw_demand;
  request.delay_budget = processing + uniform(rng, 0.0, 3.0);
  for (std::size_t i = 0; i < vnfs; ++i) {
    for (std::size_t u = 0; u < servers; ++u) {
      if (rng() % 10 == 0) request.incompatible.emplace(i, u);
    }
  }

  std::vector<std::size_t> divisors;
  for (std::size_t e = 1; e <= servers; ++e) {
    if (servers % e == 0) divisors.push_back(e);
  }
  TopologyConfig topology;
  topology.edge_switch_count = divisors[pick(rng, 0, divisors.size() - 1)];
  topology.server_count = servers;
  topology.servers_per_edge_switch = servers / topology.edge_switch_count;
  topology.aggregation_switch_count = pick(rng, 1, 2);
  topology.datacenter_switch_count = pick(rng, 1, 2);
  // Capacity 4x the request's total bandwidth, residual at least 2x.
  const double capacity = 4.0 * std::max(total_bw, 1.0);
  topology.server_edge_bw = topology.edge_agg_bw = topology.agg_dc_bw = capacity;
  topology.server_edge_delay = uniform(rng, 0.05, 0.5);
  topology.edge_agg_delay = uniform(rng, 0.05, 0.5);
  topology.agg_dc_delay = uniform(rng, 0.05, 0.5);

  OracleInstance instance{build_fat_tree(topology), std::move(request)};
  for (std::size_t u = 0; u < servers; ++u) {
    instance.network.set_server_residual(u, uniform(rng, 0.0, topology.server_cpu_ghz));
  }
  for (std::size_t l = 0; l < instance.network.link_count(); ++l) {
    instance.network.set_link_residual(LinkId{static_cast<std::uint32_t>(l)}, uniform(rng, capacity / 2.0, capacity));
  }
  return instance;
}

void write_instance(std::ostream& out, const OracleInstance& instance) {
  const auto& network = instance.network;
  for (std::size_t n = 0; n < network.node_count(); ++n) {
    const NodeId id{static_cast<std::uint32_t>(n)};
    const auto& node = network.node(id);
    if (const auto u = network.server_index(id)) {
      const auto& server = network.server(*u);
      out << "server " << node.name << ' ' << format_number(server.cpu_max) << ' '
          << format_number(server.cpu_residual) << '\n';
    } else {
      out << "switch " << node.name << ' ' << to_string(node.kind) << '\n';
    }
  }
  for (const auto& link : network.links()) {
    out << "link " << network.node(link.a).name << ' ' << network.node(link.b).name << ' '
        << format_number(link.bw_max) << ' ' << format_number(link.bw_residual) << ' '
        << format_number(link.delay_init) << '\n';
  }
  out << '\n';
  write_request(out, instance.request);
}

OracleInstance read_instance(std::istream& in) {
  OracleInstance instance;
  auto& network = instance.network;
  std::string line;
  std::size_t line_no = 0;
  try {
    while (std::getline(in, line)) {
      ++line_no;
      const auto fields = split_whitespace(trim(line));
      if (fields.empty()) {
        if (network.node_count() > 0) break;
        continue;
      }
      if (fields[0] == "server" && fields.size() == 4) {
        network.add_server(std::string(fields[1]), parse_number(fields[2]));
        network.set_server_residual(network.server_count() - 1, parse_number(fields[3]));
      } else if (fields[0] == "switch" && fields.size() == 3) {
        NodeKind kind;
        if (fields[2] == to_string(NodeKind::kEdgeSwitch)) {
          kind = NodeKind::kEdgeSwitch;
        } else if (fields[2] == to_string(NodeKind::kAggregationSwitch)) {
          kind = NodeKind::kAggregationSwitch;
        } else if (fields[2] == to_string(NodeKind::kDatacenterSwitch)) {
          kind = NodeKind::kDatacenterSwitch;
        } else {
          throw ParseError("unknown switch kind", line_no);
        }
        network.add_switch(std::string(fields[1]), kind);
      } else if (fields[0] == "link" && fields.size() == 6) {
        const auto a = network.find_node(fields[1]), b = network.find_node(fields[2]);
        if (!a || !b) throw ParseError("link names an unknown node", line_no);
        const auto id = network.add_link(*a, *b, parse_number(fields[3]), parse_number(fields[5]));
        network.set_link_residual(id, parse_number(fields[4]));
      } else {
        throw ParseError("unrecognized instance line", line_no);
      }
    }
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), line_no);
  } catch (const ConfigurationError& e) {
    throw ParseError(e.what(), line_no);
  } catch (const ConsistencyError& e) {
    throw ParseError(e.what(), line_no);
  }
  instance.request = read_request(in);
  return instance;
}

std::vector<NamedSolver> default_solvers() {
  std::vector<NamedSolver> solvers;
  for (const auto strategy : {BranchStrategy::kMostFractional, BranchStrategy::kAssignmentTree}) {
    SolverOptions options;
    options.strategy = strategy;
    solvers.push_back(NamedSolver{strategy == BranchStrategy::kMostFractional ? "most-fractional" : "assignment-tree",
                                  [options](const MilpProblem& problem) { return solve_milp(problem, options); }});
  }
  return solvers;
}

OracleReport run_oracle_check(const OracleCheckOptions& options, const std::vector<NamedSolver>& solvers,
                              const OracleSolverFn& oracle) {
  OracleReport report;
  std::mt19937_64 rng(options.seed);
  for (std::size_t n = 0; n < options.count; ++n) {
    const auto instance = generate_oracle_instance(rng, options.max_servers, options.max_vnfs);
    const auto delays = link_delays(instance.network);
    const auto problem = build_problem(instance.network, instance.request, delays);
    const auto expected = oracle(instance.network, instance.request, delays);
    ++report.instances;
    report.feasible += expected.optimal() ? 1 : 0;
    bool instance_failed = false;
    for (const auto& solver : solvers) {
      ++report.comparisons;
      std::ostringstream line;
      line << "instance=" << n << " solver=" << solver.name << " servers=" << instance.network.server_count()
           << " vnfs=" << instance.request.vnfs.size() << " K=" << instance.request.isolation_degree;
      std::string problem_text;
      MilpSolution got;
      try {
        got = solver.solve(problem);
      } catch (const std::exception& e) {
        problem_text = std::string("solver error: ") + e.what();
      }
      if (problem_text.empty()) {
        line << " status=" << status_name(got) << " oracle=" << status_name(expected);
        if (got.status != expected.status) {
          problem_text = "status mismatch";
        } else if (got.optimal()) {
          const double deviation = std::fabs(got.objective - expected.objective);
          const double recomputed = embedding_objective(instance.network, instance.request, got, delays);
          const double drift = std::fabs(recomputed - got.objective);
          report.max_deviation = std::max(report.max_deviation, deviation);
          line << " obj=" << format_number(got.objective) << " expected=" << format_number(expected.objective)
               << " dev=" << format_number(deviation);
          if (deviation > options.tolerance) {
            problem_text = "objective mismatch";
          } else if (drift > options.tolerance) {
            problem_text = "objective differs from its recomputation by " + format_number(drift);
          }
        }
      }
      if (!problem_text.empty()) {
        line << " MISMATCH " << problem_text;
        ++report.mismatches;
        instance_failed = true;
      }
      report.lines.push_back(line.str());
    }
    if (instance_failed && !report.first_failure) {
      report.first_failure = instance;
      report.first_failure_index = n;
    }
  }
  return report;
}

}  // namespace slice_embed
