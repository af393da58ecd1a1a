#include "slice_embed/commit.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "slice_embed/errors.hpp"
#include "slice_embed/text.hpp"

namespace slice_embed {

namespace {

// Residuals within this relative distance below zero are rounding noise.
constexpr double kRounding = 1e-9;

double settle(double residual, double max, const std::string& what) {
  if (residual >= 0.0) return residual;
  if (residual >= -kRounding * (1.0 + max)) return 0.0;
  throw ConsistencyError(what + " would go negative (" + format_number(residual) + ")");
}

}  // namespace

SubstrateNetwork commit_allocation(const SubstrateNetwork& network, const MilpSolution& solution,
                                   const SliceRequest& request) {
  if (!solution.optimal()) return network;
  if (solution.assignment.size() != request.vnfs.size()) {
    throw ConsistencyError("solution assigns " + std::to_string(solution.assignment.size()) + " of " +
                           std::to_string(request.vnfs.size()) + " VNFs");
  }
  std::vector<double> cpu(network.server_count()), bw(network.link_count());
  for (std::size_t u = 0; u < cpu.size(); ++u) cpu[u] = network.server(u).cpu_residual;
  for (std::size_t l = 0; l < bw.size(); ++l) bw[l] = network.links()[l].bw_residual;
  for (std::size_t i = 0; i < request.vnfs.size(); ++i) {
    const auto u = solution.assignment[i];
    if (u >= cpu.size()) throw ConsistencyError("assignment names a missing server");
    cpu[u] -= request.vnfs[i].cpu_demand;
  }
  for (const auto& flow : solution.flows) {
    if (flow.link.value >= bw.size()) throw ConsistencyError("flow on a missing link");
    if (flow.mbps < 0.0) throw ConsistencyError("negative flow");
    bw[flow.link.value] -= flow.mbps;
  }
  SubstrateNetwork next = network;
  for (std::size_t u = 0; u < cpu.size(); ++u) {
    const auto& server = network.server(u);
    next.set_server_residual(u, settle(cpu[u], server.cpu_max, "CPU residual of " + network.node(server.node).name));
  }
  for (std::size_t l = 0; l < bw.size(); ++l) {
    const auto& link = network.links()[l];
    next.set_link_residual(LinkId{static_cast<std::uint32_t>(l)},
                           settle(bw[l], link.bw_max,
                                  "bandwidth residual of " + network.node(link.a).name + "-" + network.node(link.b).name));
  }
  return next;
}

}  // namespace slice_embed
