#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "slice_embed/errors.hpp"
#include "slice_embed/solver.hpp"

namespace slice_embed {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSlack = 1e-9;

}  // namespace

MilpSolution brute_force_solve(const SubstrateNetwork& network, const SliceRequest& request,
                               std::span<const double> link_delays, std::uint64_t cap) {
  const auto start = std::chrono::steady_clock::now();
  request.validate();
  const std::size_t servers = network.server_count();
  const std::size_t vnfs = request.vnfs.size();
  const std::size_t nodes = network.node_count();

  std::uint64_t candidates = 1;
  for (std::size_t i = 0; i < vnfs; ++i) {
    if (servers != 0 && candidates > cap / servers) {
      throw OracleScopeError("brute force over " + std::to_string(servers) + "^" + std::to_string(vnfs) +
                             " assignments exceeds the cap of " + std::to_string(cap));
    }
    candidates *= servers;
  }
  if (candidates > cap) throw OracleScopeError("brute force exceeds the enumeration cap");

  // All-pairs minimum delay with the link used to leave each node, over
  // links with spare capacity.
  std::vector<double> dist(nodes * nodes, kInf);
  std::vector<std::ptrdiff_t> via(nodes * nodes, -1);
  for (std::size_t v = 0; v < nodes; ++v) dist[v * nodes + v] = 0.0;
  for (std::size_t l = 0; l < network.link_count(); ++l) {
    const auto& link = network.links()[l];
    if (!(link.bw_residual > 0.0)) continue;
    const std::size_t a = link.a.value, b = link.b.value;
    if (link_delays[l] < dist[a * nodes + b]) {
      dist[a * nodes + b] = dist[b * nodes + a] = link_delays[l];
      via[a * nodes + b] = via[b * nodes + a] = static_cast<std::ptrdiff_t>(l);
    }
  }
  std::vector<std::size_t> next(nodes * nodes);
  for (std::size_t a = 0; a < nodes; ++a) {
    for (std::size_t b = 0; b < nodes; ++b) next[a * nodes + b] = b;
  }
  for (std::size_t k = 0; k < nodes; ++k) {
    for (std::size_t a = 0; a < nodes; ++a) {
      for (std::size_t b = 0; b < nodes; ++b) {
        const double through = dist[a * nodes + k] + dist[k * nodes + b];
        if (through < dist[a * nodes + b]) {
          dist[a * nodes + b] = through;
          next[a * nodes + b] = next[a * nodes + k];
        }
      }
    }
  }

  double processing = 0.0;
  for (const auto& vnf : request.vnfs) processing += vnf.proc_delay;

  MilpSolution best;
  best.objective = kInf;
  std::vector<std::size_t> assignment(vnfs, 0);
  std::vector<double> cpu(servers), load(network.link_count());
  std::vector<unsigned> count(servers);
  std::vector<ArcFlow> flows;
  for (std::uint64_t c = 0; c < candidates; ++c) {
    ++best.stats.branch_nodes;
    if (c > 0) {
      for (std::size_t i = 0; i < vnfs; ++i) {
        if (++assignment[i] < servers) break;
        assignment[i] = 0;
      }
    }
    std::fill(cpu.begin(), cpu.end(), 0.0);
    std::fill(count.begin(), count.end(), 0u);
    bool ok = true;
    double objective = 0.0;
    for (std::size_t i = 0; i < vnfs && ok; ++i) {
      const auto u = assignment[i];
      ok = request.compatible(i, u) && ++count[u] <= request.isolation_degree;
      cpu[u] += request.vnfs[i].cpu_demand;
      const auto& server = network.server(u);
      objective += (1.0 - server.cpu_residual / server.cpu_max) * request.vnfs[i].cpu_demand;
    }
    for (std::size_t u = 0; u < servers && ok; ++u) {
      const double residual = network.server(u).cpu_residual;
      ok = cpu[u] <= residual + kSlack * (1.0 + residual);
    }
    if (!ok) continue;

    std::fill(load.begin(), load.end(), 0.0);
    flows.clear();
    double delay = processing;
    for (std::size_t k = 0; k < request.vlinks.size() && ok; ++k) {
      const auto& vlink = request.vlinks[k];
      std::size_t from = network.server(assignment[vlink.from]).node.value;
      const std::size_t to = network.server(assignment[vlink.to]).node.value;
      if (from == to) continue;
      if (!std::isfinite(dist[from * nodes + to])) {
        ok = false;
        break;
      }
      delay += dist[from * nodes + to];
      objective += vlink.bw_demand * dist[from * nodes + to];
      while (from != to) {
        const std::size_t hop = next[from * nodes + to];
        const auto l = static_cast<std::size_t>(via[from * nodes + hop]);
        load[l] += vlink.bw_demand;
        const bool forward = network.links()[l].a.value == from;
        flows.push_back(ArcFlow{k, LinkId{static_cast<std::uint32_t>(l)}, forward, vlink.bw_demand});
        from = hop;
      }
    }
    for (std::size_t l = 0; l < load.size() && ok; ++l) {
      const double residual = network.links()[l].bw_residual;
      ok = load[l] <= residual + kSlack * (1.0 + residual);
    }
    if (!ok || delay > request.delay_budget + kSlack * (1.0 + request.delay_budget)) continue;
    if (objective < best.objective) {
      best.objective = objective;
      best.status = SolveStatus::kOptimal;
      best.assignment = assignment;
      best.flows = flows;
    }
  }
  if (!best.optimal()) best.objective = 0.0;
  best.stats.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return best;
}

MilpSolution brute_force_solve(const SubstrateNetwork& network, const SliceRequest& request) {
  const auto delays = link_delays(network);
  return brute_force_solve(network, request, delays);
}

}  // namespace slice_embed
