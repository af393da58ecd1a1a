#include "slice_embed/substrate.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <queue>

#include "slice_embed/errors.hpp"
#include "slice_embed/text.hpp"

namespace slice_embed {

namespace {

constexpr double kMaxUtilizationDelay = 2.5;  // ms at full utilization

std::pair<std::uint32_t, std::uint32_t> ordered(NodeId a, NodeId b) {
  return a.value < b.value ? std::pair{a.value, b.value} : std::pair{b.value, a.value};
}

}  // namespace

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::kServer:
      return "server";
    case NodeKind::kEdgeSwitch:
      return "edge-switch";
    case NodeKind::kAggregationSwitch:
      return "aggregation-switch";
    case NodeKind::kDatacenterSwitch:
      return "datacenter-switch";
  }
  return "unknown";
}

NodeId SubstrateNetwork::add_server(std::string name, double cpu_max) {
  if (!(cpu_max > 0.0) || !std::isfinite(cpu_max)) {
    throw ConfigurationError("server " + name + " needs a positive CPU capacity");
  }
  const NodeId id{static_cast<std::uint32_t>(nodes_.size())};
  nodes_.push_back(Node{std::move(name), NodeKind::kServer});
  adjacency_.emplace_back();
  server_of_node_.push_back(static_cast<std::int64_t>(servers_.size()));
  servers_.push_back(Server{id, cpu_max, cpu_max});
  return id;
}

NodeId SubstrateNetwork::add_switch(std::string name, NodeKind kind) {
  if (kind == NodeKind::kServer) throw ConfigurationError("add_switch called with server kind");
  const NodeId id{static_cast<std::uint32_t>(nodes_.size())};
  nodes_.push_back(Node{std::move(name), kind});
  adjacency_.emplace_back();
  server_of_node_.push_back(-1);
  return id;
}

LinkId SubstrateNetwork::add_link(NodeId a, NodeId b, double bw_max, double delay_init) {
  if (a.value >= nodes_.size() || b.value >= nodes_.size()) {
    throw ConfigurationError("link endpoint does not exist");
  }
  if (a == b) throw ConfigurationError("link endpoints must be distinct: " + nodes_[a.value].name);
  if (!(bw_max > 0.0) || !std::isfinite(bw_max)) {
    throw ConfigurationError("link bandwidth must be positive");
  }
  if (!(delay_init >= 0.0) || !std::isfinite(delay_init)) {
    throw ConfigurationError("link initial delay must be non-negative");
  }
  const auto key = ordered(a, b);
  if (link_index_.contains(key)) {
    throw ConfigurationError("duplicate link " + nodes_[a.value].name + " - " + nodes_[b.value].name);
  }
  const LinkId id{static_cast<std::uint32_t>(links_.size())};
  links_.push_back(Link{a, b, bw_max, bw_max, delay_init});
  link_index_.emplace(key, id);
  adjacency_[a.value].push_back(Adjacency{b, id});
  adjacency_[b.value].push_back(Adjacency{a, id});
  return id;
}

bool SubstrateNetwork::is_connected() const {
  if (nodes_.empty()) return true;
  std::vector<bool> seen(nodes_.size(), false);
  std::queue<std::uint32_t> frontier;
  frontier.push(0);
  seen[0] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const auto current = frontier.front();
    frontier.pop();
    for (const auto& adj : adjacency_[current]) {
      if (!seen[adj.neighbor.value]) {
        seen[adj.neighbor.value] = true;
        ++reached;
        frontier.push(adj.neighbor.value);
      }
    }
  }
  return reached == nodes_.size();
}

void SubstrateNetwork::validate() const {
  for (const auto& server : servers_) {
    if (adjacency_[server.node.value].empty()) {
      throw ConfigurationError("server " + nodes_[server.node.value].name + " has no links");
    }
  }
  if (!is_connected()) throw ConfigurationError("substrate network is not connected");
}

std::optional<LinkId> SubstrateNetwork::find_link(NodeId a, NodeId b) const {
  const auto it = link_index_.find(ordered(a, b));
  if (it == link_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> SubstrateNetwork::server_index(NodeId id) const {
  if (id.value >= server_of_node_.size() || server_of_node_[id.value] < 0) return std::nullopt;
  return static_cast<std::size_t>(server_of_node_[id.value]);
}

std::optional<NodeId> SubstrateNetwork::find_node(std::string_view name) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].name == name) return NodeId{static_cast<std::uint32_t>(i)};
  }
  return std::nullopt;
}

void SubstrateNetwork::set_server_residual(std::size_t index, double cpu_residual) {
  auto& server = servers_.at(index);
  if (!(cpu_residual >= 0.0) || cpu_residual > server.cpu_max) {
    throw ConsistencyError("server residual out of [0, max] for " + nodes_[server.node.value].name);
  }
  server.cpu_residual = cpu_residual;
}

void SubstrateNetwork::set_link_residual(LinkId id, double bw_residual) {
  auto& link = links_.at(id.value);
  if (!(bw_residual >= 0.0) || bw_residual > link.bw_max) {
    throw ConsistencyError("link residual out of [0, max]");
  }
  link.bw_residual = bw_residual;
}

void TopologyConfig::validate() const {
  if (server_count == 0 || servers_per_edge_switch == 0 || edge_switch_count == 0 ||
      aggregation_switch_count == 0 || datacenter_switch_count == 0) {
    throw ConfigurationError("topology counts must all be positive");
  }
  if (server_count != servers_per_edge_switch * edge_switch_count) {
    throw ConfigurationError("server_count (" + std::to_string(server_count) +
                             ") must equal servers_per_edge_switch x edge_switch_count (" +
                             std::to_string(servers_per_edge_switch * edge_switch_count) + ")");
  }
  for (double capacity : {server_cpu_ghz, server_edge_bw, edge_agg_bw, agg_dc_bw}) {
    if (!(capacity > 0.0) || !std::isfinite(capacity)) {
      throw ConfigurationError("topology capacities must be positive");
    }
  }
  for (double delay : {server_edge_delay, edge_agg_delay, agg_dc_delay}) {
    if (!(delay >= 0.0) || !std::isfinite(delay)) {
      throw ConfigurationError("topology link delays must be non-negative");
    }
  }
}

SubstrateNetwork build_fat_tree(const TopologyConfig& config) {
  config.validate();
  SubstrateNetwork network;
  std::vector<NodeId> servers, edges, aggs, dcs;
  for (std::size_t s = 0; s < config.server_count; ++s) {
    servers.push_back(network.add_server("S" + std::to_string(s + 1), config.server_cpu_ghz));
  }
  for (std::size_t e = 0; e < config.edge_switch_count; ++e) {
    edges.push_back(network.add_switch("E" + std::to_string(e + 1), NodeKind::kEdgeSwitch));
  }
  for (std::size_t a = 0; a < config.aggregation_switch_count; ++a) {
    aggs.push_back(network.add_switch("A" + std::to_string(a + 1), NodeKind::kAggregationSwitch));
  }
  for (std::size_t d = 0; d < config.datacenter_switch_count; ++d) {
    dcs.push_back(network.add_switch("DC" + std::to_string(d + 1), NodeKind::kDatacenterSwitch));
  }

  for (std::size_t s = 0; s < servers.size(); ++s) {
    network.add_link(servers[s], edges[s / config.servers_per_edge_switch], config.server_edge_bw,
                     config.server_edge_delay);
  }
  const std::size_t agg_count = aggs.size();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const std::size_t first = (2 * e) % agg_count;
    const std::size_t second = (2 * e + 1) % agg_count;
    network.add_link(edges[e], aggs[first], config.edge_agg_bw, config.edge_agg_delay);
    if (second != first) {
      network.add_link(edges[e], aggs[second], config.edge_agg_bw, config.edge_agg_delay);
    }
  }
  for (const auto agg : aggs) {
    for (const auto dc : dcs) network.add_link(agg, dc, config.agg_dc_bw, config.agg_dc_delay);
  }
  network.validate();
  return network;
}

double link_delay(const Link& link) {
  return (1.0 - link.bw_residual / link.bw_max) * kMaxUtilizationDelay + link.delay_init;
}

std::vector<double> link_delays(const SubstrateNetwork& network) {
  std::vector<double> delays;
  delays.reserve(network.link_count());
  for (const auto& link : network.links()) delays.push_back(link_delay(link));
  return delays;
}

Utilization utilization(const SubstrateNetwork& network) {
  double cpu_used = 0.0, cpu_total = 0.0, bw_used = 0.0, bw_total = 0.0;
  for (const auto& server : network.servers()) {
    cpu_used += server.cpu_max - server.cpu_residual;
    cpu_total += server.cpu_max;
  }
  for (const auto& link : network.links()) {
    bw_used += link.bw_max - link.bw_residual;
    bw_total += link.bw_max;
  }
  Utilization result;
  if (cpu_total > 0.0) result.cpu_pct = 100.0 * cpu_used / cpu_total;
  if (bw_total > 0.0) result.bw_pct = 100.0 * bw_used / bw_total;
  return result;
}

void write_edge_list(std::ostream& out, const SubstrateNetwork& network) {
  for (const auto& link : network.links()) {
    out << network.node(link.a).name << ' ' << network.node(link.b).name << ' '
        << format_number(link.bw_max) << ' ' << format_number(link.bw_residual) << ' '
        << format_number(link.delay_init) << '\n';
  }
}

}  // namespace slice_embed
