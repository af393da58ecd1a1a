#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace slice_embed {

enum class NodeKind : std::uint8_t {
  kServer,
  kEdgeSwitch,
  kAggregationSwitch,
  kDatacenterSwitch,
};

std::string_view to_string(NodeKind kind);

struct NodeId {
  std::uint32_t value = 0;
  friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

struct LinkId {
  std::uint32_t value = 0;
  friend auto operator<=>(const LinkId&, const LinkId&) = default;
};

struct Node {
  std::string name;
  NodeKind kind = NodeKind::kServer;
};

/// A compute host. Capacities are in GHz.
struct Server {
  NodeId node;
  double cpu_max = 0.0;
  double cpu_residual = 0.0;
};

/// Undirected link; both directions draw on the same residual (Mbps).
struct Link {
  NodeId a;
  NodeId b;
  double bw_max = 0.0;
  double bw_residual = 0.0;
  double delay_init = 0.0;  // ms

  NodeId other(NodeId end) const { return end == a ? b : a; }
};

struct Adjacency {
  NodeId neighbor;
  LinkId link;
};

/// Physical datacenter: servers, switches and capacitated links with their
/// residual state. A value type; the admission loop is the single writer.
class SubstrateNetwork {
 public:
  NodeId add_server(std::string name, double cpu_max);
  NodeId add_switch(std::string name, NodeKind kind);
  LinkId add_link(NodeId a, NodeId b, double bw_max, double delay_init);

  /// Throws ConfigurationError unless the graph is connected and every server
  /// has at least one link.
  void validate() const;
  bool is_connected() const;

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t server_count() const { return servers_.size(); }
  std::size_t link_count() const { return links_.size(); }

  std::span<const Node> nodes() const { return nodes_; }
  std::span<const Server> servers() const { return servers_; }
  std::span<const Link> links() const { return links_; }

  const Node& node(NodeId id) const { return nodes_.at(id.value); }
  const Link& link(LinkId id) const { return links_.at(id.value); }
  const Server& server(std::size_t index) const { return servers_.at(index); }
  std::span<const Adjacency> neighbors(NodeId id) const { return adjacency_.at(id.value); }

  std::optional<LinkId> find_link(NodeId a, NodeId b) const;
  /// Position of `id` among servers, or nullopt for switches.
  std::optional<std::size_t> server_index(NodeId id) const;
  std::optional<NodeId> find_node(std::string_view name) const;

  /// Residual setters enforce 0 <= residual <= max.
  void set_server_residual(std::size_t index, double cpu_residual);
  void set_link_residual(LinkId id, double bw_residual);

 private:
  std::vector<Node> nodes_;
  std::vector<Server> servers_;
  std::vector<Link> links_;
  std::vector<std::vector<Adjacency>> adjacency_;
  std::vector<std::int64_t> server_of_node_;
  std::map<std::pair<std::uint32_t, std::uint32_t>, LinkId> link_index_;
};

struct TopologyConfig {
  std::size_t server_count = 200;
  std::size_t servers_per_edge_switch = 20;
  std::size_t edge_switch_count = 10;
  std::size_t aggregation_switch_count = 4;
  std::size_t datacenter_switch_count = 2;
  double server_cpu_ghz = 12.0;
  double server_edge_bw = 250.0;   // Mbps
  double edge_agg_bw = 2500.0;     // Mbps
  double agg_dc_bw = 10000.0;      // Mbps
  double server_edge_delay = 0.1;  // ms
  double edge_agg_delay = 0.1;     // ms
  double agg_dc_delay = 0.1;       // ms

  void validate() const;
};

/// Three-tier tree: servers -> edge -> aggregation -> datacenter switches.
/// Edge switch e uplinks to aggregation switches 2e and 2e+1 (mod count);
/// every aggregation switch uplinks to every datacenter switch. Node names
/// follow S1.., E1.., A1.., DC1...
SubstrateNetwork build_fat_tree(const TopologyConfig& config);

/// Utilization-dependent delay: (1 - residual/max) * 2.5 ms + initial delay.
double link_delay(const Link& link);
std::vector<double> link_delays(const SubstrateNetwork& network);

struct Utilization {
  double cpu_pct = 0.0;
  double bw_pct = 0.0;
};

Utilization utilization(const SubstrateNetwork& network);

/// One line per link: `nodeA nodeB bw_max bw_residual delay_init`.
void write_edge_list(std::ostream& out, const SubstrateNetwork& network);

}  // namespace slice_embed
