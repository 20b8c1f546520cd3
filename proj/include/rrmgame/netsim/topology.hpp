#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace rrmgame::netsim {

using NodeId = std::uint32_t;
using LinkId = std::uint32_t;
/// Simulation time in integer microseconds.
using SimTime = std::int64_t;

inline constexpr SimTime kMicrosPerSecond = 1'000'000;

inline SimTime seconds(double s) { return static_cast<SimTime>(s * 1e6); }
inline double to_seconds(SimTime t) { return static_cast<double>(t) / 1e6; }

enum class NodeRole { Switch, ClientHost, BotHost, DecoyServer, TargetServer };

std::string_view to_string(NodeRole r);
NodeRole parse_role(std::string_view s);

inline bool is_host(NodeRole r) { return r != NodeRole::Switch; }

struct Node {
  NodeId id = 0;
  std::string name;
  NodeRole role = NodeRole::Switch;
};

/// Undirected, full-duplex link; each direction has its own queue.
struct Link {
  LinkId id = 0;
  NodeId a = 0;
  NodeId b = 0;
  double capacity_bps = 0.0;
  SimTime prop_delay_us = 0;
  std::uint32_t queue_pkts = 0;

  NodeId other(NodeId n) const { return n == a ? b : a; }
  bool touches(NodeId n) const { return n == a || n == b; }
};

struct LinkDefaults {
  double capacity_bps = 10e6;
  SimTime prop_delay_us = 100;
  std::uint32_t queue_pkts = 100;
};

/// Parameters of the builtin 20-switch generator.
///
/// Layout (switch indices in creation order):
///   e0..e7   edge switches; clients and bots attach round-robin
///   a0..a4   aggregation; e_j uplinks to a_(j mod 5) then a_(j+1 mod 5),
///            plus a ring a_i -- a_(i+1 mod 5)
///   k0..k2   gateways; every a_i links to every k_j
///   tz       target switch; k0, k1, k2 each link to tz (the 3-link cut)
///   d0..d2   decoy switches hanging off tz, one decoy server each
///
/// Every client-to-target and bot-to-decoy path therefore crosses exactly
/// one of the three k_j -- tz links.
struct BuiltinTopologyParams {
  std::uint32_t n_clients = 8;
  std::uint32_t n_bots = 0;
  LinkDefaults links;
};

class Topology {
 public:
  Topology() = default;

  NodeId add_node(std::string name, NodeRole role);
  LinkId add_link(NodeId a, NodeId b, double capacity_bps, SimTime prop_delay_us,
                  std::uint32_t queue_pkts);

  /// Throws ConfigError unless the graph is connected, every host has exactly
  /// one link and it goes to a switch, and all capacities/delays/queues are
  /// positive.
  void validate_graph() const;

  /// validate_graph() plus exactly one target server and at least one decoy.
  void validate() const;

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }
  const Node& node(NodeId id) const;
  const Link& link(LinkId id) const;
  NodeId node_by_name(std::string_view name) const;

  /// (link, neighbour) pairs in increasing link-id order.
  const std::vector<std::pair<LinkId, NodeId>>& adjacent(NodeId n) const { return adj_.at(n); }

  std::vector<NodeId> nodes_with_role(NodeRole r) const;
  NodeId target() const;
  /// The switch a host hangs off.
  NodeId attach_switch(NodeId host) const;
  bool is_switch(NodeId n) const { return nodes_.at(n).role == NodeRole::Switch; }
  bool is_access_link(LinkId l) const;

  std::size_t switch_count() const;

  /// Deterministic 20-switch generator, see BuiltinTopologyParams.
  static Topology builtin_mesh(const BuiltinTopologyParams& params);

  /// Line-oriented text format:
  ///   [nodes]   id role [attach_switch]
  ///   [links]   a b capacity_bps prop_delay_us queue_pkts
  /// Roles: switch, client, bot, decoy, target. '#' starts a comment. Hosts
  /// need exactly one link; when attach_switch is given it must match.
  static Topology parse(std::istream& in, bool require_servers = true);
  static Topology load(const std::string& path, bool require_servers = true);
  void write(std::ostream& out) const;

 private:
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::vector<std::vector<std::pair<LinkId, NodeId>>> adj_;
  std::unordered_map<std::string, NodeId> by_name_;
};

}  // namespace rrmgame::netsim
