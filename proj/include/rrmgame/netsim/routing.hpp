#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "rrmgame/netsim/topology.hpp"
#include "rrmgame/rng.hpp"

namespace rrmgame::netsim {

/// Loop-free host-to-host path as an ordered list of link ids.
struct Route {
  NodeId src = 0;
  NodeId dst = 0;
  std::vector<LinkId> links;

  std::size_t hops() const { return links.size(); }
  /// src, every intermediate switch, dst.
  std::vector<NodeId> nodes(const Topology& t) const;

  friend bool operator==(const Route&, const Route&) = default;
};

/// Order used for candidate ranking: hop count, then link ids lexicographically.
std::strong_ordering compare_routes(const Route& a, const Route& b);

/// Throws ConfigError if consecutive links don't share a node, the path
/// revisits a node, transits a host, or its endpoints are not src/dst.
void check_route(const Topology& t, const Route& r);

/// Up to k loop-free paths from src to dst, in (hop count, link-id sequence)
/// order. Only switches may be transited. Throws RoutingError if src == dst,
/// either endpoint is not a host, or dst is unreachable.
std::vector<Route> k_shortest_paths(const Topology& t, NodeId src, NodeId dst, std::size_t k);

using HostPair = std::pair<NodeId, NodeId>;

enum class MutationMode { OptimalSizeOnly, AnySize };

/// Installed route per ordered host pair plus the per-switch flow-table
/// update windows.
class RoutingState {
 public:
  explicit RoutingState(const Topology& t);

  const Route& route(NodeId src, NodeId dst) const;
  const Route* find(NodeId src, NodeId dst) const;
  bool has_route(NodeId src, NodeId dst) const { return find(src, dst) != nullptr; }
  void install(Route r);

  const std::map<HostPair, Route>& routes() const { return routes_; }

  SimTime busy_until(NodeId sw) const { return busy_until_.at(sw); }
  bool busy(NodeId sw, SimTime now) const { return busy_until_.at(sw) > now; }
  void mark_busy(NodeId sw, SimTime until);

  /// Candidate routes for a pair, cached per k.
  const std::vector<Route>& candidates(NodeId src, NodeId dst, std::size_t k);

  std::uint64_t route_version() const { return version_; }

 private:
  const Topology* topo_;
  std::map<HostPair, Route> routes_;
  std::vector<SimTime> busy_until_;
  std::map<std::pair<HostPair, std::size_t>, std::vector<Route>> cache_;
  std::uint64_t version_ = 0;
};

/// Shortest route (first of k_shortest_paths with k = 1) for every pair.
RoutingState install_initial_routes(const Topology& t, std::span<const HostPair> pairs);

struct MutationResult {
  std::vector<NodeId> affected_switches;  // sorted, unique
  std::size_t changed_pairs = 0;
};

/// Switches whose forwarding entry for this pair differs between two routes
/// (added, removed or pointing at another link).
std::vector<NodeId> switches_with_changed_entries(const Topology& t, const Route& before,
                                                  const Route& after);

/// Redraws every installed route uniformly from the pair's k-shortest
/// candidates (only minimum-hop ones in OptimalSizeOnly mode). Each switch
/// whose entries change is busy until now + update_duration. Pairs are
/// visited in (src, dst) order so the draw sequence is reproducible.
/// Requires k >= 2.
MutationResult mutate_routes(RoutingState& state, const Topology& t, Rng& rng, MutationMode mode,
                             std::size_t k, SimTime now, SimTime update_duration);

}  // namespace rrmgame::netsim
