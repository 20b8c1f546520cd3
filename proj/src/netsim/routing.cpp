#include "rrmgame/netsim/routing.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <set>

#include <fmt/format.h>

#include "rrmgame/error.hpp"

namespace rrmgame::netsim {

std::vector<NodeId> Route::nodes(const Topology& t) const {
  std::vector<NodeId> out{src};
  NodeId at = src;
  for (LinkId l : links) {
    at = t.link(l).other(at);
    out.push_back(at);
  }
  return out;
}

std::strong_ordering compare_routes(const Route& a, const Route& b) {
  if (auto c = a.links.size() <=> b.links.size(); c != 0) return c;
  return std::lexicographical_compare_three_way(a.links.begin(), a.links.end(), b.links.begin(),
                                                b.links.end());
}

void check_route(const Topology& t, const Route& r) {
  if (r.links.empty()) throw ConfigError("empty route");
  std::set<NodeId> seen{r.src};
  NodeId at = r.src;
  for (std::size_t i = 0; i < r.links.size(); ++i) {
    const Link& l = t.link(r.links[i]);
    if (!l.touches(at)) {
      throw ConfigError(fmt::format("route link {} does not continue from node {}", l.id, at));
    }
    at = l.other(at);
    if (!seen.insert(at).second) throw ConfigError("route revisits a node");
    if (i + 1 < r.links.size() && !t.is_switch(at)) throw ConfigError("route transits a host");
  }
  if (at != r.dst) throw ConfigError("route does not end at its destination");
}

namespace {

struct RouteLess {
  bool operator()(const Route& a, const Route& b) const { return compare_routes(a, b) < 0; }
};

constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();

// Lex-min shortest path from `from` to `dst`, transiting switches only and
// avoiding blocked nodes and removed links.
std::optional<std::vector<LinkId>> spur_path(const Topology& t, NodeId from, NodeId dst,
                                             const std::vector<char>& blocked,
                                             const std::set<LinkId>& removed) {
  const std::size_t n = t.nodes().size();
  std::vector<std::size_t> dist(n, kUnreached);
  std::deque<NodeId> queue{dst};
  dist[dst] = 0;
  while (!queue.empty()) {
    const NodeId v = queue.front();
    queue.pop_front();
    if (v != dst && !t.is_switch(v)) continue;
    for (const auto& [l, u] : t.adjacent(v)) {
      if (blocked[u] || removed.contains(l) || dist[u] != kUnreached) continue;
      dist[u] = dist[v] + 1;
      queue.push_back(u);
    }
  }
  if (dist[from] == kUnreached) return std::nullopt;

  std::vector<LinkId> path;
  NodeId at = from;
  while (at != dst) {
    bool stepped = false;
    for (const auto& [l, u] : t.adjacent(at)) {
      if (blocked[u] || removed.contains(l)) continue;
      if (dist[u] + 1 != dist[at]) continue;
      if (u != dst && !t.is_switch(u)) continue;
      path.push_back(l);
      at = u;
      stepped = true;
      break;
    }
    if (!stepped) return std::nullopt;
  }
  return path;
}

}  // namespace

std::vector<Route> k_shortest_paths(const Topology& t, NodeId src, NodeId dst, std::size_t k) {
  if (src == dst) throw RoutingError("source and destination coincide");
  if (t.is_switch(src) || t.is_switch(dst)) throw RoutingError("route endpoints must be hosts");
  std::vector<Route> found;
  if (k == 0) return found;

  std::vector<char> none(t.nodes().size(), 0);
  auto first = spur_path(t, src, dst, none, {});
  if (!first) {
    throw RoutingError(fmt::format("no route from '{}' to '{}'", t.node(src).name, t.node(dst).name));
  }
  found.push_back({src, dst, std::move(*first)});

  std::set<Route, RouteLess> pending;
  while (found.size() < k) {
    const Route& prev = found.back();
    const auto prev_nodes = prev.nodes(t);
    for (std::size_t i = 0; i < prev.links.size(); ++i) {
      const NodeId spur = prev_nodes[i];
      if (i > 0 && !t.is_switch(spur)) continue;
      std::set<LinkId> removed;
      for (const auto& r : found) {
        if (r.links.size() > i && std::equal(prev.links.begin(), prev.links.begin() + i, r.links.begin())) {
          removed.insert(r.links[i]);
        }
      }
      std::vector<char> blocked(t.nodes().size(), 0);
      for (std::size_t j = 0; j < i; ++j) blocked[prev_nodes[j]] = 1;
      auto tail = spur_path(t, spur, dst, blocked, removed);
      if (!tail) continue;
      Route cand{src, dst, {prev.links.begin(), prev.links.begin() + i}};
      cand.links.insert(cand.links.end(), tail->begin(), tail->end());
      if (std::find(found.begin(), found.end(), cand) == found.end()) pending.insert(std::move(cand));
    }
    if (pending.empty()) break;
    found.push_back(*pending.begin());
    pending.erase(pending.begin());
  }
  return found;
}

RoutingState::RoutingState(const Topology& t) : topo_(&t), busy_until_(t.nodes().size(), 0) {}

const Route* RoutingState::find(NodeId src, NodeId dst) const {
  auto it = routes_.find({src, dst});
  return it == routes_.end() ? nullptr : &it->second;
}

const Route& RoutingState::route(NodeId src, NodeId dst) const {
  if (const Route* r = find(src, dst)) return *r;
  throw RoutingError(fmt::format("no route installed from '{}' to '{}'", topo_->node(src).name,
                                 topo_->node(dst).name));
}

void RoutingState::install(Route r) {
  check_route(*topo_, r);
  const HostPair key{r.src, r.dst};
  routes_.insert_or_assign(key, std::move(r));
  ++version_;
}

void RoutingState::mark_busy(NodeId sw, SimTime until) {
  auto& b = busy_until_.at(sw);
  b = std::max(b, until);
}

const std::vector<Route>& RoutingState::candidates(NodeId src, NodeId dst, std::size_t k) {
  const auto key = std::make_pair(HostPair{src, dst}, k);
  auto it = cache_.find(key);
  if (it == cache_.end()) it = cache_.emplace(key, k_shortest_paths(*topo_, src, dst, k)).first;
  return it->second;
}

RoutingState install_initial_routes(const Topology& t, std::span<const HostPair> pairs) {
  RoutingState state(t);
  for (const auto& [s, d] : pairs) {
    if (state.has_route(s, d)) continue;
    state.install(state.candidates(s, d, 1).front());
  }
  return state;
}

std::vector<NodeId> switches_with_changed_entries(const Topology& t, const Route& before,
                                                  const Route& after) {
  auto entries = [&](const Route& r) {
    std::map<NodeId, LinkId> out;
    const auto nodes = r.nodes(t);
    for (std::size_t j = 1; j + 1 < nodes.size(); ++j) out.emplace(nodes[j], r.links[j]);
    return out;
  };
  const auto a = entries(before);
  const auto b = entries(after);
  std::vector<NodeId> changed;
  for (const auto& [sw, l] : a) {
    auto it = b.find(sw);
    if (it == b.end() || it->second != l) changed.push_back(sw);
  }
  for (const auto& [sw, l] : b)
    if (!a.contains(sw)) changed.push_back(sw);
  std::sort(changed.begin(), changed.end());
  return changed;
}

MutationResult mutate_routes(RoutingState& state, const Topology& t, Rng& rng, MutationMode mode,
                             std::size_t k, SimTime now, SimTime update_duration) {
  if (k < 2) throw ConfigError("route mutation needs k >= 2 candidates");
  MutationResult result;
  std::set<NodeId> affected;
  std::vector<HostPair> pairs;
  for (const auto& [key, r] : state.routes()) pairs.push_back(key);
  for (const auto& [s, d] : pairs) {
    const auto& all = state.candidates(s, d, k);
    std::size_t n = all.size();
    if (mode == MutationMode::OptimalSizeOnly) {
      const std::size_t min_hops = all.front().hops();
      n = static_cast<std::size_t>(std::count_if(
          all.begin(), all.end(), [&](const Route& r) { return r.hops() == min_hops; }));
    }
    if (n < 2) continue;
    const Route& pick = all[rng.below(n)];
    const auto changed = switches_with_changed_entries(t, state.route(s, d), pick);
    if (changed.empty()) continue;
    ++result.changed_pairs;
    affected.insert(changed.begin(), changed.end());
    state.install(pick);
  }
  for (NodeId sw : affected) state.mark_busy(sw, now + update_duration);
  result.affected_switches.assign(affected.begin(), affected.end());
  return result;
}

}  // namespace rrmgame::netsim
