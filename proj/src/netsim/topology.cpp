#include "rrmgame/netsim/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "rrmgame/error.hpp"

namespace rrmgame::netsim {

std::string_view to_string(NodeRole r) {
  switch (r) {
    case NodeRole::Switch: return "switch";
    case NodeRole::ClientHost: return "client";
    case NodeRole::BotHost: return "bot";
    case NodeRole::DecoyServer: return "decoy";
    case NodeRole::TargetServer: return "target";
  }
  return "?";
}

NodeRole parse_role(std::string_view s) {
  if (s == "switch") return NodeRole::Switch;
  if (s == "client") return NodeRole::ClientHost;
  if (s == "bot") return NodeRole::BotHost;
  if (s == "decoy") return NodeRole::DecoyServer;
  if (s == "target") return NodeRole::TargetServer;
  throw ConfigError("unknown node role '" + std::string(s) + "'");
}

NodeId Topology::add_node(std::string name, NodeRole role) {
  if (by_name_.contains(name)) throw ConfigError("duplicate node '" + name + "'");
  const auto id = static_cast<NodeId>(nodes_.size());
  by_name_.emplace(name, id);
  nodes_.push_back({id, std::move(name), role});
  adj_.emplace_back();
  return id;
}

LinkId Topology::add_link(NodeId a, NodeId b, double capacity_bps, SimTime prop_delay_us,
                          std::uint32_t queue_pkts) {
  if (a >= nodes_.size() || b >= nodes_.size()) throw ConfigError("link endpoint out of range");
  if (a == b) throw ConfigError("self-loop on node '" + nodes_[a].name + "'");
  const auto id = static_cast<LinkId>(links_.size());
  links_.push_back({id, a, b, capacity_bps, prop_delay_us, queue_pkts});
  adj_[a].emplace_back(id, b);
  adj_[b].emplace_back(id, a);
  return id;
}

const Node& Topology::node(NodeId id) const {
  if (id >= nodes_.size()) throw LookupError("unknown node id " + std::to_string(id));
  return nodes_[id];
}

const Link& Topology::link(LinkId id) const {
  if (id >= links_.size()) throw LookupError("unknown link id " + std::to_string(id));
  return links_[id];
}

NodeId Topology::node_by_name(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) throw LookupError("unknown node '" + std::string(name) + "'");
  return it->second;
}

std::vector<NodeId> Topology::nodes_with_role(NodeRole r) const {
  std::vector<NodeId> out;
  for (const auto& n : nodes_)
    if (n.role == r) out.push_back(n.id);
  return out;
}

NodeId Topology::target() const {
  auto t = nodes_with_role(NodeRole::TargetServer);
  if (t.size() != 1) throw ConfigError("topology needs exactly one target server");
  return t.front();
}

NodeId Topology::attach_switch(NodeId host) const {
  const auto& adj = adj_.at(host);
  if (!is_host(nodes_.at(host).role) || adj.size() != 1) {
    throw LookupError("'" + nodes_.at(host).name + "' is not an attached host");
  }
  return adj.front().second;
}

bool Topology::is_access_link(LinkId l) const {
  const auto& lk = link(l);
  return is_host(nodes_[lk.a].role) || is_host(nodes_[lk.b].role);
}

std::size_t Topology::switch_count() const {
  return static_cast<std::size_t>(std::count_if(
      nodes_.begin(), nodes_.end(), [](const Node& n) { return n.role == NodeRole::Switch; }));
}

void Topology::validate() const {
  validate_graph();
  std::size_t targets = 0, decoys = 0;
  for (const auto& n : nodes_) {
    if (n.role == NodeRole::TargetServer) ++targets;
    if (n.role == NodeRole::DecoyServer) ++decoys;
  }
  if (targets != 1) throw ConfigError("topology needs exactly one target server");
  if (decoys == 0) throw ConfigError("topology needs at least one decoy server");
}

void Topology::validate_graph() const {
  if (nodes_.empty()) throw ConfigError("empty topology");
  for (const auto& n : nodes_) {
    if (is_host(n.role)) {
      if (adj_[n.id].size() != 1) {
        throw ConfigError("host '" + n.name + "' must have exactly one link");
      }
      if (!is_switch(adj_[n.id].front().second)) {
        throw ConfigError("host '" + n.name + "' must attach to a switch");
      }
    }
  }
  for (const auto& l : links_) {
    if (!(l.capacity_bps > 0.0) || !std::isfinite(l.capacity_bps)) {
      throw ConfigError(fmt::format("link {} has non-positive capacity", l.id));
    }
    if (l.prop_delay_us <= 0) throw ConfigError(fmt::format("link {} has non-positive delay", l.id));
    if (l.queue_pkts == 0) throw ConfigError(fmt::format("link {} has zero queue", l.id));
  }
  std::vector<char> seen(nodes_.size(), 0);
  std::vector<NodeId> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const NodeId u = stack.back();
    stack.pop_back();
    for (const auto& [l, v] : adj_[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        stack.push_back(v);
      }
    }
  }
  if (reached != nodes_.size()) {
    for (const auto& n : nodes_)
      if (!seen[n.id]) throw ConfigError("topology is disconnected at '" + n.name + "'");
  }
}

Topology Topology::builtin_mesh(const BuiltinTopologyParams& params) {
  const auto& d = params.links;
  Topology t;
  auto link = [&](NodeId a, NodeId b) { t.add_link(a, b, d.capacity_bps, d.prop_delay_us, d.queue_pkts); };

  constexpr int kEdge = 8, kAgg = 5, kGate = 3, kDecoy = 3;
  std::vector<NodeId> edge, agg, gate, decoy_sw;
  for (int i = 0; i < kEdge; ++i) edge.push_back(t.add_node(fmt::format("e{}", i), NodeRole::Switch));
  for (int i = 0; i < kAgg; ++i) agg.push_back(t.add_node(fmt::format("a{}", i), NodeRole::Switch));
  for (int i = 0; i < kGate; ++i) gate.push_back(t.add_node(fmt::format("k{}", i), NodeRole::Switch));
  const NodeId tz = t.add_node("tz", NodeRole::Switch);
  for (int i = 0; i < kDecoy; ++i) decoy_sw.push_back(t.add_node(fmt::format("d{}", i), NodeRole::Switch));

  for (int j = 0; j < kEdge; ++j) {
    link(edge[j], agg[j % kAgg]);
    link(edge[j], agg[(j + 1) % kAgg]);
  }
  for (int i = 0; i < kAgg; ++i)
    for (int g = 0; g < kGate; ++g) link(agg[i], gate[g]);
  for (int i = 0; i < kAgg; ++i) link(agg[i], agg[(i + 1) % kAgg]);
  for (int g = 0; g < kGate; ++g) link(gate[g], tz);
  for (int i = 0; i < kDecoy; ++i) link(tz, decoy_sw[i]);

  const NodeId target = t.add_node("target", NodeRole::TargetServer);
  link(target, tz);
  for (int i = 0; i < kDecoy; ++i) {
    const NodeId s = t.add_node(fmt::format("decoy{}", i), NodeRole::DecoyServer);
    link(s, decoy_sw[i]);
  }
  for (std::uint32_t i = 0; i < params.n_clients; ++i) {
    const NodeId h = t.add_node(fmt::format("c{}", i), NodeRole::ClientHost);
    link(h, edge[i % kEdge]);
  }
  for (std::uint32_t i = 0; i < params.n_bots; ++i) {
    const NodeId h = t.add_node(fmt::format("b{}", i), NodeRole::BotHost);
    link(h, edge[i % kEdge]);
  }
  t.validate();
  return t;
}

namespace {

std::string strip(std::string line) {
  if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  line.erase(line.begin(), std::find_if(line.begin(), line.end(), not_space));
  line.erase(std::find_if(line.rbegin(), line.rend(), not_space).base(), line.end());
  return line;
}

}  // namespace

Topology Topology::parse(std::istream& in, bool require_servers) {
  Topology t;
  enum class Section { None, Nodes, Links } section = Section::None;
  std::vector<std::pair<NodeId, std::string>> declared_attach;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = strip(raw);
    if (line.empty()) continue;
    if (line == "[nodes]") {
      section = Section::Nodes;
      continue;
    }
    if (line == "[links]") {
      section = Section::Links;
      continue;
    }
    std::istringstream fields(line);
    std::vector<std::string> tok;
    for (std::string s; fields >> s;) tok.push_back(s);
    try {
      if (section == Section::Nodes) {
        if (tok.size() < 2 || tok.size() > 3) throw ConfigError("expected: id role [attach_switch]");
        const NodeId id = t.add_node(tok[0], parse_role(tok[1]));
        if (tok.size() == 3) declared_attach.emplace_back(id, tok[2]);
      } else if (section == Section::Links) {
        if (tok.size() != 5) throw ConfigError("expected: a b capacity_bps prop_delay_us queue_pkts");
        const double cap = std::stod(tok[2]);
        const auto delay = static_cast<SimTime>(std::stoll(tok[3]));
        const auto queue = std::stoll(tok[4]);
        if (queue < 0) throw ConfigError("negative queue size");
        t.add_link(t.node_by_name(tok[0]), t.node_by_name(tok[1]), cap, delay,
                   static_cast<std::uint32_t>(queue));
      } else {
        throw ConfigError("content outside a [nodes] or [links] section");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::invalid_argument&) {
      throw ParseError(lineno, "malformed number");
    } catch (const std::out_of_range&) {
      throw ParseError(lineno, "number out of range");
    } catch (const Error& e) {
      throw ParseError(lineno, e.what());
    }
  }
  for (const auto& [host, sw] : declared_attach) {
    const NodeId expected = t.node_by_name(sw);
    const auto& adj = t.adjacent(host);
    if (adj.size() != 1 || adj.front().second != expected) {
      throw ConfigError("host '" + t.node(host).name + "' is not linked to its attach switch '" +
                        sw + "'");
    }
  }
  if (require_servers) {
    t.validate();
  } else {
    t.validate_graph();
  }
  return t;
}

Topology Topology::load(const std::string& path, bool require_servers) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open topology file '" + path + "'");
  return parse(in, require_servers);
}

void Topology::write(std::ostream& out) const {
  out << "[nodes]\n";
  for (const auto& n : nodes_) {
    out << n.name << ' ' << to_string(n.role);
    if (is_host(n.role) && adj_[n.id].size() == 1) out << ' ' << nodes_[adj_[n.id][0].second].name;
    out << '\n';
  }
  out << "[links]\n";
  for (const auto& l : links_) {
    out << fmt::format("{} {} {} {} {}\n", nodes_[l.a].name, nodes_[l.b].name, l.capacity_bps,
                       l.prop_delay_us, l.queue_pkts);
  }
}

}  // namespace rrmgame::netsim
