#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <sstream>

#include "rrmgame/error.hpp"
#include "rrmgame/netsim/routing.hpp"
#include "rrmgame/netsim/simulator.hpp"
#include "rrmgame/netsim/topology.hpp"
#include "rrmgame/rng.hpp"

using namespace rrmgame;
using namespace rrmgame::netsim;

namespace {

LinkId link(Topology& t, NodeId a, NodeId b) { return t.add_link(a, b, 10e6, 100, 100); }

// Hosts A and C, switch B; links A-B (0), B-C (1), A-C (2).
struct Triangle {
  Topology t;
  NodeId a, b, c;
  Triangle() {
    a = t.add_node("A", NodeRole::ClientHost);
    b = t.add_node("B", NodeRole::Switch);
    c = t.add_node("C", NodeRole::TargetServer);
    link(t, a, b);
    link(t, b, c);
    link(t, a, c);
  }
};

// Every simple path whose interior nodes are switches, ranked like the
// routing module ranks candidates.
std::vector<std::vector<LinkId>> enumerate_paths(const Topology& t, NodeId src, NodeId dst) {
  std::vector<std::vector<LinkId>> out;
  std::vector<char> seen(t.nodes().size(), 0);
  std::vector<LinkId> path;
  std::function<void(NodeId)> dfs = [&](NodeId u) {
    if (u == dst) {
      out.push_back(path);
      return;
    }
    if (u != src && !t.is_switch(u)) return;
    seen[u] = 1;
    for (const auto& [l, v] : t.adjacent(u)) {
      if (seen[v]) continue;
      path.push_back(l);
      dfs(v);
      path.pop_back();
    }
    seen[u] = 0;
  };
  dfs(src);
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    return x.size() != y.size() ? x.size() < y.size() : x < y;
  });
  return out;
}

}  // namespace

TEST(Topology, BuiltinShape) {
  const auto t = Topology::builtin_mesh({8, 0, {}});
  EXPECT_NO_THROW(t.validate());
  EXPECT_EQ(t.switch_count(), 20u);
  EXPECT_EQ(t.nodes_with_role(NodeRole::DecoyServer).size(), 3u);
  EXPECT_EQ(t.nodes_with_role(NodeRole::TargetServer).size(), 1u);
  EXPECT_EQ(t.nodes_with_role(NodeRole::ClientHost).size(), 8u);
  for (const auto& l : t.links()) EXPECT_EQ(l.capacity_bps, 10e6);
  const auto big = Topology::builtin_mesh({8, 16, {100e6, 100, 100}});
  EXPECT_EQ(big.nodes_with_role(NodeRole::BotHost).size(), 16u);
  for (const auto& l : big.links()) EXPECT_EQ(l.capacity_bps, 100e6);
}

TEST(Topology, BuiltinIsDeterministic) {
  std::ostringstream a, b;
  Topology::builtin_mesh({8, 8, {}}).write(a);
  Topology::builtin_mesh({8, 8, {}}).write(b);
  EXPECT_EQ(a.str(), b.str());
}

TEST(Topology, BuiltinTargetCut) {
  const auto t = Topology::builtin_mesh({8, 16, {}});
  const NodeId tz = t.attach_switch(t.target());
  std::set<LinkId> cut;
  for (const auto& [l, n] : t.adjacent(tz)) {
    if (t.node(n).name.starts_with("k")) cut.insert(l);
  }
  EXPECT_EQ(cut.size(), 3u);
  for (NodeId c : t.nodes_with_role(NodeRole::ClientHost)) {
    for (const auto& r : k_shortest_paths(t, c, t.target(), 8)) {
      EXPECT_EQ(std::count_if(r.links.begin(), r.links.end(), [&](LinkId l) { return cut.contains(l); }), 1);
    }
  }
}

TEST(Topology, ParseMinimalLine) {
  std::istringstream in("[nodes]\nh1 client s1\ns1 switch\nh2 client\n[links]\nh1 s1 1e6 10 5\ns1 h2 1e6 10 5\n");
  const auto t = Topology::parse(in, false);
  EXPECT_EQ(t.switch_count(), 1u);
  EXPECT_NO_THROW(t.validate_graph());
}

TEST(Topology, RejectsIsolatedSwitch) {
  std::istringstream in(
      "[nodes]\nh1 client\ns1 switch\ns2 switch\nh2 target\nd decoy\n"
      "[links]\nh1 s1 1e6 10 5\ns1 h2 1e6 10 5\ns1 d 1e6 10 5\n");
  EXPECT_THROW(Topology::parse(in), ConfigError);
}

TEST(Topology, RejectsBadInputs) {
  std::istringstream zero("[nodes]\nh1 client\ns1 switch\nh2 client\n[links]\nh1 s1 0 10 5\ns1 h2 1e6 10 5\n");
  EXPECT_THROW(Topology::parse(zero, false), ConfigError);
  std::istringstream no_target("[nodes]\nh1 client\ns1 switch\nh2 decoy\n[links]\nh1 s1 1e6 10 5\ns1 h2 1e6 10 5\n");
  EXPECT_THROW(Topology::parse(no_target), ConfigError);
  std::istringstream role("[nodes]\nh1 router\n");
  EXPECT_THROW(Topology::parse(role, false), ParseError);
}

TEST(Topology, WriteParseRoundTrip) {
  const auto t = Topology::builtin_mesh({4, 4, {}});
  std::ostringstream a;
  t.write(a);
  std::istringstream in(a.str());
  std::ostringstream b;
  Topology::parse(in).write(b);
  EXPECT_EQ(a.str(), b.str());
}

TEST(Ksp, Triangle) {
  Triangle g;
  const auto r = k_shortest_paths(g.t, g.a, g.c, 2);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].links, (std::vector<LinkId>{2}));
  EXPECT_EQ(r[1].links, (std::vector<LinkId>{0, 1}));
}

TEST(Ksp, LineHasOnePath) {
  Topology t;
  auto a = t.add_node("A", NodeRole::ClientHost);
  auto b = t.add_node("B", NodeRole::Switch);
  auto c = t.add_node("C", NodeRole::ClientHost);
  link(t, a, b);
  link(t, b, c);
  EXPECT_EQ(k_shortest_paths(t, a, c, 3).size(), 1u);
}

TEST(Ksp, FourCycle) {
  Topology t;
  auto a = t.add_node("A", NodeRole::ClientHost);
  auto b = t.add_node("B", NodeRole::Switch);
  auto c = t.add_node("C", NodeRole::ClientHost);
  auto d = t.add_node("D", NodeRole::Switch);
  link(t, a, b);
  link(t, b, c);
  link(t, c, d);
  link(t, d, a);
  const auto r = k_shortest_paths(t, a, c, 2);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].links, (std::vector<LinkId>{0, 1}));
  EXPECT_EQ(r[1].links, (std::vector<LinkId>{3, 2}));
}

TEST(Ksp, Errors) {
  Triangle g;
  EXPECT_THROW(k_shortest_paths(g.t, g.a, g.a, 2), RoutingError);
  EXPECT_THROW(k_shortest_paths(g.t, g.a, g.b, 2), RoutingError);
  Topology t;
  auto a = t.add_node("A", NodeRole::ClientHost);
  auto b = t.add_node("B", NodeRole::Switch);
  auto c = t.add_node("C", NodeRole::ClientHost);
  link(t, a, b);
  EXPECT_THROW(k_shortest_paths(t, a, c, 2), RoutingError);
}

TEST(Ksp, MatchesExhaustiveEnumeration) {
  Rng rng(2718);
  int compared = 0;
  for (int g = 0; g < 100; ++g) {
    Topology t;
    const auto n_sw = 2 + rng.below(4);
    const auto n_host = 2 + rng.below(std::min<std::uint64_t>(3, 8 - n_sw - 1));
    std::vector<NodeId> sw, hosts;
    for (std::uint64_t i = 0; i < n_sw; ++i) sw.push_back(t.add_node("s" + std::to_string(i), NodeRole::Switch));
    for (std::uint64_t i = 0; i < n_host; ++i) hosts.push_back(t.add_node("h" + std::to_string(i), NodeRole::ClientHost));
    for (std::size_t i = 0; i < sw.size(); ++i) {
      for (std::size_t j = i + 1; j < sw.size(); ++j) {
        if (rng.uniform() < 0.5) link(t, sw[i], sw[j]);
        if (rng.uniform() < 0.15) link(t, sw[i], sw[j]);
      }
    }
    for (NodeId h : hosts) {
      link(t, h, sw[rng.below(sw.size())]);
      if (rng.uniform() < 0.3) link(t, h, sw[rng.below(sw.size())]);
    }
    if (rng.uniform() < 0.3) link(t, hosts[0], hosts[1]);
    ASSERT_LE(t.nodes().size(), 8u);
    for (NodeId s : hosts) {
      for (NodeId d : hosts) {
        if (s == d) continue;
        const auto all = enumerate_paths(t, s, d);
        for (std::size_t k : {1u, 2u, 3u, 5u, 50u}) {
          if (all.empty()) {
            EXPECT_THROW(k_shortest_paths(t, s, d, k), RoutingError);
            continue;
          }
          const auto got = k_shortest_paths(t, s, d, k);
          ASSERT_EQ(got.size(), std::min(k, all.size()));
          for (std::size_t i = 0; i < got.size(); ++i) {
            EXPECT_EQ(got[i].links, all[i]) << "graph " << g << " k=" << k << " i=" << i;
            EXPECT_NO_THROW(check_route(t, got[i]));
          }
          ++compared;
        }
      }
    }
  }
  EXPECT_GT(compared, 500);
}

TEST(Routing, InitialRoutesAreShortest) {
  Triangle g;
  const std::vector<HostPair> pairs{{g.a, g.c}, {g.c, g.a}};
  const auto s = install_initial_routes(g.t, pairs);
  EXPECT_EQ(s.route(g.a, g.c).links, (std::vector<LinkId>{2}));
  EXPECT_EQ(s.route(g.c, g.a).links, (std::vector<LinkId>{2}));
  EXPECT_FALSE(s.busy(g.b, 0));
  const auto again = install_initial_routes(g.t, pairs);
  EXPECT_EQ(s.routes(), again.routes());
}

TEST(Routing, InitialRoutesUnreachable) {
  Topology t;
  auto a = t.add_node("A", NodeRole::ClientHost);
  auto b = t.add_node("B", NodeRole::Switch);
  auto c = t.add_node("C", NodeRole::ClientHost);
  link(t, a, b);
  const std::vector<HostPair> pairs{{a, c}};
  EXPECT_THROW(install_initial_routes(t, pairs), RoutingError);
}

TEST(Routing, CheckRouteRejectsBrokenPaths) {
  Triangle g;
  EXPECT_THROW(check_route(g.t, {g.a, g.c, {0}}), ConfigError);
  EXPECT_THROW(check_route(g.t, {g.a, g.c, {1, 0}}), ConfigError);
  EXPECT_THROW(check_route(g.t, {g.a, g.c, {}}), ConfigError);
  EXPECT_NO_THROW(check_route(g.t, {g.a, g.c, {0, 1}}));
}

TEST(Mutation, OptimalModeKeepsUniqueShortest) {
  Triangle g;
  const std::vector<HostPair> pairs{{g.a, g.c}};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto s = install_initial_routes(g.t, pairs);
    Rng rng(seed);
    const auto res = mutate_routes(s, g.t, rng, MutationMode::OptimalSizeOnly, 2, 0, 5000);
    EXPECT_EQ(s.route(g.a, g.c).links, (std::vector<LinkId>{2}));
    EXPECT_TRUE(res.affected_switches.empty());
    EXPECT_EQ(res.changed_pairs, 0u);
  }
}

TEST(Mutation, AnySizeIsUniform) {
  Triangle g;
  const std::vector<HostPair> pairs{{g.a, g.c}};
  int direct = 0;
  const int n = 1000;
  for (int seed = 0; seed < n; ++seed) {
    auto s = install_initial_routes(g.t, pairs);
    Rng rng(static_cast<std::uint64_t>(seed));
    const auto res = mutate_routes(s, g.t, rng, MutationMode::AnySize, 2, 1000, 5000);
    if (s.route(g.a, g.c).hops() == 1) {
      ++direct;
      EXPECT_TRUE(res.affected_switches.empty());
    } else {
      EXPECT_EQ(res.affected_switches, (std::vector<NodeId>{g.b}));
      EXPECT_EQ(s.busy_until(g.b), 6000);
      EXPECT_TRUE(s.busy(g.b, 5999));
      EXPECT_FALSE(s.busy(g.b, 6000));
    }
  }
  const double e = n / 2.0;
  const double chi2 = (direct - e) * (direct - e) / e + ((n - direct) - e) * ((n - direct) - e) / e;
  EXPECT_LT(chi2, 6.635) << "direct=" << direct;
}

TEST(Mutation, IdenticalRouteTouchesNoSwitch) {
  Triangle g;
  const Route r{g.a, g.c, {0, 1}};
  EXPECT_TRUE(switches_with_changed_entries(g.t, r, r).empty());
  EXPECT_EQ(switches_with_changed_entries(g.t, r, Route{g.a, g.c, {2}}), (std::vector<NodeId>{g.b}));
}

TEST(Mutation, RequiresTwoCandidates) {
  Triangle g;
  const std::vector<HostPair> pairs{{g.a, g.c}};
  auto s = install_initial_routes(g.t, pairs);
  Rng rng(1);
  EXPECT_THROW(mutate_routes(s, g.t, rng, MutationMode::AnySize, 1, 0, 1), ConfigError);
}

TEST(Mutation, SameSeedSameRoutes) {
  const auto t = Topology::builtin_mesh({8, 8, {}});
  std::vector<HostPair> pairs;
  for (NodeId c : t.nodes_with_role(NodeRole::ClientHost)) pairs.emplace_back(c, t.target());
  for (NodeId b : t.nodes_with_role(NodeRole::BotHost)) {
    for (NodeId d : t.nodes_with_role(NodeRole::DecoyServer)) pairs.emplace_back(b, d);
  }
  auto s1 = install_initial_routes(t, pairs), s2 = install_initial_routes(t, pairs);
  Rng r1(5), r2(5);
  for (int i = 0; i < 5; ++i) {
    const auto m1 = mutate_routes(s1, t, r1, MutationMode::OptimalSizeOnly, 8, i, 10);
    const auto m2 = mutate_routes(s2, t, r2, MutationMode::OptimalSizeOnly, 8, i, 10);
    EXPECT_EQ(m1.affected_switches, m2.affected_switches);
    EXPECT_EQ(s1.routes(), s2.routes());
  }
}

TEST(Traceroute, ReflectsInstalledRoute) {
  Triangle g;
  const std::vector<HostPair> pairs{{g.a, g.c}};
  Simulator sim(g.t, install_initial_routes(g.t, pairs));
  EXPECT_EQ(sim.traceroute(g.a, g.c), (std::vector<LinkId>{2}));
  EXPECT_EQ(sim.traceroute(g.a, g.c), sim.traceroute(g.a, g.c));
  sim.routing().install({g.a, g.c, {0, 1}});
  EXPECT_EQ(sim.traceroute(g.a, g.c), (std::vector<LinkId>{0, 1}));
  sim.run(seconds(1));
  EXPECT_EQ(sim.counters().injected, 4u);
  EXPECT_EQ(sim.counters().delivered, 4u);
}

TEST(Traceroute, UnroutedPair) {
  Triangle g;
  const std::vector<HostPair> pairs{{g.a, g.c}};
  Simulator sim(g.t, install_initial_routes(g.t, pairs));
  EXPECT_THROW(sim.traceroute(g.c, g.a), Error);
}
