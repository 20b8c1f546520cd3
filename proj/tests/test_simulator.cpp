#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "rrmgame/error.hpp"
#include "rrmgame/netsim/routing.hpp"
#include "rrmgame/netsim/simulator.hpp"
#include "rrmgame/netsim/topology.hpp"

using namespace rrmgame;
using namespace rrmgame::netsim;

namespace {

// h1 - s0 - ... - h2, one link per capacity.
struct Line {
  Topology t;
  NodeId h1 = 0, h2 = 0;
  std::vector<NodeId> sw;
  Line(std::vector<double> caps, SimTime prop = 100, std::uint32_t queue = 100) {
    h1 = t.add_node("h1", NodeRole::ClientHost);
    NodeId prev = h1;
    for (std::size_t i = 0; i + 1 < caps.size(); ++i) {
      sw.push_back(t.add_node("s" + std::to_string(i), NodeRole::Switch));
      t.add_link(prev, sw.back(), caps[i], prop, queue);
      prev = sw.back();
    }
    h2 = t.add_node("h2", NodeRole::TargetServer);
    t.add_link(prev, h2, caps.back(), prop, queue);
  }
  RoutingState routes() const {
    const std::vector<HostPair> pairs{{h1, h2}, {h2, h1}};
    return install_initial_routes(t, pairs);
  }
};

SimTime min_delay(const Topology& t, const std::vector<LinkId>& route, std::uint32_t size) {
  SimTime d = 0;
  for (LinkId l : route) {
    const auto& ln = t.link(l);
    d += static_cast<SimTime>(std::floor(size * 8e6 / ln.capacity_bps)) + ln.prop_delay_us;
  }
  return d;
}

}  // namespace

TEST(Simulator, SinglePacketDelay) {
  Line g({10e6, 10e6});
  Simulator sim(g.t, g.routes(), {50'000, true, false});
  sim.send(g.h1, g.h2, 1000, PacketKind::Regular);
  sim.run(seconds(1));
  ASSERT_EQ(sim.trace().packets.size(), 1u);
  EXPECT_EQ(sim.trace().packets[0].delivered - sim.trace().packets[0].created, 1800);
}

TEST(Simulator, FlowEmitsExactCount) {
  Line g({10e6, 10e6});
  Simulator sim(g.t, g.routes());
  const auto f = sim.inject_flow({g.h1, g.h2, 100, 1000, 0, seconds(10), PacketKind::Regular});
  sim.run(seconds(11));
  EXPECT_EQ(sim.flow_emitted(f), 1000u);
  EXPECT_EQ(sim.counters().delivered, 1000u);
  EXPECT_EQ(sim.counters().dropped(), 0u);
}

TEST(Simulator, FlowErrors) {
  Line g({10e6, 10e6});
  Simulator sim(g.t, g.routes());
  EXPECT_THROW(sim.inject_flow({g.h1, g.h2, 100, 1000, seconds(5), seconds(5), PacketKind::Regular}), ConfigError);
  EXPECT_THROW(sim.inject_flow({g.h1, g.h2, 0, 1000, 0, seconds(5), PacketKind::Regular}), ConfigError);
  EXPECT_THROW(sim.inject_flow({g.h1, g.h2, 100, 0, 0, seconds(5), PacketKind::Regular}), ConfigError);
  EXPECT_THROW(sim.inject_flow({g.h1, g.h1, 100, 10, 0, seconds(5), PacketKind::Regular}), Error);
}

TEST(Simulator, OverloadDropsHalf) {
  // 20 Mbps offered into a 10 Mbps bottleneck.
  Line g({40e6, 10e6, 40e6});
  Simulator sim(g.t, g.routes());
  sim.inject_flow({g.h1, g.h2, 2500, 1000, 0, seconds(10), PacketKind::Regular});
  sim.run(seconds(11));
  const auto& c = sim.counters();
  EXPECT_EQ(c.injected, 25000u);
  EXPECT_EQ(c.in_flight, 0u);
  const double frac = static_cast<double>(c.dropped()) / static_cast<double>(c.injected);
  EXPECT_NEAR(frac, 0.5, 0.05);
  EXPECT_EQ(c.dropped_update, 0u);
}

TEST(Simulator, FifoAndDelayLowerBound) {
  Line g({40e6, 10e6, 40e6}, 250, 20);
  Simulator sim(g.t, g.routes());
  sim.inject_flow({g.h1, g.h2, 1500, 800, 0, seconds(2), PacketKind::Regular});
  sim.inject_flow({g.h1, g.h2, 700, 300, 1234, seconds(2), PacketKind::Regular});
  std::vector<std::pair<SimTime, PacketId>> order;
  std::uint64_t checked = 0;
  sim.observers().on_deliver = [&](const Packet& p, SimTime t) {
    EXPECT_GE(t - p.created, min_delay(g.t, sim.route_links(p), p.size));
    order.emplace_back(p.created, p.id);
    ++checked;
  };
  sim.run(seconds(3));
  EXPECT_GT(sim.counters().dropped_queue, 0u);
  EXPECT_GT(checked, 1000u);
  EXPECT_TRUE(std::is_sorted(order.begin(), order.end()));
}

TEST(Simulator, DelayBoundUnderMutation) {
  const auto t = Topology::builtin_mesh({8, 0, {}});
  std::vector<HostPair> pairs;
  const auto clients = t.nodes_with_role(NodeRole::ClientHost);
  for (NodeId c : clients) pairs.emplace_back(c, t.target());
  Simulator sim(t, install_initial_routes(t, pairs));
  for (NodeId c : clients) sim.inject_flow({c, t.target(), 300, 1000, 17 * c, seconds(20), PacketKind::Regular});
  Rng rng(3);
  for (int i = 1; i <= 4; ++i) {
    sim.schedule(seconds(4 * i), [&] { sim.mutate(rng, MutationMode::AnySize, 8); });
  }
  std::uint64_t n = 0;
  sim.observers().on_deliver = [&](const Packet& p, SimTime now) {
    ASSERT_GE(now - p.created, min_delay(t, sim.route_links(p), p.size));
    ++n;
  };
  sim.run(seconds(21));
  EXPECT_GT(n, 0u);
  EXPECT_EQ(sim.trace().mutations, 4u);
}

TEST(Simulator, ConservationAtEveryEvent) {
  Line g({40e6, 10e6, 40e6}, 100, 10);
  Simulator sim(g.t, g.routes());
  sim.inject_flow({g.h1, g.h2, 2000, 1000, 0, seconds(3), PacketKind::Regular});
  sim.inject_flow({g.h2, g.h1, 500, 200, 7, seconds(3), PacketKind::Ping});
  std::uint64_t events = 0;
  sim.observers().on_event = [&](const Counters& c, SimTime) {
    ASSERT_EQ(c.injected, c.delivered + c.dropped() + c.in_flight);
    ++events;
  };
  sim.run(seconds(4));
  EXPECT_EQ(events, sim.counters().events);
  EXPECT_EQ(sim.counters().in_flight, 0u);
}

TEST(Simulator, BusySwitchHoldsPackets) {
  Line g({10e6, 10e6});
  auto routes = g.routes();
  routes.mark_busy(g.sw[0], 10'000);
  Simulator sim(g.t, std::move(routes), {50'000, true, false});
  sim.send(g.h1, g.h2, 1000, PacketKind::Regular);
  sim.run(seconds(1));
  // Arrives at the switch at 900, leaves the hold at 10000, then 900 more.
  EXPECT_EQ(sim.trace().packets[0].delivered, 10'900);
}

TEST(Simulator, UpdateWindowOverflowIsLabelled) {
  Line g({10e6, 10e6}, 100, 5);
  auto routes = g.routes();
  routes.mark_busy(g.sw[0], seconds(1));
  Simulator sim(g.t, std::move(routes), {50'000, true, false});
  sim.inject_flow({g.h1, g.h2, 1000, 100, 0, seconds(0.5), PacketKind::Regular});
  sim.run(seconds(2));
  EXPECT_GT(sim.counters().dropped_update, 0u);
  EXPECT_EQ(sim.counters().dropped_queue, 0u);
  for (const auto& p : sim.trace().packets) {
    EXPECT_TRUE(p.delivered >= 0 || p.drop == DropReason::UpdateWindowOverflow);
  }
}

TEST(Simulator, NoLoadNoDrops) {
  const auto t = Topology::builtin_mesh({8, 0, {}});
  std::vector<HostPair> pairs;
  for (NodeId c : t.nodes_with_role(NodeRole::ClientHost)) pairs.emplace_back(c, t.target());
  Simulator sim(t, install_initial_routes(t, pairs));
  for (const auto& [s, d] : pairs) sim.inject_flow({s, d, 100, 1000, 0, seconds(30), PacketKind::Regular});
  sim.run(seconds(31));
  EXPECT_EQ(sim.counters().dropped(), 0u);
  EXPECT_EQ(sim.counters().delivered, 8u * 3000u);
}

TEST(Simulator, DeterministicTrace) {
  auto once = [] {
    const auto t = Topology::builtin_mesh({8, 8, {}});
    std::vector<HostPair> pairs;
    for (NodeId c : t.nodes_with_role(NodeRole::ClientHost)) pairs.emplace_back(c, t.target());
    for (NodeId b : t.nodes_with_role(NodeRole::BotHost)) pairs.emplace_back(b, t.nodes_with_role(NodeRole::DecoyServer)[b % 3]);
    Simulator sim(t, install_initial_routes(t, pairs), {50'000, true, false});
    for (const auto& [s, d] : pairs) sim.inject_flow({s, d, 1500, 1000, s * 13, seconds(5), PacketKind::Regular});
    Rng rng(8);
    sim.schedule(seconds(2), [&] { sim.mutate(rng, MutationMode::AnySize, 8); });
    sim.run(seconds(6));
    std::ostringstream out;
    sim.write_trace_csv(out);
    return out.str();
  };
  const auto a = once();
  EXPECT_EQ(a, once());
  EXPECT_TRUE(a.starts_with("packet_id,src,dst,kind,created_us,delivered_us,drop_reason\n"));
}

TEST(Simulator, CallbacksRunInOrder) {
  Line g({10e6, 10e6});
  Simulator sim(g.t, g.routes());
  std::vector<int> seen;
  sim.schedule(500, [&] { seen.push_back(2); });
  sim.schedule(100, [&] { seen.push_back(1); });
  sim.schedule(500, [&] { seen.push_back(3); });
  sim.run(1000);
  EXPECT_EQ(seen, (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(sim.now(), 1000);
  EXPECT_THROW(sim.schedule(10, [] {}), Error);
}

TEST(Simulator, ReconSignalMapping) {
  EXPECT_EQ(signal_of(PacketKind::Traceroute), SenderAction::Recon);
  EXPECT_EQ(signal_of(PacketKind::Ping), SenderAction::Recon);
  EXPECT_EQ(signal_of(PacketKind::Regular), SenderAction::Regular);
}
