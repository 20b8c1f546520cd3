#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <optional>
#include <queue>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rrmgame/game.hpp"
#include "rrmgame/netsim/routing.hpp"
#include "rrmgame/netsim/topology.hpp"
#include "rrmgame/rng.hpp"

namespace rrmgame::netsim {

enum class PacketKind { Regular, Traceroute, Ping };

std::string_view to_string(PacketKind k);

/// Traceroute and ping are reconnaissance; everything else is regular use.
inline SenderAction signal_of(PacketKind k) {
  return k == PacketKind::Regular ? SenderAction::Regular : SenderAction::Recon;
}

enum class DropReason { None, QueueOverflow, UpdateWindowOverflow };

std::string_view to_string(DropReason r);

using PacketId = std::uint64_t;
using FlowId = std::uint32_t;

inline constexpr FlowId kNoFlow = UINT32_MAX;
inline constexpr std::uint32_t kTracerouteBytes = 64;

struct Packet {
  PacketId id = 0;
  NodeId src = 0;
  NodeId dst = 0;
  std::uint32_t size = 0;
  PacketKind kind = PacketKind::Regular;
  FlowId flow = kNoFlow;
  SimTime created = 0;
  std::uint32_t route = 0;  // index into the simulator's route pool
  std::uint32_t hop = 0;    // next link to take
  NodeId at = 0;            // node currently holding the packet
};

/// One row per injected packet.
struct PacketRecord {
  PacketId id = 0;
  NodeId src = 0;
  NodeId dst = 0;
  PacketKind kind = PacketKind::Regular;
  SimTime created = 0;
  SimTime delivered = -1;
  DropReason drop = DropReason::None;
  std::vector<SimTime> hop_times;  // departure time from each node, when enabled
};

struct Counters {
  std::uint64_t injected = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped_queue = 0;
  std::uint64_t dropped_update = 0;
  std::uint64_t in_flight = 0;
  std::uint64_t events = 0;

  std::uint64_t dropped() const { return dropped_queue + dropped_update; }
};

struct SimulationTrace {
  Counters counters;
  std::vector<PacketRecord> packets;  // empty unless recording is on
  std::uint64_t mutations = 0;
};

struct SimConfig {
  SimTime update_duration = 50'000;
  bool record_trace = false;
  bool record_hops = false;
};

struct FlowSpec {
  NodeId src = 0;
  NodeId dst = 0;
  double rate_pps = 0.0;
  std::uint32_t pkt_size = 0;
  SimTime start = 0;
  SimTime end = 0;
  PacketKind kind = PacketKind::Regular;
};

struct Observers {
  std::function<void(const Packet&, SimTime)> on_inject;
  std::function<void(const Packet&, SimTime)> on_deliver;
  std::function<void(const Packet&, SimTime, DropReason)> on_drop;
  /// Called after every processed event.
  std::function<void(const Counters&, SimTime)> on_event;
};

/// Single-threaded packet-level discrete-event simulator.
///
/// Each packet's route is fixed when it is injected. Every directed link end
/// is a FIFO drop-tail port: a packet waits for the transmitter, takes
/// floor(size * 8e6 / capacity) us to send, then the link's propagation
/// delay. A switch inside a flow-table update window holds arriving packets
/// until the window closes; they occupy queue space while they wait, and a
/// drop counts as an update-window drop while any of them is still queued.
class Simulator {
 public:
  Simulator(const Topology& topo, RoutingState routing, SimConfig cfg = {});

  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  const Topology& topology() const { return *topo_; }
  RoutingState& routing() { return routing_; }
  const RoutingState& routing() const { return routing_; }
  Observers& observers() { return obs_; }

  SimTime now() const { return now_; }

  /// Constant-rate flow: one packet every floor(1e6 / rate) us in [start, end).
  FlowId inject_flow(const FlowSpec& spec);
  std::uint64_t flow_emitted(FlowId f) const { return flows_.at(f).emitted; }
  const FlowSpec& flow(FlowId f) const { return flows_.at(f).spec; }

  /// Injects one packet now along the installed route.
  PacketId send(NodeId src, NodeId dst, std::uint32_t size, PacketKind kind, FlowId flow = kNoFlow);

  /// Returns the installed route's links and sends a traceroute probe along it.
  std::vector<LinkId> traceroute(NodeId src, NodeId dst);

  /// Runs fn at time t (t >= now). Equal-time events fire in scheduling order.
  void schedule(SimTime t, std::function<void()> fn);

  /// Re-randomizes installed routes; affected switches enter an update window.
  MutationResult mutate(Rng& rng, MutationMode mode, std::size_t k);

  /// Processes every event with time <= until, then advances the clock to until.
  const SimulationTrace& run(SimTime until);

  const SimulationTrace& trace() const { return trace_; }
  const Counters& counters() const { return trace_.counters; }
  const std::vector<LinkId>& route_links(const Packet& p) const { return pool_[p.route]; }

  /// packet_id,src,dst,kind,created_us,delivered_us,drop_reason
  void write_trace_csv(std::ostream& out) const;

 private:
  enum class EventType : std::uint8_t { FlowEmit, Hop, Callback };

  struct Event {
    SimTime time;
    std::uint64_t seq;
    EventType type;
    std::uint32_t ref;
    bool operator>(const Event& o) const {
      return time != o.time ? time > o.time : seq > o.seq;
    }
  };

  struct Port {
    SimTime free_at = 0;
    std::deque<SimTime> waiting;  // transmission start times, non-decreasing
    SimTime held_until = 0;       // start time of the last packet an update window held
  };

  struct Flow {
    FlowSpec spec;
    SimTime interval = 0;
    std::uint64_t emitted = 0;
  };

  void push(SimTime t, EventType type, std::uint32_t ref);
  std::uint32_t route_index(NodeId src, NodeId dst);
  void hop(std::uint32_t slot);
  void emit(FlowId f);
  void finish(std::uint32_t slot);

  const Topology* topo_;
  RoutingState routing_;
  SimConfig cfg_;
  Observers obs_;
  SimTime now_ = 0;
  std::uint64_t seq_ = 0;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;

  std::vector<Port> ports_;
  std::vector<Flow> flows_;
  std::vector<std::function<void()>> callbacks_;

  std::vector<Packet> slots_;
  std::vector<std::uint32_t> free_slots_;
  PacketId next_packet_ = 0;

  std::vector<std::vector<LinkId>> pool_;
  std::unordered_map<std::uint64_t, std::uint32_t> pool_index_;
  std::uint64_t pool_version_ = 0;

  SimulationTrace trace_;
};

}  // namespace rrmgame::netsim
