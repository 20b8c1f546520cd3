#include "rrmgame/netsim/simulator.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "rrmgame/error.hpp"

namespace rrmgame::netsim {

std::string_view to_string(PacketKind k) {
  switch (k) {
    case PacketKind::Regular: return "regular";
    case PacketKind::Traceroute: return "traceroute";
    case PacketKind::Ping: return "ping";
  }
  return "?";
}

std::string_view to_string(DropReason r) {
  switch (r) {
    case DropReason::None: return "";
    case DropReason::QueueOverflow: return "queue_overflow";
    case DropReason::UpdateWindowOverflow: return "update_window_overflow";
  }
  return "?";
}

Simulator::Simulator(const Topology& topo, RoutingState routing, SimConfig cfg)
    : topo_(&topo), routing_(std::move(routing)), cfg_(cfg), ports_(2 * topo.links().size()) {
  if (cfg_.update_duration < 0) throw ConfigError("update duration must be non-negative");
}

void Simulator::push(SimTime t, EventType type, std::uint32_t ref) {
  events_.push({t, seq_++, type, ref});
}

void Simulator::schedule(SimTime t, std::function<void()> fn) {
  if (t < now_) throw DomainError("cannot schedule in the past");
  callbacks_.push_back(std::move(fn));
  push(t, EventType::Callback, static_cast<std::uint32_t>(callbacks_.size() - 1));
}

FlowId Simulator::inject_flow(const FlowSpec& spec) {
  if (!(spec.start < spec.end)) throw ConfigError("flow window must satisfy start < end");
  if (spec.start < now_) throw ConfigError("flow cannot start in the past");
  if (!(spec.rate_pps > 0.0) || !std::isfinite(spec.rate_pps)) {
    throw ConfigError("flow rate must be positive");
  }
  if (spec.pkt_size == 0) throw ConfigError("packet size must be positive");
  const auto interval = static_cast<SimTime>(std::floor(1e6 / spec.rate_pps));
  if (interval <= 0) throw ConfigError("flow rate exceeds one packet per microsecond");
  routing_.route(spec.src, spec.dst);
  const auto id = static_cast<FlowId>(flows_.size());
  flows_.push_back({spec, interval, 0});
  push(spec.start, EventType::FlowEmit, id);
  return id;
}

std::uint32_t Simulator::route_index(NodeId src, NodeId dst) {
  if (routing_.route_version() != pool_version_) {
    pool_index_.clear();
    pool_version_ = routing_.route_version();
  }
  const std::uint64_t key = (static_cast<std::uint64_t>(src) << 32) | dst;
  auto it = pool_index_.find(key);
  if (it != pool_index_.end()) return it->second;
  pool_.push_back(routing_.route(src, dst).links);
  const auto idx = static_cast<std::uint32_t>(pool_.size() - 1);
  pool_index_.emplace(key, idx);
  return idx;
}

PacketId Simulator::send(NodeId src, NodeId dst, std::uint32_t size, PacketKind kind, FlowId flow) {
  if (size == 0) throw ConfigError("packet size must be positive");
  const std::uint32_t route = route_index(src, dst);
  std::uint32_t slot;
  if (!free_slots_.empty()) {
    slot = free_slots_.back();
    free_slots_.pop_back();
  } else {
    slot = static_cast<std::uint32_t>(slots_.size());
    slots_.emplace_back();
  }
  Packet& p = slots_[slot];
  p = {next_packet_++, src, dst, size, kind, flow, now_, route, 0, src};
  auto& c = trace_.counters;
  ++c.injected;
  ++c.in_flight;
  if (cfg_.record_trace) {
    trace_.packets.push_back({p.id, src, dst, kind, now_, -1, DropReason::None, {}});
  }
  if (obs_.on_inject) obs_.on_inject(p, now_);
  hop(slot);
  return p.id;
}

std::vector<LinkId> Simulator::traceroute(NodeId src, NodeId dst) {
  auto links = routing_.route(src, dst).links;
  send(src, dst, kTracerouteBytes, PacketKind::Traceroute);
  return links;
}

void Simulator::finish(std::uint32_t slot) {
  --trace_.counters.in_flight;
  free_slots_.push_back(slot);
}

void Simulator::hop(std::uint32_t slot) {
  Packet& p = slots_[slot];
  const auto& links = pool_[p.route];
  const NodeId at = p.at;

  if (p.hop == links.size()) {
    ++trace_.counters.delivered;
    if (cfg_.record_trace) trace_.packets[p.id].delivered = now_;
    if (obs_.on_deliver) obs_.on_deliver(p, now_);
    finish(slot);
    return;
  }

  const Link& link = topo_->link(links[p.hop]);
  Port& port = ports_[2 * link.id + (at == link.a ? 0 : 1)];
  while (!port.waiting.empty() && port.waiting.front() <= now_) port.waiting.pop_front();

  const bool busy = topo_->is_switch(at) && routing_.busy(at, now_);
  if (port.waiting.size() >= link.queue_pkts) {
    // Packets held by an update window still occupying the queue make this
    // an update-window drop too.
    const bool update = busy || port.held_until > now_;
    const DropReason why = update ? DropReason::UpdateWindowOverflow : DropReason::QueueOverflow;
    auto& c = trace_.counters;
    ++(update ? c.dropped_update : c.dropped_queue);
    if (cfg_.record_trace) trace_.packets[p.id].drop = why;
    if (obs_.on_drop) obs_.on_drop(p, now_, why);
    finish(slot);
    return;
  }

  const SimTime ready = busy ? routing_.busy_until(at) : now_;
  const SimTime start = std::max(ready, port.free_at);
  const auto tx = static_cast<SimTime>(
      std::floor(static_cast<double>(p.size) * 8e6 / link.capacity_bps));
  port.free_at = start + tx;
  if (start > now_) port.waiting.push_back(start);
  if (busy) port.held_until = std::max(port.held_until, start);
  if (cfg_.record_trace && cfg_.record_hops) trace_.packets[p.id].hop_times.push_back(start);
  ++p.hop;
  p.at = link.other(at);
  push(start + tx + link.prop_delay_us, EventType::Hop, slot);
}

void Simulator::emit(FlowId f) {
  Flow& fl = flows_[f];
  send(fl.spec.src, fl.spec.dst, fl.spec.pkt_size, fl.spec.kind, f);
  ++fl.emitted;
  const SimTime next = fl.spec.start + static_cast<SimTime>(fl.emitted) * fl.interval;
  if (next < fl.spec.end) push(next, EventType::FlowEmit, f);
}

MutationResult Simulator::mutate(Rng& rng, MutationMode mode, std::size_t k) {
  auto r = mutate_routes(routing_, *topo_, rng, mode, k, now_, cfg_.update_duration);
  ++trace_.mutations;
  return r;
}

const SimulationTrace& Simulator::run(SimTime until) {
  if (until < now_) throw DomainError("cannot run backwards in time");
  while (!events_.empty() && events_.top().time <= until) {
    const Event ev = events_.top();
    events_.pop();
    now_ = ev.time;
    switch (ev.type) {
      case EventType::FlowEmit: emit(ev.ref); break;
      case EventType::Hop: hop(ev.ref); break;
      case EventType::Callback: {
        auto fn = std::move(callbacks_[ev.ref]);
        callbacks_[ev.ref] = nullptr;
        fn();
        break;
      }
    }
    ++trace_.counters.events;
    if (obs_.on_event) obs_.on_event(trace_.counters, now_);
  }
  now_ = until;
  return trace_;
}

void Simulator::write_trace_csv(std::ostream& out) const {
  out << "packet_id,src,dst,kind,created_us,delivered_us,drop_reason\n";
  for (const auto& r : trace_.packets) {
    out << fmt::format("{},{},{},{},{},{},{}\n", r.id, topo_->node(r.src).name,
                       topo_->node(r.dst).name, to_string(r.kind), r.created, r.delivered,
                       to_string(r.drop));
  }
}

}  // namespace rrmgame::netsim
