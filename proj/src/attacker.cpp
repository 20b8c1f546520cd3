#include "rrmgame/attacker.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "rrmgame/error.hpp"

namespace rrmgame::attack {

std::string_view to_string(Behavior b) {
  return b == Behavior::Stealthy ? "stealthy" : "aggressive";
}

std::string_view to_string(Capability c) { return c == Capability::Decent ? "decent" : "strong"; }

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::Recon: return "recon";
    case Phase::Idle: return "idle";
    case Phase::Attack: return "attack";
  }
  return "?";
}

std::uint32_t bots_for(Capability c, std::uint32_t n_clients) {
  return c == Capability::Decent ? n_clients : 2 * n_clients;
}

void AttackerConfig::validate(double client_rate_pps) const {
  if (recon_duration <= 0) throw ConfigError("recon duration must be positive");
  if (target_link_count == 0) throw ConfigError("target link count must be positive");
  if (!(bot_rate_pps > 0.0)) throw ConfigError("bot rate must be positive");
  if (bot_rate_pps > client_rate_pps) {
    throw ConfigError("bot rate may not exceed the legitimate client rate");
  }
  if (!(rate_spread >= 0.0 && rate_spread < 1.0)) throw ConfigError("rate spread must be in [0, 1)");
  if (pkt_size == 0) throw ConfigError("bot packet size must be positive");
  if (probe_interval <= 0) throw ConfigError("probe interval must be positive");
  for (double m : {stealthy_recon_mean_s, stealthy_idle_mean_s, stealthy_attack_mean_s}) {
    if (!(m > 0.0) || !std::isfinite(m)) throw ConfigError("phase means must be positive");
  }
}

void LinkMap::add(std::span<const LinkId> route) {
  for (LinkId l : route) ++counts_[l];
}

void LinkMap::add(LinkId l, std::uint64_t n) { counts_[l] += n; }

std::uint64_t LinkMap::count(LinkId l) const {
  auto it = counts_.find(l);
  return it == counts_.end() ? 0 : it->second;
}

LinkMap LinkMap::core_only(const netsim::Topology& t) const {
  LinkMap out;
  for (const auto& [l, n] : counts_)
    if (!t.is_access_link(l)) out.counts_.emplace(l, n);
  return out;
}

Schedule build_schedule(const AttackerConfig& cfg, Rng& rng, SimTime total) {
  if (total <= cfg.recon_duration) {
    throw ConfigError("scenario is too short for the reconnaissance phase");
  }
  Schedule s;
  if (cfg.behavior == Behavior::Aggressive) {
    s.push_back({Phase::Recon, 0, cfg.recon_duration});
    s.push_back({Phase::Attack, cfg.recon_duration, total});
    return s;
  }
  const std::pair<Phase, double> cycle[] = {{Phase::Recon, cfg.stealthy_recon_mean_s},
                                            {Phase::Idle, cfg.stealthy_idle_mean_s},
                                            {Phase::Attack, cfg.stealthy_attack_mean_s}};
  SimTime t = 0;
  while (t < total) {
    for (const auto& [phase, mean] : cycle) {
      if (t >= total) break;
      const auto len = static_cast<SimTime>(std::floor(rng.exponential(mean) * 1e6));
      const SimTime end = std::min(total, t + len);
      if (end > t) s.push_back({phase, t, end});
      t = end;
    }
  }
  return s;
}

std::vector<LinkId> select_target_links(const LinkMap& map, std::size_t k) {
  std::vector<std::pair<LinkId, std::uint64_t>> ranked;
  for (const auto& [l, n] : map.counts())
    if (n > 0) ranked.emplace_back(l, n);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<LinkId> out;
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i) out.push_back(ranked[i].first);
  return out;
}

std::vector<Assignment> assign_decoys(std::span<const NodeId> bots,
                                      std::span<const LinkId> targets,
                                      const netsim::RoutingState& state,
                                      std::span<const NodeId> decoys) {
  if (decoys.empty()) throw ConfigError("no decoy servers to assign");
  std::vector<NodeId> order(decoys.begin(), decoys.end());
  std::sort(order.begin(), order.end());
  std::vector<Assignment> out;
  for (std::size_t i = 0; i < bots.size(); ++i) {
    std::size_t best_hits = 0;
    NodeId best = order[i % order.size()];
    for (NodeId d : order) {
      const auto& links = state.route(bots[i], d).links;
      const auto hits = static_cast<std::size_t>(std::count_if(links.begin(), links.end(), [&](LinkId l) {
        return std::find(targets.begin(), targets.end(), l) != targets.end();
      }));
      if (hits > best_hits) {
        best_hits = hits;
        best = d;
      }
    }
    out.push_back({bots[i], best});
  }
  return out;
}

void schedule_recon(netsim::Simulator& sim, std::span<const NodeId> bots, NodeId target,
                    SimTime start, SimTime end, SimTime interval, LinkMap& map) {
  if (interval <= 0) throw ConfigError("probe interval must be positive");
  const auto n = static_cast<SimTime>(bots.size());
  for (SimTime i = 0; i < n; ++i) {
    const NodeId bot = bots[static_cast<std::size_t>(i)];
    for (SimTime t = start + i * interval / n; t < end; t += interval) {
      sim.schedule(t, [&sim, &map, bot, target] { map.add(sim.traceroute(bot, target)); });
    }
  }
}

LinkMap run_recon(netsim::Simulator& sim, std::span<const NodeId> bots, NodeId target,
                  SimTime duration, SimTime interval) {
  if (duration <= 0) throw ConfigError("recon duration must be positive");
  LinkMap map;
  const SimTime start = sim.now();
  schedule_recon(sim, bots, target, start, start + duration, interval, map);
  sim.run(start + duration);
  return map;
}

std::vector<netsim::FlowId> run_attack_phase(netsim::Simulator& sim,
                                             std::span<const Assignment> assignment,
                                             std::span<const double> rates_pps,
                                             std::uint32_t pkt_size, SimTime start, SimTime end) {
  if (rates_pps.size() != assignment.size()) throw ConfigError("one rate per bot required");
  std::vector<netsim::FlowId> flows;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    flows.push_back(sim.inject_flow({assignment[i].bot, assignment[i].decoy, rates_pps[i], pkt_size,
                                     start, end, netsim::PacketKind::Regular}));
  }
  return flows;
}

void AttackPlan::write_schedule_csv(std::ostream& out) const {
  out << "phase,start_s,end_s\n";
  for (const auto& p : schedule) {
    out << fmt::format("{},{},{}\n", to_string(p.phase), netsim::to_seconds(p.start),
                       netsim::to_seconds(p.end));
  }
}

void AttackPlan::write_assignment_csv(std::ostream& out, const netsim::Topology& t) const {
  out << "time_s,bot_id,decoy_id,target_links\n";
  for (const auto& r : retargets) {
    const auto links = fmt::format("{}", fmt::join(r.targets, ";"));
    for (const auto& a : r.assignment) {
      out << fmt::format("{},{},{},{}\n", netsim::to_seconds(r.time), t.node(a.bot).name,
                         t.node(a.decoy).name, links);
    }
  }
}

Attacker::Attacker(AttackerConfig cfg, std::vector<NodeId> bots, NodeId target,
                   std::vector<NodeId> decoys, std::uint64_t seed, std::uint64_t schedule_seed)
    : cfg_(cfg),
      bots_(std::move(bots)),
      target_(target),
      decoys_(std::move(decoys)),
      rng_(seed),
      schedule_rng_(schedule_seed) {
  if (bots_.empty()) throw ConfigError("attacker needs at least one bot");
  if (decoys_.empty()) throw ConfigError("attacker needs at least one decoy server");
  for (std::size_t i = 0; i < bots_.size(); ++i) {
    plan_.bot_rates.push_back(cfg_.bot_rate_pps * (1.0 - cfg_.rate_spread * rng_.uniform()));
  }
}

void Attacker::retarget(netsim::Simulator& sim) {
  Retarget r;
  r.time = sim.now();
  r.targets = select_target_links(map_.core_only(sim.topology()), cfg_.target_link_count);
  r.assignment = assign_decoys(bots_, r.targets, sim.routing(), decoys_);
  plan_.retargets.push_back(std::move(r));
}

void Attacker::install(netsim::Simulator& sim, SimTime total) {
  plan_.schedule = build_schedule(cfg_, schedule_rng_, total);
  for (const auto& span : plan_.schedule) {
    switch (span.phase) {
      case Phase::Recon:
        schedule_recon(sim, bots_, target_, span.start, span.end, cfg_.probe_interval, map_);
        sim.schedule(span.end, [this, &sim] { retarget(sim); });
        break;
      case Phase::Idle:
        break;
      case Phase::Attack:
        sim.schedule(span.start, [this, &sim, span] {
          if (plan_.retargets.empty()) retarget(sim);
          run_attack_phase(sim, plan_.retargets.back().assignment, plan_.bot_rates, cfg_.pkt_size,
                           span.start, span.end);
        });
        break;
    }
  }
}

}  // namespace rrmgame::attack
