#pragma once

// Crossfire-style link flooding. Bots first map the routes toward the target
// with traceroute, pick the links that carry the most of it, then send
// low-rate, ordinary-looking traffic to decoy servers whose routes share
// those links.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rrmgame/netsim/routing.hpp"
#include "rrmgame/netsim/simulator.hpp"
#include "rrmgame/netsim/topology.hpp"
#include "rrmgame/rng.hpp"

namespace rrmgame::attack {

using netsim::LinkId;
using netsim::NodeId;
using netsim::SimTime;

enum class Behavior { Stealthy, Aggressive };
enum class Capability { Decent, Strong };

std::string_view to_string(Behavior b);
std::string_view to_string(Capability c);

/// Decent fields one bot per legitimate client, Strong twice as many.
std::uint32_t bots_for(Capability c, std::uint32_t n_clients);

struct AttackerConfig {
  Behavior behavior = Behavior::Aggressive;
  Capability capability = Capability::Strong;
  SimTime recon_duration = 60 * netsim::kMicrosPerSecond;
  std::uint32_t target_link_count = 3;
  /// Upper bound on each bot's data rate; never above the client rate.
  double bot_rate_pps = 100.0;
  /// Each bot sends at bot_rate * (1 - rate_spread * u), u uniform in [0, 1).
  double rate_spread = 0.05;
  std::uint32_t pkt_size = 1000;
  SimTime probe_interval = netsim::kMicrosPerSecond;
  double stealthy_recon_mean_s = 30.0;
  double stealthy_idle_mean_s = 60.0;
  double stealthy_attack_mean_s = 60.0;

  /// Throws ConfigError on non-positive durations, rates or sizes, or a bot
  /// rate above client_rate_pps.
  void validate(double client_rate_pps) const;
};

/// Observed traceroute coverage per link.
class LinkMap {
 public:
  void add(std::span<const LinkId> route);
  void add(LinkId l, std::uint64_t n);
  std::uint64_t count(LinkId l) const;
  bool empty() const { return counts_.empty(); }
  std::size_t size() const { return counts_.size(); }
  const std::map<LinkId, std::uint64_t>& counts() const { return counts_; }
  /// Copy without links that attach a host.
  LinkMap core_only(const netsim::Topology& t) const;

 private:
  std::map<LinkId, std::uint64_t> counts_;
};

enum class Phase { Recon, Idle, Attack };

std::string_view to_string(Phase p);

struct PhaseSpan {
  Phase phase = Phase::Recon;
  SimTime start = 0;
  SimTime end = 0;
  friend bool operator==(const PhaseSpan&, const PhaseSpan&) = default;
};

using Schedule = std::vector<PhaseSpan>;

/// Aggressive: recon then attack until the end. Stealthy: repeated
/// recon/idle/attack cycles with exponential lengths, truncated at the end.
/// Throws ConfigError unless total > recon_duration.
Schedule build_schedule(const AttackerConfig& cfg, Rng& rng, SimTime total);

/// The k links with the highest counts, ties to the lower link id.
std::vector<LinkId> select_target_links(const LinkMap& map, std::size_t k);

struct Assignment {
  NodeId bot = 0;
  NodeId decoy = 0;
  friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// Each bot gets the decoy whose installed route from it crosses the most
/// target links (ties to the lower decoy id). A bot none of whose decoy
/// routes touches a target is assigned decoys[i mod n] by position.
std::vector<Assignment> assign_decoys(std::span<const NodeId> bots,
                                      std::span<const LinkId> targets,
                                      const netsim::RoutingState& state,
                                      std::span<const NodeId> decoys);

/// Schedules one traceroute per bot every `interval` in [start, end), with
/// bots staggered evenly inside the interval. Results accumulate in `map`,
/// which must outlive the run.
void schedule_recon(netsim::Simulator& sim, std::span<const NodeId> bots, NodeId target,
                    SimTime start, SimTime end, SimTime interval, LinkMap& map);

/// Runs a recon phase of `duration` from the simulator's current time.
LinkMap run_recon(netsim::Simulator& sim, std::span<const NodeId> bots, NodeId target,
                  SimTime duration, SimTime interval = netsim::kMicrosPerSecond);

/// One regular flow per assignment over [start, end).
std::vector<netsim::FlowId> run_attack_phase(netsim::Simulator& sim,
                                             std::span<const Assignment> assignment,
                                             std::span<const double> rates_pps,
                                             std::uint32_t pkt_size, SimTime start, SimTime end);

struct Retarget {
  SimTime time = 0;
  std::vector<LinkId> targets;
  std::vector<Assignment> assignment;
};

struct AttackPlan {
  Schedule schedule;
  std::vector<double> bot_rates;  // parallel to the bot list
  std::vector<Retarget> retargets;

  /// phase,start_s,end_s
  void write_schedule_csv(std::ostream& out) const;
  /// time_s,bot_id,decoy_id,target_links (target links ';'-separated)
  void write_assignment_csv(std::ostream& out, const netsim::Topology& t) const;
};

/// Drives a botnet inside a simulator. Routes from every bot to the target
/// and to every decoy must already be installed.
class Attacker {
 public:
  /// `seed` drives per-bot rates, `schedule_seed` the phase lengths.
  Attacker(AttackerConfig cfg, std::vector<NodeId> bots, NodeId target, std::vector<NodeId> decoys,
           std::uint64_t seed, std::uint64_t schedule_seed);

  /// Builds the schedule and registers all phase callbacks up to `total`.
  void install(netsim::Simulator& sim, SimTime total);

  const AttackerConfig& config() const { return cfg_; }
  const std::vector<NodeId>& bots() const { return bots_; }
  const AttackPlan& plan() const { return plan_; }
  const LinkMap& link_map() const { return map_; }

 private:
  void retarget(netsim::Simulator& sim);

  AttackerConfig cfg_;
  std::vector<NodeId> bots_;
  NodeId target_;
  std::vector<NodeId> decoys_;
  Rng rng_;
  Rng schedule_rng_;
  LinkMap map_;
  AttackPlan plan_;
};

}  // namespace rrmgame::attack
