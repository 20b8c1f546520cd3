#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rrmgame/belief.hpp"
#include "rrmgame/game.hpp"
#include "rrmgame/netsim/topology.hpp"

namespace rrmgame {

using netsim::SimTime;

struct NoDefense {
  friend bool operator==(const NoDefense&, const NoDefense&) = default;
};

struct PeriodicRrm {
  SimTime period = 60 * netsim::kMicrosPerSecond;
  friend bool operator==(const PeriodicRrm&, const PeriodicRrm&) = default;
};

struct StrategicRrm {
  PayoffParams params;
  BeliefWeights weights;
  /// Length of one unit of the mutation frequency f; the evaluation period
  /// is time_unit / f.
  SimTime time_unit = 60 * netsim::kMicrosPerSecond;
  double initial_belief = 0.0;
  /// Only act in epochs that saw at least one reconnaissance packet.
  bool recon_gated = true;

  SimTime period() const;
  friend bool operator==(const StrategicRrm&, const StrategicRrm&) = default;
};

using DefenseStrategy = std::variant<NoDefense, PeriodicRrm, StrategicRrm>;

/// "none", "periodic:<seconds>", "strategic".
std::string describe(const DefenseStrategy& s);

/// Throws ConfigError on non-positive periods or invalid game parameters.
void validate(const DefenseStrategy& s);

/// Evaluation period, or nullopt for NoDefense.
std::optional<SimTime> evaluation_period(const DefenseStrategy& s);

enum class Trigger { None, Periodic, LambdaCondition, ThetaCondition };

std::string_view to_string(Trigger t);

struct DefenseDecision {
  bool mutate = false;
  Trigger trigger = Trigger::None;
  std::optional<ClientId> client;  // set for ThetaCondition

  std::string trigger_label() const;
};

struct DecisionRecord {
  SimTime time = 0;
  std::uint64_t epoch = 0;
  DefenseDecision decision;
  std::optional<double> max_theta;
  std::optional<double> theta_star;
  std::optional<double> lambda;
  std::optional<double> lambda_star;
};

/// Runs one defense policy against the packets the network observes.
class Defender {
 public:
  /// hosts: every sender the defender keeps a belief about.
  Defender(DefenseStrategy strategy, std::span<const ClientId> hosts);

  const DefenseStrategy& strategy() const { return strategy_; }

  /// Strategic only: updates the sender's belief and notes reconnaissance.
  /// Unknown senders are ignored.
  void on_packet(ClientId client, SenderAction signal, SimTime now);

  /// Must be called once per evaluation period; never for NoDefense.
  DefenseDecision on_epoch_boundary(SimTime now);

  std::uint64_t epoch() const { return epoch_; }
  std::uint64_t mutation_count() const { return mutations_; }
  const std::set<ClientId>& recon_this_epoch() const { return recon_; }
  const std::vector<DecisionRecord>& decisions() const { return log_; }
  /// Null unless strategic.
  const BeliefLedger* ledger() const { return ledger_ ? &*ledger_ : nullptr; }

  /// sim_time_s,epoch_n,mutate,trigger,max_theta,theta_star,lambda,lambda_star
  void write_decisions_csv(std::ostream& out) const;

 private:
  DefenseStrategy strategy_;
  std::optional<BeliefLedger> ledger_;
  std::set<ClientId> recon_;
  std::uint64_t epoch_ = 1;
  std::uint64_t mutations_ = 0;
  std::vector<DecisionRecord> log_;
};

}  // namespace rrmgame
