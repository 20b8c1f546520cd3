#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rrmgame/attacker.hpp"
#include "rrmgame/defense.hpp"
#include "rrmgame/game.hpp"
#include "rrmgame/netsim/routing.hpp"
#include "rrmgame/netsim/topology.hpp"

namespace rrmgame {

struct AttackerModel {
  attack::Behavior behavior = attack::Behavior::Aggressive;
  attack::Capability capability = attack::Capability::Strong;
  friend bool operator==(const AttackerModel&, const AttackerModel&) = default;
};

/// "none" or "<decent|strong>-<stealthy|aggressive>".
std::optional<AttackerModel> parse_attacker_model(const std::string& s);
std::string describe(const std::optional<AttackerModel>& m);

/// "none", "periodic:<seconds>" or "strategic"; strategic takes its game
/// parameters from `base`.
DefenseStrategy parse_strategy(const std::string& s, const StrategicRrm& base);

struct ScenarioConfig {
  // [scenario]
  std::string id = "scenario";
  std::optional<std::uint64_t> seed;
  double duration_s = 600.0;
  double bucket_s = 10.0;
  double drain_s = 5.0;

  // [network]
  std::string topology = "builtin";
  std::uint32_t n_clients = 8;
  netsim::LinkDefaults links;
  netsim::SimTime update_duration_us = 50'000;
  netsim::MutationMode mutation_mode = netsim::MutationMode::OptimalSizeOnly;
  std::uint32_t k_paths = 8;

  // [traffic]
  double client_rate_pps = 100.0;
  std::uint32_t pkt_size = 1000;

  // [attacker]
  std::optional<AttackerModel> attacker;
  attack::AttackerConfig attack;
  /// Defaults to the client rate.
  std::optional<double> bot_rate_pps;

  // [defense]
  std::string strategy = "none";
  double time_unit_s = 60.0;
  bool recon_gated = true;
  double initial_belief = 0.0;

  // [game]
  PayoffParams game;
  BeliefWeights weights;

  /// Throws ConfigError on any out-of-range value or a missing seed.
  void validate() const;

  DefenseStrategy defense() const;
  std::uint64_t seed_value() const;
  /// Attacker settings with behavior, capability and bot rate resolved.
  attack::AttackerConfig attacker_config() const;
};

/// Line-oriented key=value with [section] headers and '#' comments. Keys
/// before the first header are looked up across all sections. Throws
/// ParseError naming the line for unknown keys or bad values, ConfigError
/// for a missing seed or cross-field violations.
ScenarioConfig parse_scenario_text(const std::string& text);
ScenarioConfig parse_scenario(const std::string& path);

/// Applies one key=value (section optional) to a config.
void set_option(ScenarioConfig& cfg, const std::string& key, const std::string& value,
                const std::string& section = "");

/// Canonical text form; parse_scenario_text(to_text(c)) reproduces c.
std::string to_text(const ScenarioConfig& cfg);

struct Bucket {
  double start_s = 0.0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  double avg_delay_us = 0.0;
};

/// Legitimate-client regular traffic created during the scenario.
struct MetricsReport {
  std::string scenario_id;
  std::string strategy;
  std::string attacker_behavior = "none";
  std::string attacker_capability = "none";
  std::uint64_t seed = 0;

  std::uint64_t total = 0;  // delivered + dropped
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  std::uint64_t dropped_update = 0;
  std::uint64_t unresolved = 0;  // still in flight after the drain period
  double loss_pct = 0.0;         // dropped / total, as a fraction
  double avg_delay_us = 0.0;
  std::map<std::string, double> client_delay_us;
  std::uint64_t mutation_count = 0;
  std::vector<Bucket> buckets;

  // Whole network, every packet kind.
  std::uint64_t net_injected = 0;
  std::uint64_t net_dropped_queue = 0;
  std::uint64_t net_dropped_update = 0;
  std::uint64_t events = 0;
};

struct ScenarioRun {
  ScenarioConfig config;
  MetricsReport report;
  std::vector<DecisionRecord> decisions;
  std::optional<attack::AttackPlan> plan;
  std::string decisions_csv;
  std::string schedule_csv;
  std::string assignment_csv;
};

ScenarioRun run_scenario(const ScenarioConfig& cfg);

enum class SweepAxis { Strategy, Period, AttackerModel, Seed };

SweepAxis parse_axis(const std::string& s);

/// Configs for each value in order. Seed values are offsets from the base
/// seed; other axes keep the base seed.
std::vector<ScenarioConfig> sweep_configs(const ScenarioConfig& base, SweepAxis axis,
                                          const std::vector<std::string>& values);

std::vector<MetricsReport> run_sweep(const ScenarioConfig& base, SweepAxis axis,
                                     const std::vector<std::string>& values);

inline constexpr const char* kSummaryHeader =
    "scenario_id,strategy,attacker_behavior,attacker_capability,seed,total_pkts,lost_pkts,"
    "loss_pct,avg_delay_us,mutation_count";

void write_summary_csv(std::ostream& out, const std::vector<MetricsReport>& reports);
/// Inverse of write_summary_csv.
std::vector<MetricsReport> read_summary_csv(std::istream& in);
void write_timeseries_csv(std::ostream& out, const MetricsReport& r);
std::string report_json(const ScenarioRun& run);

struct EquilibriumMismatch {
  std::size_t sample = 0;
  PayoffParams params;
  double theta = 0.0;
  std::vector<std::string> bruteforce;
  std::vector<std::string> classified;
};

struct EquilibriumCheck {
  std::size_t samples = 0;
  std::vector<EquilibriumMismatch> mismatches;
  std::size_t pooling_gg_found = 0;
  std::size_t separating_gn_found = 0;
  std::size_t equilibria_found = 0;

  bool passed() const {
    return mismatches.empty() && pooling_gg_found == 0 && separating_gn_found == 0;
  }
};

/// Random parameter draws; brute-force enumeration against the threshold
/// classification. Throws ConfigError if samples == 0.
EquilibriumCheck verify_equilibria(std::size_t samples, std::uint64_t seed);

/// Same comparison at a single parameter point.
EquilibriumCheck verify_equilibria_at(const PayoffParams& p, double theta);

void write_equilibrium_report(std::ostream& out, const EquilibriumCheck& c);

}  // namespace rrmgame
