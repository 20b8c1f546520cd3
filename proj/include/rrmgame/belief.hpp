#pragma once

// Per-client suspicion levels. Each observed packet from client y moves its
// belief toward a weighted mix of its previous belief, the network-wide
// average belief, and an indicator of whether the packet was a probe:
//
//   theta_y(x) = theta_y(x-1) F1 + avg_k theta_k(x-1) F2 + A(x) F3
//
// The average runs over every tracked client, y included, using
// pre-update values.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <unordered_map>
#include <vector>

#include "rrmgame/game.hpp"

namespace rrmgame {

using ClientId = std::uint32_t;

struct BeliefWeights {
  double f1 = 0.9;   // previous belief
  double f2 = 0.09;  // network average
  double f3 = 0.01;  // current packet

  /// Throws ConfigError unless all weights are in [0, 1] and sum to 1 (1e-12).
  void validate() const;

  friend bool operator==(const BeliefWeights&, const BeliefWeights&) = default;
};

class BeliefLedger {
 public:
  struct Entry {
    ClientId client;
    double theta;
    std::uint64_t observations;
  };

  /// Throws ConfigError on an empty or duplicated client list, or an invalid
  /// initial belief or weights.
  BeliefLedger(std::span<const ClientId> clients, double initial, BeliefWeights weights);

  /// Applies one update for `client` and returns its new belief.
  /// Throws LookupError for an unknown client.
  double observe(ClientId client, SenderAction signal);

  /// Sets a client's belief directly, e.g. from prior information.
  void assign(ClientId client, double theta);

  double theta(ClientId client) const;
  std::uint64_t observations(ClientId client) const;
  bool contains(ClientId client) const { return index_.contains(client); }

  /// Mean belief over all tracked clients.
  double network_average() const;

  std::size_t population() const { return entries_.size(); }
  const BeliefWeights& weights() const { return weights_; }

  /// Entries sorted by client id.
  std::vector<Entry> snapshot() const;

  /// CSV with header client_id,theta,observation_count.
  void write_csv(std::ostream& out) const;

 private:
  std::size_t slot(ClientId client) const;

  BeliefWeights weights_;
  std::vector<Entry> entries_;
  std::unordered_map<ClientId, std::size_t> index_;
  double sum_ = 0.0;
  std::uint64_t updates_since_resum_ = 0;
};

}  // namespace rrmgame
