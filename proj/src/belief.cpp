#include "rrmgame/belief.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include <fmt/format.h>

#include "rrmgame/error.hpp"

namespace rrmgame {
namespace {

// The running sum is rebuilt periodically so rounding drift cannot accumulate
// over long runs.
constexpr std::uint64_t kResumInterval = 1u << 16;

}  // namespace

void BeliefWeights::validate() const {
  for (double w : {f1, f2, f3}) {
    if (!(w >= 0.0 && w <= 1.0)) throw ConfigError("belief weights must lie in [0, 1]");
  }
  if (std::abs(f1 + f2 + f3 - 1.0) > 1e-12) {
    throw ConfigError("belief weights must sum to 1");
  }
}

BeliefLedger::BeliefLedger(std::span<const ClientId> clients, double initial,
                           BeliefWeights weights)
    : weights_(weights) {
  weights_.validate();
  if (clients.empty()) throw ConfigError("belief ledger needs at least one client");
  if (!(initial >= 0.0 && initial <= 1.0)) throw ConfigError("initial belief must lie in [0, 1]");
  entries_.reserve(clients.size());
  for (ClientId id : clients) {
    if (!index_.emplace(id, entries_.size()).second) {
      throw ConfigError("duplicate client id " + std::to_string(id));
    }
    entries_.push_back({id, initial, 0});
  }
  sum_ = initial * static_cast<double>(entries_.size());
}

std::size_t BeliefLedger::slot(ClientId client) const {
  auto it = index_.find(client);
  if (it == index_.end()) throw LookupError("unknown client " + std::to_string(client));
  return it->second;
}

double BeliefLedger::observe(ClientId client, SenderAction signal) {
  Entry& e = entries_[slot(client)];
  const double indicator = signal == SenderAction::Recon ? 1.0 : 0.0;
  const double avg = network_average();
  const double updated = std::clamp(
      e.theta * weights_.f1 + avg * weights_.f2 + indicator * weights_.f3, 0.0, 1.0);
  sum_ += updated - e.theta;
  e.theta = updated;
  ++e.observations;
  if (++updates_since_resum_ >= kResumInterval) {
    sum_ = 0.0;
    for (const auto& x : entries_) sum_ += x.theta;
    updates_since_resum_ = 0;
  }
  return updated;
}

void BeliefLedger::assign(ClientId client, double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw DomainError("belief must lie in [0, 1]");
  Entry& e = entries_[slot(client)];
  sum_ += theta - e.theta;
  e.theta = theta;
}

double BeliefLedger::theta(ClientId client) const { return entries_[slot(client)].theta; }

std::uint64_t BeliefLedger::observations(ClientId client) const {
  return entries_[slot(client)].observations;
}

double BeliefLedger::network_average() const {
  return std::clamp(sum_ / static_cast<double>(entries_.size()), 0.0, 1.0);
}

std::vector<BeliefLedger::Entry> BeliefLedger::snapshot() const {
  auto out = entries_;
  std::sort(out.begin(), out.end(),
            [](const Entry& a, const Entry& b) { return a.client < b.client; });
  return out;
}

void BeliefLedger::write_csv(std::ostream& out) const {
  out << "client_id,theta,observation_count\n";
  for (const auto& e : snapshot()) {
    out << fmt::format("{},{},{}\n", e.client, e.theta, e.observations);
  }
}

}  // namespace rrmgame
