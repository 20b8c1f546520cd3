#pragma once

// Pure-strategy perfect Bayesian equilibria of the signaling game: closed-form
// thresholds, the four-row classification, and an exhaustive checker that
// tests every profile against the four PBNE requirements directly.

#include <array>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "rrmgame/game.hpp"

namespace rrmgame {

/// (m(bot), m(legitimate)) and (a(Recon), a(Regular)).
struct StrategyProfile {
  SenderAction bot_signal = SenderAction::Recon;
  SenderAction legit_signal = SenderAction::Recon;
  DefenderAction on_recon = DefenderAction::NoMutate;
  DefenderAction on_regular = DefenderAction::NoMutate;

  SenderAction signal_of(SenderType t) const {
    return t == SenderType::Bot ? bot_signal : legit_signal;
  }
  DefenderAction response_to(SenderAction m) const {
    return m == SenderAction::Recon ? on_recon : on_regular;
  }
  bool pooling() const { return bot_signal == legit_signal; }

  /// e.g. "{(N,G),(R,R-)}".
  std::string label() const;

  /// All 16 profiles in a fixed order.
  static std::array<StrategyProfile, 16> all();

  friend auto operator<=>(const StrategyProfile&, const StrategyProfile&) = default;
};

/// p: belief that a Recon sender is a bot; q: same for Regular.
struct BeliefPair {
  double p = 0.0;
  double q = 0.0;

  double on(SenderAction m) const { return m == SenderAction::Recon ? p : q; }
};

enum class PbneLabel { PBNE1, PBNE2, PBNE3, PBNE4 };

std::string_view to_string(PbneLabel l);

/// The defender/sender profile that each row of the equilibrium table names.
StrategyProfile profile_of(PbneLabel l);

enum class EquilibriumKind { Pooling, Separating };

struct VerifiedEquilibrium {
  StrategyProfile profile;
  BeliefPair beliefs;  // witness; off-path coordinates were searched
  bool p_off_path = false;
  bool q_off_path = false;
  EquilibriumKind kind = EquilibriumKind::Pooling;
};

/// Root of E[Mutate | Recon, theta] = E[NoMutate | Recon, theta]:
/// (delta + c) / (lambda + delta + alpha (1 - 1/f)). May exceed 1.
/// Throws DegenerateGameError when the denominator is not positive.
double theta_star(const PayoffParams& p);

/// (delta + c) / (delta + alpha (1 + lambda - 1/f)), the closed form as it is
/// usually quoted. It agrees with theta_star only when alpha == 1 (or
/// lambda == 0); classification always uses theta_star.
double theta_star_quoted_form(const PayoffParams& p);

/// alpha (1/f - 1) + c.
double lambda_star(const PayoffParams& p);

/// Labels whose conditions hold; both labels of a pair are present at equality.
std::set<PbneLabel> classify_pbne(const PayoffParams& p, double theta);

/// Profiles named by classify_pbne.
std::set<StrategyProfile> classified_profiles(const PayoffParams& p, double theta);

struct Violation {
  int requirement = 0;  // 1..4
  /// R1, R2 and R4 name a signal (information set); R3 names a sender type.
  std::variant<SenderAction, SenderType> subject;

  std::string describe() const;
};

struct Verdict {
  std::vector<Violation> violations;  // ordered by requirement

  bool holds() const { return violations.empty(); }
  bool violates(int requirement) const;
  bool violates(int requirement, SenderType t) const;
  bool violates(int requirement, SenderAction m) const;
};

/// Checks requirements 1-4 for the profile under the given beliefs and prior.
/// Throws DomainError unless 0 < theta < 1.
Verdict verify_profile(const StrategyProfile& profile, const BeliefPair& beliefs,
                       const PayoffParams& p, double theta);

/// Bayes posterior at the information set for m, or nullopt when m is off path.
std::optional<double> bayes_belief(const StrategyProfile& profile, SenderAction m, double theta);

inline constexpr double kDefaultBeliefGridStep = 0.01;

/// Exhaustive search over all 16 profiles; off-path beliefs are searched on
/// the grid {0, step, ..., 1}. Requires 0 < step <= 0.1 and 0 < theta < 1.
std::vector<VerifiedEquilibrium> enumerate_pbne_bruteforce(
    const PayoffParams& p, double theta, double belief_grid_step = kDefaultBeliefGridStep);

}  // namespace rrmgame
