#pragma once

// Players, signals, actions and payoffs of the Crossfire/route-mutation
// signaling game. The sender is either a bot or a legitimate user; it emits
// a reconnaissance probe or regular traffic; the defender either mutates
// routes or leaves them alone.

#include <string_view>

namespace rrmgame {

enum class SenderType { Bot, Legitimate };
enum class SenderAction { Recon, Regular };
enum class DefenderAction { Mutate, NoMutate };

std::string_view to_string(SenderType t);
std::string_view to_string(SenderAction m);
std::string_view to_string(DefenderAction a);

/// Short game-theoretic labels: N/G for signals, R/R̄ (written "R-") for actions.
std::string_view short_label(SenderAction m);
std::string_view short_label(DefenderAction a);

inline constexpr SenderType kSenderTypes[] = {SenderType::Bot, SenderType::Legitimate};
inline constexpr SenderAction kSenderActions[] = {SenderAction::Recon, SenderAction::Regular};
inline constexpr DefenderAction kDefenderActions[] = {DefenderAction::Mutate,
                                                      DefenderAction::NoMutate};

inline SenderAction other(SenderAction m) {
  return m == SenderAction::Recon ? SenderAction::Regular : SenderAction::Recon;
}
inline DefenderAction other(DefenderAction a) {
  return a == DefenderAction::Mutate ? DefenderAction::NoMutate : DefenderAction::Mutate;
}

/// Scalar game parameters. Validated on construction through make(); the
/// aggregate form exists for designated initialisation followed by validate().
struct PayoffParams {
  double alpha = 3.0;   // attacker gain (packet-loss units)
  double beta = 0.0;    // bot rental cost
  double delta = 9.0;   // cost of misleading legitimate users
  double lambda = 2.3;  // defense gain
  double c = 1.6;       // cost of one route mutation
  double f = 1.0;       // mutation frequency, >= 1

  /// Throws ConfigError unless all fields are finite, alpha > 0, the rest
  /// non-negative and f >= 1.
  void validate() const;

  static PayoffParams make(double alpha, double beta, double delta, double lambda, double c,
                           double f);

  /// Values used for the strategy comparison experiments.
  static PayoffParams reference() { return PayoffParams{}; }

  friend bool operator==(const PayoffParams&, const PayoffParams&) = default;
};

struct PayoffPair {
  double sender = 0.0;
  double defender = 0.0;
};

double sender_payoff(SenderType t, SenderAction m, DefenderAction a, const PayoffParams& p);
double defender_payoff(SenderType t, SenderAction m, DefenderAction a, const PayoffParams& p);
PayoffPair payoffs(SenderType t, SenderAction m, DefenderAction a, const PayoffParams& p);

/// theta * u_d(Bot, m, a) + (1 - theta) * u_d(Legitimate, m, a).
/// Throws DomainError if theta is outside [0, 1].
double expected_defender_payoff(SenderAction m, double theta, DefenderAction a,
                                const PayoffParams& p);

/// Mutate iff its expected payoff is at least that of NoMutate (ties mutate).
DefenderAction best_response_defender(SenderAction m, double theta, const PayoffParams& p);

/// Throws DomainError unless 0 <= x <= 1.
void require_probability(double x, std::string_view what);

}  // namespace rrmgame
