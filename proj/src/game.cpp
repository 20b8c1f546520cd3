#include "rrmgame/game.hpp"

#include <cmath>
#include <string>

#include "rrmgame/error.hpp"

namespace rrmgame {

std::string_view to_string(SenderType t) {
  return t == SenderType::Bot ? "bot" : "legitimate";
}

std::string_view to_string(SenderAction m) {
  return m == SenderAction::Recon ? "recon" : "regular";
}

std::string_view to_string(DefenderAction a) {
  return a == DefenderAction::Mutate ? "mutate" : "no-mutate";
}

std::string_view short_label(SenderAction m) { return m == SenderAction::Recon ? "N" : "G"; }

std::string_view short_label(DefenderAction a) { return a == DefenderAction::Mutate ? "R" : "R-"; }

void require_probability(double x, std::string_view what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError(std::string(what) + " must lie in [0, 1], got " + std::to_string(x));
  }
}

void PayoffParams::validate() const {
  auto check = [](double v, const char* name) {
    if (!std::isfinite(v)) throw ConfigError(std::string(name) + " must be finite");
    if (v < 0.0) throw ConfigError(std::string(name) + " must be non-negative");
  };
  check(alpha, "alpha");
  check(beta, "beta");
  check(delta, "delta");
  check(lambda, "lambda");
  check(c, "c");
  check(f, "f");
  if (alpha <= 0.0) throw ConfigError("alpha must be positive");
  if (f < 1.0) throw ConfigError("f must be >= 1");
}

PayoffParams PayoffParams::make(double alpha, double beta, double delta, double lambda, double c,
                                double f) {
  PayoffParams p{alpha, beta, delta, lambda, c, f};
  p.validate();
  return p;
}

double sender_payoff(SenderType t, SenderAction m, DefenderAction a, const PayoffParams& p) {
  if (t == SenderType::Legitimate) return 0.0;
  if (m == SenderAction::Regular) return -p.beta;
  return a == DefenderAction::Mutate ? p.alpha / p.f - p.beta : p.alpha - p.beta;
}

double defender_payoff(SenderType t, SenderAction m, DefenderAction a, const PayoffParams& p) {
  if (t == SenderType::Legitimate) {
    return a == DefenderAction::Mutate ? -p.delta - p.c : 0.0;
  }
  if (m == SenderAction::Recon) {
    return a == DefenderAction::Mutate ? p.lambda - p.alpha / p.f - p.c : -p.alpha;
  }
  return a == DefenderAction::Mutate ? -p.c : 0.0;
}

PayoffPair payoffs(SenderType t, SenderAction m, DefenderAction a, const PayoffParams& p) {
  return {sender_payoff(t, m, a, p), defender_payoff(t, m, a, p)};
}

double expected_defender_payoff(SenderAction m, double theta, DefenderAction a,
                                const PayoffParams& p) {
  require_probability(theta, "theta");
  return theta * defender_payoff(SenderType::Bot, m, a, p) +
         (1.0 - theta) * defender_payoff(SenderType::Legitimate, m, a, p);
}

DefenderAction best_response_defender(SenderAction m, double theta, const PayoffParams& p) {
  const double mutate = expected_defender_payoff(m, theta, DefenderAction::Mutate, p);
  const double keep = expected_defender_payoff(m, theta, DefenderAction::NoMutate, p);
  return mutate >= keep ? DefenderAction::Mutate : DefenderAction::NoMutate;
}

}  // namespace rrmgame
