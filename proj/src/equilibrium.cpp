#include "rrmgame/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rrmgame/error.hpp"

namespace rrmgame {
namespace {

// Slack for weak inequalities in the requirement checks; parameter draws
// this close to a threshold are treated as ties.
constexpr double kTieTolerance = 1e-12;

double expected_under(SenderAction m, double belief, DefenderAction a, const PayoffParams& p) {
  return belief * defender_payoff(SenderType::Bot, m, a, p) +
         (1.0 - belief) * defender_payoff(SenderType::Legitimate, m, a, p);
}

}  // namespace

std::string StrategyProfile::label() const {
  std::string s = "{(";
  s += short_label(bot_signal);
  s += ',';
  s += short_label(legit_signal);
  s += "),(";
  s += short_label(on_recon);
  s += ',';
  s += short_label(on_regular);
  s += ")}";
  return s;
}

std::array<StrategyProfile, 16> StrategyProfile::all() {
  std::array<StrategyProfile, 16> out{};
  std::size_t i = 0;
  for (auto m1 : kSenderActions)
    for (auto m2 : kSenderActions)
      for (auto aN : kDefenderActions)
        for (auto aG : kDefenderActions) out[i++] = StrategyProfile{m1, m2, aN, aG};
  return out;
}

std::string_view to_string(PbneLabel l) {
  switch (l) {
    case PbneLabel::PBNE1: return "PBNE1";
    case PbneLabel::PBNE2: return "PBNE2";
    case PbneLabel::PBNE3: return "PBNE3";
    case PbneLabel::PBNE4: return "PBNE4";
  }
  return "?";
}

StrategyProfile profile_of(PbneLabel l) {
  using enum SenderAction;
  using enum DefenderAction;
  switch (l) {
    case PbneLabel::PBNE1: return {Recon, Recon, Mutate, NoMutate};
    case PbneLabel::PBNE2: return {Recon, Recon, NoMutate, NoMutate};
    case PbneLabel::PBNE3: return {Recon, Regular, Mutate, NoMutate};
    case PbneLabel::PBNE4: return {Recon, Regular, NoMutate, NoMutate};
  }
  return {};
}

double theta_star(const PayoffParams& p) {
  const double denom = p.lambda + p.delta + p.alpha * (1.0 - 1.0 / p.f);
  if (!(denom > 0.0)) {
    throw DegenerateGameError("theta* undefined: lambda + delta + alpha(1 - 1/f) <= 0");
  }
  return (p.delta + p.c) / denom;
}

double theta_star_quoted_form(const PayoffParams& p) {
  const double denom = p.delta + p.alpha * (1.0 + p.lambda - 1.0 / p.f);
  if (!(denom > 0.0)) {
    throw DegenerateGameError("printed theta* undefined: delta + alpha(1 + lambda - 1/f) <= 0");
  }
  return (p.delta + p.c) / denom;
}

double lambda_star(const PayoffParams& p) { return p.alpha * (1.0 / p.f - 1.0) + p.c; }

std::set<PbneLabel> classify_pbne(const PayoffParams& p, double theta) {
  require_probability(theta, "theta");
  const double ts = theta_star(p);
  const double ls = lambda_star(p);
  std::set<PbneLabel> out;
  if (theta >= ts) out.insert(PbneLabel::PBNE1);
  if (theta <= ts) out.insert(PbneLabel::PBNE2);
  if (p.lambda >= ls) out.insert(PbneLabel::PBNE3);
  if (p.lambda <= ls) out.insert(PbneLabel::PBNE4);
  return out;
}

std::set<StrategyProfile> classified_profiles(const PayoffParams& p, double theta) {
  std::set<StrategyProfile> out;
  for (auto l : classify_pbne(p, theta)) out.insert(profile_of(l));
  return out;
}

std::string Violation::describe() const {
  std::string s = "R" + std::to_string(requirement) + " ";
  if (const auto* t = std::get_if<SenderType>(&subject)) {
    s += std::string(to_string(*t)) + " deviates";
  } else {
    s += "at signal " + std::string(short_label(std::get<SenderAction>(subject)));
  }
  return s;
}

bool Verdict::violates(int requirement) const {
  for (const auto& v : violations)
    if (v.requirement == requirement) return true;
  return false;
}

bool Verdict::violates(int requirement, SenderType t) const {
  for (const auto& v : violations) {
    const auto* s = std::get_if<SenderType>(&v.subject);
    if (v.requirement == requirement && s && *s == t) return true;
  }
  return false;
}

bool Verdict::violates(int requirement, SenderAction m) const {
  for (const auto& v : violations) {
    const auto* s = std::get_if<SenderAction>(&v.subject);
    if (v.requirement == requirement && s && *s == m) return true;
  }
  return false;
}

std::optional<double> bayes_belief(const StrategyProfile& profile, SenderAction m, double theta) {
  const bool bot = profile.bot_signal == m;
  const bool legit = profile.legit_signal == m;
  if (bot && legit) return theta;
  if (bot) return 1.0;
  if (legit) return 0.0;
  return std::nullopt;
}

Verdict verify_profile(const StrategyProfile& profile, const BeliefPair& beliefs,
                       const PayoffParams& p, double theta) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw DomainError("prior theta must lie strictly inside (0, 1)");
  }
  Verdict verdict;

  // R1: a well-formed distribution over types at both information sets.
  for (auto m : kSenderActions) {
    const double b = beliefs.on(m);
    if (!(b >= 0.0 && b <= 1.0)) verdict.violations.push_back({1, m});
  }

  // R2: sequential rationality of the defender at both information sets.
  for (auto m : kSenderActions) {
    const double b = beliefs.on(m);
    if (!(b >= 0.0 && b <= 1.0)) continue;
    const DefenderAction chosen = profile.response_to(m);
    if (expected_under(m, b, chosen, p) + kTieTolerance < expected_under(m, b, other(chosen), p)) {
      verdict.violations.push_back({2, m});
    }
  }

  // R3: no sender type gains strictly by switching its signal.
  for (auto t : kSenderTypes) {
    const SenderAction sent = profile.signal_of(t);
    const double stay = sender_payoff(t, sent, profile.response_to(sent), p);
    const SenderAction alt = other(sent);
    const double deviate = sender_payoff(t, alt, profile.response_to(alt), p);
    if (deviate > stay + kTieTolerance) verdict.violations.push_back({3, t});
  }

  // R4: on-path beliefs follow Bayes' rule.
  for (auto m : kSenderActions) {
    if (auto posterior = bayes_belief(profile, m, theta)) {
      if (std::abs(*posterior - beliefs.on(m)) > kTieTolerance) {
        verdict.violations.push_back({4, m});
      }
    }
  }
  return verdict;
}

std::vector<VerifiedEquilibrium> enumerate_pbne_bruteforce(const PayoffParams& p, double theta,
                                                           double belief_grid_step) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw DomainError("prior theta must lie strictly inside (0, 1)");
  }
  if (!(belief_grid_step > 0.0 && belief_grid_step <= 0.1)) {
    throw DomainError("belief grid step must lie in (0, 0.1]");
  }
  const auto steps = static_cast<int>(std::llround(1.0 / belief_grid_step));
  std::vector<double> grid;
  grid.reserve(steps + 2);
  for (int i = 0; i <= steps; ++i) grid.push_back(std::min(1.0, i * belief_grid_step));
  if (grid.back() < 1.0) grid.push_back(1.0);

  std::vector<VerifiedEquilibrium> found;
  for (const auto& profile : StrategyProfile::all()) {
    const auto on_p = bayes_belief(profile, SenderAction::Recon, theta);
    const auto on_q = bayes_belief(profile, SenderAction::Regular, theta);
    const std::vector<double> p_values = on_p ? std::vector<double>{*on_p} : grid;
    const std::vector<double> q_values = on_q ? std::vector<double>{*on_q} : grid;

    bool done = false;
    for (double pv : p_values) {
      for (double qv : q_values) {
        const BeliefPair beliefs{pv, qv};
        if (verify_profile(profile, beliefs, p, theta).holds()) {
          found.push_back({profile, beliefs, !on_p.has_value(), !on_q.has_value(),
                           profile.pooling() ? EquilibriumKind::Pooling
                                             : EquilibriumKind::Separating});
          done = true;
          break;
        }
      }
      if (done) break;
    }
  }
  return found;
}

}  // namespace rrmgame
