#include "rrmgame/defense.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "rrmgame/equilibrium.hpp"
#include "rrmgame/error.hpp"

namespace rrmgame {

SimTime StrategicRrm::period() const {
  return static_cast<SimTime>(std::floor(static_cast<double>(time_unit) / params.f));
}

std::string describe(const DefenseStrategy& s) {
  struct {
    std::string operator()(const NoDefense&) const { return "none"; }
    std::string operator()(const PeriodicRrm& p) const {
      return fmt::format("periodic:{}", netsim::to_seconds(p.period));
    }
    std::string operator()(const StrategicRrm&) const { return "strategic"; }
  } v;
  return std::visit(v, s);
}

void validate(const DefenseStrategy& s) {
  if (const auto* p = std::get_if<PeriodicRrm>(&s)) {
    if (p->period <= 0) throw ConfigError("mutation period must be positive");
  } else if (const auto* st = std::get_if<StrategicRrm>(&s)) {
    st->params.validate();
    st->weights.validate();
    if (st->time_unit <= 0) throw ConfigError("time unit must be positive");
    if (st->period() <= 0) throw ConfigError("evaluation period must be positive");
    require_probability(st->initial_belief, "initial belief");
  }
}

std::optional<SimTime> evaluation_period(const DefenseStrategy& s) {
  if (const auto* p = std::get_if<PeriodicRrm>(&s)) return p->period;
  if (const auto* st = std::get_if<StrategicRrm>(&s)) return st->period();
  return std::nullopt;
}

std::string_view to_string(Trigger t) {
  switch (t) {
    case Trigger::None: return "none";
    case Trigger::Periodic: return "periodic";
    case Trigger::LambdaCondition: return "lambda_condition";
    case Trigger::ThetaCondition: return "theta_condition";
  }
  return "?";
}

std::string DefenseDecision::trigger_label() const {
  if (trigger == Trigger::ThetaCondition && client) {
    return fmt::format("theta_condition({})", *client);
  }
  return std::string(to_string(trigger));
}

Defender::Defender(DefenseStrategy strategy, std::span<const ClientId> hosts)
    : strategy_(std::move(strategy)) {
  validate(strategy_);
  if (const auto* st = std::get_if<StrategicRrm>(&strategy_)) {
    ledger_.emplace(hosts, st->initial_belief, st->weights);
  }
}

void Defender::on_packet(ClientId client, SenderAction signal, SimTime) {
  if (!ledger_ || !ledger_->contains(client)) return;
  ledger_->observe(client, signal);
  if (signal == SenderAction::Recon) recon_.insert(client);
}

DefenseDecision Defender::on_epoch_boundary(SimTime now) {
  DecisionRecord rec;
  rec.time = now;
  rec.epoch = epoch_;
  DefenseDecision& d = rec.decision;

  if (std::holds_alternative<NoDefense>(strategy_)) {
    throw DomainError("no evaluation epochs without a defense");
  }
  if (std::holds_alternative<PeriodicRrm>(strategy_)) {
    d = {true, Trigger::Periodic, std::nullopt};
  } else {
    const auto& st = std::get<StrategicRrm>(strategy_);
    const double ls = lambda_star(st.params);
    std::optional<double> ts;
    try {
      ts = theta_star(st.params);
    } catch (const DegenerateGameError&) {
    }
    rec.lambda = st.params.lambda;
    rec.lambda_star = ls;
    rec.theta_star = ts;

    std::optional<std::pair<double, ClientId>> top;
    auto consider = [&](ClientId id) {
      const double th = ledger_->theta(id);
      if (!top || th > top->first) top = {th, id};
    };
    if (st.recon_gated) {
      for (ClientId id : recon_) consider(id);
    } else {
      for (const auto& e : ledger_->snapshot()) consider(e.client);
    }
    if (top) rec.max_theta = top->first;

    const bool open = !st.recon_gated || !recon_.empty();
    if (open && st.params.lambda >= ls) {
      d = {true, Trigger::LambdaCondition, std::nullopt};
    } else if (open && top && ts && top->first >= *ts) {
      d = {true, Trigger::ThetaCondition, top->second};
    }
  }

  if (d.mutate) ++mutations_;
  recon_.clear();
  ++epoch_;
  log_.push_back(rec);
  return d;
}

void Defender::write_decisions_csv(std::ostream& out) const {
  auto opt = [](const std::optional<double>& x) { return x ? fmt::format("{}", *x) : std::string(); };
  out << "sim_time_s,epoch_n,mutate,trigger,max_theta,theta_star,lambda,lambda_star\n";
  for (const auto& r : log_) {
    out << fmt::format("{},{},{},{},{},{},{},{}\n", netsim::to_seconds(r.time), r.epoch,
                       r.decision.mutate ? 1 : 0, r.decision.trigger_label(), opt(r.max_theta),
                       opt(r.theta_star), opt(r.lambda), opt(r.lambda_star));
  }
}

}  // namespace rrmgame
