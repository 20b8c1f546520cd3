#include <gtest/gtest.h>

#include <sstream>
#include <tuple>

#include "rrmgame/defense.hpp"
#include "rrmgame/equilibrium.hpp"
#include "rrmgame/error.hpp"
#include "rrmgame/rng.hpp"

using namespace rrmgame;
using netsim::seconds;

namespace {

constexpr auto N = SenderAction::Recon;
constexpr auto G = SenderAction::Regular;

const std::vector<ClientId> kHosts{1, 2, 3, 4};

StrategicRrm strategic(PayoffParams p = PayoffParams::reference(), BeliefWeights w = {}) {
  StrategicRrm s;
  s.params = p;
  s.weights = w;
  return s;
}

// Lambda below its threshold, which puts theta* above 1.
PayoffParams low_lambda() { return PayoffParams::make(3, 0, 9, 1.0, 1.6, 1); }

using Trace = std::vector<std::tuple<SimTime, ClientId, SenderAction>>;

std::uint64_t replay(const DefenseStrategy& s, Trace trace, SimTime duration) {
  std::sort(trace.begin(), trace.end());
  Defender d(s, kHosts);
  const SimTime period = *evaluation_period(s);
  std::size_t i = 0;
  for (SimTime t = period; t <= duration; t += period) {
    for (; i < trace.size() && std::get<0>(trace[i]) < t; ++i) {
      d.on_packet(std::get<1>(trace[i]), std::get<2>(trace[i]), std::get<0>(trace[i]));
    }
    d.on_epoch_boundary(t);
  }
  return d.mutation_count();
}

Trace random_trace(Rng& rng, std::size_t n, SimTime duration, double recon_share) {
  Trace t;
  for (std::size_t k = 0; k < n; ++k) {
    t.emplace_back(static_cast<SimTime>(rng.below(static_cast<std::uint64_t>(duration))),
                   kHosts[rng.below(kHosts.size())], rng.uniform() < recon_share ? N : G);
  }
  return t;
}

}  // namespace

TEST(Strategy, DescribeAndPeriods) {
  EXPECT_EQ(describe(NoDefense{}), "none");
  EXPECT_EQ(describe(PeriodicRrm{seconds(60)}), "periodic:60");
  EXPECT_EQ(describe(strategic()), "strategic");
  EXPECT_FALSE(evaluation_period(NoDefense{}).has_value());
  EXPECT_EQ(*evaluation_period(PeriodicRrm{seconds(10)}), seconds(10));
  EXPECT_EQ(*evaluation_period(strategic()), seconds(60));
  EXPECT_EQ(strategic(PayoffParams::make(3, 0, 9, 2.3, 1.6, 4)).period(), seconds(15));
  EXPECT_THROW(validate(PeriodicRrm{0}), ConfigError);
  auto bad = strategic();
  bad.params.f = 0.5;
  EXPECT_THROW(validate(bad), ConfigError);
}

TEST(OnPacket, StrategicUpdatesBeliefAndReconSet) {
  Defender d(strategic(), kHosts);
  d.on_packet(2, N, 10);
  EXPECT_NEAR(d.ledger()->theta(2), 0.01, 1e-15);
  EXPECT_EQ(d.recon_this_epoch(), (std::set<ClientId>{2}));
  d.on_packet(3, G, 11);
  EXPECT_EQ(d.recon_this_epoch(), (std::set<ClientId>{2}));
  d.on_packet(99, N, 12);
  EXPECT_EQ(d.recon_this_epoch().size(), 1u);
}

TEST(OnPacket, OtherStrategiesIgnorePackets) {
  for (DefenseStrategy s : {DefenseStrategy{NoDefense{}}, DefenseStrategy{PeriodicRrm{}}}) {
    Defender d(s, kHosts);
    d.on_packet(1, N, 0);
    EXPECT_TRUE(d.recon_this_epoch().empty());
    EXPECT_EQ(d.ledger(), nullptr);
  }
}

TEST(Epoch, LambdaConditionWithRecon) {
  Defender d(strategic(), kHosts);
  d.on_packet(1, N, 5);
  const auto dec = d.on_epoch_boundary(seconds(60));
  EXPECT_TRUE(dec.mutate);
  EXPECT_EQ(dec.trigger, Trigger::LambdaCondition);
  EXPECT_EQ(dec.trigger_label(), "lambda_condition");
  EXPECT_TRUE(d.recon_this_epoch().empty());
  EXPECT_EQ(d.epoch(), 2u);
}

TEST(Epoch, NoReconNoMutation) {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    auto p = PayoffParams::make(rng.uniform(0.1, 10), rng.uniform(0, 10), rng.uniform(0, 10),
                                rng.uniform(0, 10), rng.uniform(0, 10), rng.uniform(1, 10));
    Defender d(strategic(p, {0, 0, 1}), kHosts);
    for (ClientId c : kHosts) d.on_packet(c, G, 1);
    const auto dec = d.on_epoch_boundary(d.epoch() * strategic(p).period());
    EXPECT_FALSE(dec.mutate);
    EXPECT_EQ(dec.trigger, Trigger::None);
  }
}

TEST(Epoch, PeriodicAlwaysMutates) {
  Defender d(PeriodicRrm{seconds(60)}, kHosts);
  for (int k = 1; k <= 5; ++k) {
    const auto dec = d.on_epoch_boundary(seconds(60) * k);
    EXPECT_TRUE(dec.mutate);
    EXPECT_EQ(dec.trigger, Trigger::Periodic);
  }
  EXPECT_EQ(d.mutation_count(), 5u);
}

TEST(Epoch, NoDefenseIsNeverEvaluated) {
  Defender d(NoDefense{}, kHosts);
  EXPECT_THROW(d.on_epoch_boundary(seconds(60)), DomainError);
  EXPECT_EQ(d.mutation_count(), 0u);
}

TEST(Epoch, ThetaBranchNeverPreemptsLambda) {
  // theta* <= 1 exactly when lambda >= lambda*, so the belief branch cannot
  // fire on its own.
  Rng rng(12);
  for (int i = 0; i < 300; ++i) {
    auto p = PayoffParams::make(rng.uniform(0.1, 10), 0, rng.uniform(0, 10), rng.uniform(0, 10),
                                rng.uniform(0, 10), rng.uniform(1, 10));
    Defender d(strategic(p, {0, 0, 1}), kHosts);
    d.on_packet(3, N, 1);
    const auto dec = d.on_epoch_boundary(strategic(p).period());
    EXPECT_EQ(dec.mutate, p.lambda >= lambda_star(p));
    EXPECT_NE(dec.trigger, Trigger::ThetaCondition);
    EXPECT_EQ(*d.decisions()[0].max_theta, 1.0);
  }
}

TEST(Epoch, LowLambdaNeverMutates) {
  ASSERT_LT(low_lambda().lambda, lambda_star(low_lambda()));
  ASSERT_GT(theta_star(low_lambda()), 1.0);
  Defender d(strategic(low_lambda(), {0, 0, 1}), kHosts);
  for (int k = 1; k <= 10; ++k) {
    for (ClientId c : kHosts) d.on_packet(c, N, seconds(60) * k - 1);
    EXPECT_FALSE(d.on_epoch_boundary(seconds(60) * k).mutate);
  }
}

TEST(Epoch, TriggerLabels) {
  EXPECT_EQ((DefenseDecision{true, Trigger::ThetaCondition, 3}.trigger_label()), "theta_condition(3)");
  EXPECT_EQ((DefenseDecision{true, Trigger::Periodic, std::nullopt}.trigger_label()), "periodic");
  EXPECT_EQ(DefenseDecision{}.trigger_label(), "none");
}

TEST(Epoch, UngatedFollowsLambdaBranch) {
  auto s = strategic();
  s.recon_gated = false;
  Defender d(s, kHosts);
  for (int k = 1; k <= 3; ++k) EXPECT_TRUE(d.on_epoch_boundary(seconds(60) * k).mutate);
}

TEST(Epoch, DecisionCsv) {
  Defender d(strategic(), kHosts);
  d.on_packet(1, N, 5);
  d.on_epoch_boundary(seconds(60));
  d.on_epoch_boundary(seconds(120));
  std::ostringstream out;
  d.write_decisions_csv(out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "sim_time_s,epoch_n,mutate,trigger,max_theta,theta_star,lambda,lambda_star");
  std::getline(in, line);
  EXPECT_TRUE(line.starts_with("60,1,1,lambda_condition,")) << line;
  std::getline(in, line);
  EXPECT_TRUE(line.starts_with("120,2,0,none,")) << line;
}

TEST(Invariants, PeriodicCountIsFloor) {
  for (int period : {7, 10, 30, 60, 61, 600}) {
    EXPECT_EQ(replay(PeriodicRrm{seconds(period)}, {}, seconds(600)),
              static_cast<std::uint64_t>(600 / period));
  }
}

TEST(Invariants, StrategicLegitimateTraceNeverMutates) {
  Rng rng(4);
  for (auto p : {PayoffParams::reference(), low_lambda()}) {
    EXPECT_EQ(replay(strategic(p), random_trace(rng, 5000, seconds(600), 0.0), seconds(600)), 0u);
  }
}

TEST(Invariants, StrategicAtMostOnePerPeriod) {
  Rng rng(6);
  const auto trace = random_trace(rng, 5000, seconds(600), 0.5);
  auto s = strategic();
  EXPECT_LE(replay(s, trace, seconds(600)), 10u);
  s.recon_gated = false;
  EXPECT_EQ(replay(s, trace, seconds(600)), 10u);
}

TEST(Invariants, AddingReconNeverReducesMutations) {
  Rng rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const auto p = trial % 2 ? PayoffParams::reference() : low_lambda();
    const BeliefWeights w = trial % 3 ? BeliefWeights{} : BeliefWeights{0.5, 0.2, 0.3};
    auto trace = random_trace(rng, 400, seconds(600), 0.05);
    const auto before = replay(strategic(p, w), trace, seconds(600));
    for (int k = 0; k < 20; ++k) {
      const auto more = random_trace(rng, 1, seconds(600), 1.0);
      trace.insert(trace.end(), more.begin(), more.end());
    }
    EXPECT_GE(replay(strategic(p, w), trace, seconds(600)), before);
  }
}
