#include "rrmgame/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "rrmgame/equilibrium.hpp"
#include "rrmgame/error.hpp"
#include "rrmgame/netsim/simulator.hpp"
#include "rrmgame/rng.hpp"

namespace rrmgame {

using netsim::NodeId;
using netsim::NodeRole;
using netsim::SimTime;

namespace {

SimTime us_from_s(double s) { return static_cast<SimTime>(std::llround(s * 1e6)); }

struct Tally {
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  double delay_sum = 0.0;
};

double mean(const Tally& t) {
  return t.delivered ? t.delay_sum / static_cast<double>(t.delivered) : 0.0;
}

}  // namespace

ScenarioRun run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const std::uint64_t seed = cfg.seed_value();
  const SimTime duration = us_from_s(cfg.duration_s);
  const SimTime bucket = us_from_s(cfg.bucket_s);
  if (bucket <= 0) throw ConfigError("bucket_s too small");

  std::uint32_t need_bots = 0;
  netsim::Topology topo;
  if (cfg.topology == "builtin") {
    if (cfg.attacker) need_bots = attack::bots_for(cfg.attacker->capability, cfg.n_clients);
    topo = netsim::Topology::builtin_mesh({cfg.n_clients, need_bots, cfg.links});
  } else {
    topo = netsim::Topology::load(cfg.topology);
  }
  const auto clients = topo.nodes_with_role(NodeRole::ClientHost);
  if (clients.empty()) throw ConfigError("topology has no clients");
  std::vector<NodeId> bots;
  if (cfg.attacker) {
    need_bots = attack::bots_for(cfg.attacker->capability, static_cast<std::uint32_t>(clients.size()));
    const auto available = topo.nodes_with_role(NodeRole::BotHost);
    if (available.size() < need_bots) {
      throw ConfigError(fmt::format("attacker needs {} bots, topology has {}", need_bots,
                                    available.size()));
    }
    bots.assign(available.begin(), available.begin() + need_bots);
  }
  const NodeId target = topo.target();
  const auto decoys = topo.nodes_with_role(NodeRole::DecoyServer);

  std::vector<netsim::HostPair> pairs;
  for (NodeId c : clients) pairs.emplace_back(c, target);
  for (NodeId b : bots) {
    pairs.emplace_back(b, target);
    for (NodeId d : decoys) pairs.emplace_back(b, d);
  }
  netsim::Simulator sim(topo, netsim::install_initial_routes(topo, pairs),
                        {cfg.update_duration_us, false, false});

  std::vector<ClientId> hosts(clients.begin(), clients.end());
  hosts.insert(hosts.end(), bots.begin(), bots.end());
  const DefenseStrategy strategy = cfg.defense();
  Defender defender(strategy, hosts);

  Rng traffic_rng(sub_seed(seed, Stream::Traffic));
  Rng mutation_rng(sub_seed(seed, Stream::Mutation));

  std::vector<char> is_client(topo.nodes().size(), 0);
  for (NodeId c : clients) is_client[c] = 1;
  std::vector<Tally> per_client(topo.nodes().size());
  std::vector<Tally> buckets(static_cast<std::size_t>((duration + bucket - 1) / bucket));
  std::uint64_t client_injected = 0;
  std::uint64_t dropped_update = 0;

  auto counted = [&](const netsim::Packet& p) {
    return is_client[p.src] && p.kind == netsim::PacketKind::Regular && p.created < duration;
  };
  auto& obs = sim.observers();
  const bool strategic = std::holds_alternative<StrategicRrm>(strategy);
  obs.on_inject = [&](const netsim::Packet& p, SimTime t) {
    if (counted(p)) ++client_injected;
    if (strategic) defender.on_packet(p.src, netsim::signal_of(p.kind), t);
  };
  obs.on_deliver = [&](const netsim::Packet& p, SimTime t) {
    if (!counted(p)) return;
    const double d = static_cast<double>(t - p.created);
    for (Tally* x : {&per_client[p.src], &buckets[static_cast<std::size_t>(p.created / bucket)]}) {
      ++x->delivered;
      x->delay_sum += d;
    }
  };
  obs.on_drop = [&](const netsim::Packet& p, SimTime, netsim::DropReason why) {
    if (!counted(p)) return;
    ++per_client[p.src].dropped;
    ++buckets[static_cast<std::size_t>(p.created / bucket)].dropped;
    if (why == netsim::DropReason::UpdateWindowOverflow) ++dropped_update;
  };

  const auto interval = static_cast<SimTime>(std::floor(1e6 / cfg.client_rate_pps));
  for (NodeId c : clients) {
    const auto offset = static_cast<SimTime>(traffic_rng.below(static_cast<std::uint64_t>(std::max<SimTime>(interval, 1))));
    if (offset >= duration) continue;
    sim.inject_flow({c, target, cfg.client_rate_pps, cfg.pkt_size, offset, duration,
                     netsim::PacketKind::Regular});
  }

  std::optional<attack::Attacker> attacker;
  if (cfg.attacker) {
    attacker.emplace(cfg.attacker_config(), bots, target, decoys,
                     sub_seed(seed, Stream::Attacker), sub_seed(seed, Stream::Schedule));
    attacker->install(sim, duration);
  }

  if (const auto period = evaluation_period(strategy)) {
    for (SimTime t = *period; t <= duration; t += *period) {
      sim.schedule(t, [&] {
        if (defender.on_epoch_boundary(sim.now()).mutate) {
          sim.mutate(mutation_rng, cfg.mutation_mode, cfg.k_paths);
        }
      });
    }
  }

  sim.run(duration + us_from_s(cfg.drain_s));

  ScenarioRun run;
  run.config = cfg;
  MetricsReport& r = run.report;
  r.scenario_id = cfg.id;
  r.strategy = describe(strategy);
  if (cfg.attacker) {
    r.attacker_behavior = attack::to_string(cfg.attacker->behavior);
    r.attacker_capability = attack::to_string(cfg.attacker->capability);
  }
  r.seed = seed;
  Tally all;
  for (NodeId c : clients) {
    const Tally& t = per_client[c];
    all.delivered += t.delivered;
    all.dropped += t.dropped;
    all.delay_sum += t.delay_sum;
    r.client_delay_us[topo.node(c).name] = mean(t);
  }
  r.delivered = all.delivered;
  r.dropped = all.dropped;
  r.total = all.delivered + all.dropped;
  r.dropped_update = dropped_update;
  r.unresolved = client_injected - r.total;
  r.loss_pct = r.total ? static_cast<double>(r.dropped) / static_cast<double>(r.total) : 0.0;
  r.avg_delay_us = mean(all);
  r.mutation_count = defender.mutation_count();
  for (std::size_t i = 0; i < buckets.size(); ++i) {
    r.buckets.push_back({static_cast<double>(i) * cfg.bucket_s, buckets[i].delivered,
                         buckets[i].dropped, mean(buckets[i])});
  }
  const auto& counters = sim.counters();
  r.net_injected = counters.injected;
  r.net_dropped_queue = counters.dropped_queue;
  r.net_dropped_update = counters.dropped_update;
  r.events = counters.events;

  run.decisions = defender.decisions();
  std::ostringstream dec;
  defender.write_decisions_csv(dec);
  run.decisions_csv = dec.str();
  if (attacker) {
    run.plan = attacker->plan();
    std::ostringstream sch, asg;
    run.plan->write_schedule_csv(sch);
    run.plan->write_assignment_csv(asg, topo);
    run.schedule_csv = sch.str();
    run.assignment_csv = asg.str();
  }
  return run;
}

SweepAxis parse_axis(const std::string& s) {
  if (s == "strategy") return SweepAxis::Strategy;
  if (s == "period") return SweepAxis::Period;
  if (s == "attacker-model") return SweepAxis::AttackerModel;
  if (s == "seed") return SweepAxis::Seed;
  throw ConfigError("sweep axis must be strategy, period, attacker-model or seed");
}

std::vector<ScenarioConfig> sweep_configs(const ScenarioConfig& base, SweepAxis axis,
                                          const std::vector<std::string>& values) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  std::vector<ScenarioConfig> out;
  for (const auto& v : values) {
    ScenarioConfig c = base;
    switch (axis) {
      case SweepAxis::Strategy: set_option(c, "strategy", v, "defense"); break;
      case SweepAxis::Period: set_option(c, "strategy", "periodic:" + v, "defense"); break;
      case SweepAxis::AttackerModel: set_option(c, "attacker", v, "attacker"); break;
      case SweepAxis::Seed: {
        std::uint64_t offset = 0;
        auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), offset);
        if (ec != std::errc() || ptr != v.data() + v.size()) {
          throw ConfigError("seed offsets must be non-negative integers, got '" + v + "'");
        }
        c.seed = base.seed_value() + offset;
        break;
      }
    }
    c.validate();
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<MetricsReport> run_sweep(const ScenarioConfig& base, SweepAxis axis,
                                     const std::vector<std::string>& values) {
  std::vector<MetricsReport> out;
  for (const auto& c : sweep_configs(base, axis, values)) out.push_back(run_scenario(c).report);
  return out;
}

void write_summary_csv(std::ostream& out, const std::vector<MetricsReport>& reports) {
  out << kSummaryHeader << '\n';
  for (const auto& r : reports) {
    out << fmt::format("{},{},{},{},{},{},{},{},{},{}\n", r.scenario_id, r.strategy,
                       r.attacker_behavior, r.attacker_capability, r.seed, r.total, r.dropped,
                       r.loss_pct, r.avg_delay_us, r.mutation_count);
  }
}

std::vector<MetricsReport> read_summary_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kSummaryHeader) {
    throw ConfigError("not a summary CSV (header mismatch)");
  }
  auto uint = [](const std::string& s) {
    std::uint64_t x = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError("bad integer '" + s + "'");
    return x;
  };
  auto real = [](const std::string& s) {
    double x = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError("bad number '" + s + "'");
    return x;
  };
  std::vector<MetricsReport> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 10) throw ParseError(lineno, "expected 10 fields");
    MetricsReport r;
    try {
      r.scenario_id = f[0];
      r.strategy = f[1];
      r.attacker_behavior = f[2];
      r.attacker_capability = f[3];
      r.seed = uint(f[4]);
      r.total = uint(f[5]);
      r.dropped = uint(f[6]);
      r.delivered = r.total - r.dropped;
      r.loss_pct = real(f[7]);
      r.avg_delay_us = real(f[8]);
      r.mutation_count = uint(f[9]);
    } catch (const Error& e) {
      throw ParseError(lineno, e.what());
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_timeseries_csv(std::ostream& out, const MetricsReport& r) {
  out << "bucket_start_s,delivered,dropped,avg_delay_us\n";
  for (const auto& b : r.buckets) {
    out << fmt::format("{},{},{},{}\n", b.start_s, b.delivered, b.dropped, b.avg_delay_us);
  }
}

std::string report_json(const ScenarioRun& run) {
  const auto& r = run.report;
  nlohmann::ordered_json j;
  j["scenario_id"] = r.scenario_id;
  j["seed"] = r.seed;
  j["strategy"] = r.strategy;
  j["attacker"] = {{"behavior", r.attacker_behavior}, {"capability", r.attacker_capability}};
  j["clients"] = {{"total_pkts", r.total},
                  {"delivered_pkts", r.delivered},
                  {"lost_pkts", r.dropped},
                  {"update_window_drops", r.dropped_update},
                  {"unresolved_pkts", r.unresolved},
                  {"loss_pct", r.loss_pct},
                  {"avg_delay_us", r.avg_delay_us},
                  {"per_client_delay_us", r.client_delay_us}};
  j["mutation_count"] = r.mutation_count;
  j["network"] = {{"injected_pkts", r.net_injected},
                  {"queue_overflow_drops", r.net_dropped_queue},
                  {"update_window_drops", r.net_dropped_update},
                  {"events", r.events}};
  auto series = nlohmann::ordered_json::array();
  for (const auto& b : r.buckets) {
    series.push_back({{"bucket_start_s", b.start_s},
                      {"delivered", b.delivered},
                      {"dropped", b.dropped},
                      {"avg_delay_us", b.avg_delay_us}});
  }
  j["timeseries"] = std::move(series);
  if (run.plan) {
    auto targets = nlohmann::ordered_json::array();
    for (const auto& rt : run.plan->retargets) {
      targets.push_back({{"time_s", netsim::to_seconds(rt.time)}, {"links", rt.targets}});
    }
    j["attack_retargets"] = std::move(targets);
  }
  j["config"] = to_text(run.config);
  return j.dump(2) + "\n";
}

namespace {

std::vector<std::string> labels(const std::set<StrategyProfile>& s) {
  std::vector<std::string> out;
  for (const auto& p : s) out.push_back(p.label());
  return out;
}

void compare_at(EquilibriumCheck& check, std::size_t sample, const PayoffParams& p, double theta) {
  std::set<StrategyProfile> brute;
  for (const auto& eq : enumerate_pbne_bruteforce(p, theta)) {
    brute.insert(eq.profile);
    const auto& pr = eq.profile;
    if (pr.bot_signal == SenderAction::Regular && pr.legit_signal == SenderAction::Regular) {
      ++check.pooling_gg_found;
    }
    if (pr.bot_signal == SenderAction::Regular && pr.legit_signal == SenderAction::Recon) {
      ++check.separating_gn_found;
    }
  }
  check.equilibria_found += brute.size();
  const auto classified = classified_profiles(p, theta);
  if (brute != classified) {
    check.mismatches.push_back({sample, p, theta, labels(brute), labels(classified)});
  }
  ++check.samples;
}

}  // namespace

EquilibriumCheck verify_equilibria(std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw ConfigError("samples must be at least 1");
  Rng rng(seed);
  EquilibriumCheck check;
  for (std::size_t i = 0; i < samples; ++i) {
    for (;;) {
      PayoffParams p;
      p.alpha = 10.0 - rng.uniform(0.0, 10.0);
      p.lambda = 10.0 - rng.uniform(0.0, 10.0);
      p.beta = rng.uniform(0.0, 10.0);
      p.delta = rng.uniform(0.0, 10.0);
      p.c = rng.uniform(0.0, 10.0);
      p.f = rng.uniform(1.0, 10.0);
      const double theta = rng.uniform(0.01, 0.99);
      // Knife-edge draws are left to the explicit boundary tests.
      if (std::abs(p.lambda - lambda_star(p)) < 1e-6) continue;
      if (std::abs(theta - theta_star(p)) < 1e-6) continue;
      compare_at(check, i, p, theta);
      break;
    }
  }
  return check;
}

EquilibriumCheck verify_equilibria_at(const PayoffParams& p, double theta) {
  p.validate();
  EquilibriumCheck check;
  compare_at(check, 0, p, theta);
  return check;
}

void write_equilibrium_report(std::ostream& out, const EquilibriumCheck& c) {
  out << fmt::format("samples: {}\n", c.samples);
  out << fmt::format("equilibria found: {}\n", c.equilibria_found);
  out << fmt::format("mismatches: {}\n", c.mismatches.size());
  out << fmt::format("(G,G) pooling found: {}\n", c.pooling_gg_found);
  out << fmt::format("(G,N) separating found: {}\n", c.separating_gn_found);
  for (const auto& m : c.mismatches) {
    const auto& p = m.params;
    out << fmt::format(
        "  sample {}: alpha={} beta={} delta={} lambda={} c={} f={} theta={}\n"
        "    brute force: {}\n    classified:  {}\n",
        m.sample, p.alpha, p.beta, p.delta, p.lambda, p.c, p.f, m.theta,
        fmt::join(m.bruteforce, " "), fmt::join(m.classified, " "));
  }
  out << (c.passed() ? "PASS\n" : "FAIL\n");
}

}  // namespace rrmgame
