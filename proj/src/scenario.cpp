#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <fmt/format.h>

#include "rrmgame/error.hpp"
#include "rrmgame/harness.hpp"

namespace rrmgame {
namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& v) {
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(x)) {
    throw ConfigError("expected a number, got '" + v + "'");
  }
  return x;
}

std::uint64_t to_uint(const std::string& v) {
  std::uint64_t x = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("expected a non-negative integer, got '" + v + "'");
  }
  return x;
}

std::uint32_t to_u32(const std::string& v) {
  const auto x = to_uint(v);
  if (x > UINT32_MAX) throw ConfigError("value too large: " + v);
  return static_cast<std::uint32_t>(x);
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("expected a boolean, got '" + v + "'");
}

netsim::SimTime us_from_s(double s) { return static_cast<netsim::SimTime>(std::llround(s * 1e6)); }

double positive(double x, const char* what) {
  if (!(x > 0.0)) throw ConfigError(fmt::format("{} must be positive", what));
  return x;
}

using Setter = std::function<void(ScenarioConfig&, const std::string&)>;

struct Key {
  const char* section;
  const char* name;
  Setter set;
};

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      {"scenario", "id",
       [](ScenarioConfig& c, const std::string& v) {
         if (v.empty() || v.find(',') != std::string::npos) {
           throw ConfigError("id must be non-empty and contain no commas");
         }
         c.id = v;
       }},
      {"scenario", "seed", [](ScenarioConfig& c, const std::string& v) { c.seed = to_uint(v); }},
      {"scenario", "duration_s",
       [](ScenarioConfig& c, const std::string& v) { c.duration_s = positive(to_double(v), "duration_s"); }},
      {"scenario", "bucket_s",
       [](ScenarioConfig& c, const std::string& v) { c.bucket_s = positive(to_double(v), "bucket_s"); }},
      {"scenario", "drain_s",
       [](ScenarioConfig& c, const std::string& v) {
         const double x = to_double(v);
         if (x < 0) throw ConfigError("drain_s must be non-negative");
         c.drain_s = x;
       }},

      {"network", "topology", [](ScenarioConfig& c, const std::string& v) { c.topology = v; }},
      {"network", "n_clients",
       [](ScenarioConfig& c, const std::string& v) {
         c.n_clients = to_u32(v);
         if (c.n_clients == 0) throw ConfigError("n_clients must be positive");
       }},
      {"network", "capacity_bps",
       [](ScenarioConfig& c, const std::string& v) {
         c.links.capacity_bps = positive(to_double(v), "capacity_bps");
       }},
      {"network", "prop_delay_us",
       [](ScenarioConfig& c, const std::string& v) {
         c.links.prop_delay_us = static_cast<netsim::SimTime>(to_uint(v));
         if (c.links.prop_delay_us == 0) throw ConfigError("prop_delay_us must be positive");
       }},
      {"network", "queue_pkts",
       [](ScenarioConfig& c, const std::string& v) {
         c.links.queue_pkts = to_u32(v);
         if (c.links.queue_pkts == 0) throw ConfigError("queue_pkts must be positive");
       }},
      {"network", "update_duration_us",
       [](ScenarioConfig& c, const std::string& v) {
         c.update_duration_us = static_cast<netsim::SimTime>(to_uint(v));
       }},
      {"network", "mutation_mode",
       [](ScenarioConfig& c, const std::string& v) {
         if (v == "optimal") {
           c.mutation_mode = netsim::MutationMode::OptimalSizeOnly;
         } else if (v == "any") {
           c.mutation_mode = netsim::MutationMode::AnySize;
         } else {
           throw ConfigError("mutation_mode must be 'optimal' or 'any'");
         }
       }},
      {"network", "k_paths",
       [](ScenarioConfig& c, const std::string& v) {
         c.k_paths = to_u32(v);
         if (c.k_paths < 2) throw ConfigError("k_paths must be at least 2");
       }},

      {"traffic", "client_rate_pps",
       [](ScenarioConfig& c, const std::string& v) {
         c.client_rate_pps = positive(to_double(v), "client_rate_pps");
       }},
      {"traffic", "pkt_size",
       [](ScenarioConfig& c, const std::string& v) {
         c.pkt_size = to_u32(v);
         if (c.pkt_size == 0) throw ConfigError("pkt_size must be positive");
       }},

      {"attacker", "attacker",
       [](ScenarioConfig& c, const std::string& v) { c.attacker = parse_attacker_model(v); }},
      {"attacker", "recon_s",
       [](ScenarioConfig& c, const std::string& v) {
         c.attack.recon_duration = us_from_s(positive(to_double(v), "recon_s"));
       }},
      {"attacker", "target_links",
       [](ScenarioConfig& c, const std::string& v) {
         c.attack.target_link_count = to_u32(v);
         if (c.attack.target_link_count == 0) throw ConfigError("target_links must be positive");
       }},
      {"attacker", "bot_rate_pps",
       [](ScenarioConfig& c, const std::string& v) {
         c.bot_rate_pps = positive(to_double(v), "bot_rate_pps");
       }},
      {"attacker", "rate_spread",
       [](ScenarioConfig& c, const std::string& v) {
         const double x = to_double(v);
         if (!(x >= 0.0 && x < 1.0)) throw ConfigError("rate_spread must be in [0, 1)");
         c.attack.rate_spread = x;
       }},
      {"attacker", "bot_pkt_size",
       [](ScenarioConfig& c, const std::string& v) {
         c.attack.pkt_size = to_u32(v);
         if (c.attack.pkt_size == 0) throw ConfigError("bot_pkt_size must be positive");
       }},
      {"attacker", "probe_interval_s",
       [](ScenarioConfig& c, const std::string& v) {
         c.attack.probe_interval = us_from_s(positive(to_double(v), "probe_interval_s"));
         if (c.attack.probe_interval <= 0) throw ConfigError("probe_interval_s too small");
       }},
      {"attacker", "stealthy_recon_mean_s",
       [](ScenarioConfig& c, const std::string& v) {
         c.attack.stealthy_recon_mean_s = positive(to_double(v), "stealthy_recon_mean_s");
       }},
      {"attacker", "stealthy_idle_mean_s",
       [](ScenarioConfig& c, const std::string& v) {
         c.attack.stealthy_idle_mean_s = positive(to_double(v), "stealthy_idle_mean_s");
       }},
      {"attacker", "stealthy_attack_mean_s",
       [](ScenarioConfig& c, const std::string& v) {
         c.attack.stealthy_attack_mean_s = positive(to_double(v), "stealthy_attack_mean_s");
       }},

      {"defense", "strategy",
       [](ScenarioConfig& c, const std::string& v) {
         parse_strategy(v, StrategicRrm{});
         c.strategy = v;
       }},
      {"defense", "time_unit_s",
       [](ScenarioConfig& c, const std::string& v) {
         c.time_unit_s = positive(to_double(v), "time_unit_s");
       }},
      {"defense", "recon_gated",
       [](ScenarioConfig& c, const std::string& v) { c.recon_gated = to_bool(v); }},
      {"defense", "initial_belief",
       [](ScenarioConfig& c, const std::string& v) {
         const double x = to_double(v);
         require_probability(x, "initial_belief");
         c.initial_belief = x;
       }},

      {"game", "alpha", [](ScenarioConfig& c, const std::string& v) { c.game.alpha = to_double(v); }},
      {"game", "beta", [](ScenarioConfig& c, const std::string& v) { c.game.beta = to_double(v); }},
      {"game", "delta", [](ScenarioConfig& c, const std::string& v) { c.game.delta = to_double(v); }},
      {"game", "lambda", [](ScenarioConfig& c, const std::string& v) { c.game.lambda = to_double(v); }},
      {"game", "c", [](ScenarioConfig& c, const std::string& v) { c.game.c = to_double(v); }},
      {"game", "f", [](ScenarioConfig& c, const std::string& v) { c.game.f = to_double(v); }},
      {"game", "f1", [](ScenarioConfig& c, const std::string& v) { c.weights.f1 = to_double(v); }},
      {"game", "f2", [](ScenarioConfig& c, const std::string& v) { c.weights.f2 = to_double(v); }},
      {"game", "f3", [](ScenarioConfig& c, const std::string& v) { c.weights.f3 = to_double(v); }},
  };
  return table;
}

bool known_section(const std::string& s) {
  return std::any_of(keys().begin(), keys().end(), [&](const Key& k) { return s == k.section; });
}

}  // namespace

std::optional<AttackerModel> parse_attacker_model(const std::string& s) {
  if (s == "none") return std::nullopt;
  const auto dash = s.find('-');
  if (dash == std::string::npos) throw ConfigError("attacker must be 'none' or <capability>-<behavior>");
  const auto cap = s.substr(0, dash);
  const auto beh = s.substr(dash + 1);
  AttackerModel m;
  if (cap == "decent") {
    m.capability = attack::Capability::Decent;
  } else if (cap == "strong") {
    m.capability = attack::Capability::Strong;
  } else {
    throw ConfigError("unknown attacker capability '" + cap + "'");
  }
  if (beh == "stealthy") {
    m.behavior = attack::Behavior::Stealthy;
  } else if (beh == "aggressive") {
    m.behavior = attack::Behavior::Aggressive;
  } else {
    throw ConfigError("unknown attacker behavior '" + beh + "'");
  }
  return m;
}

std::string describe(const std::optional<AttackerModel>& m) {
  if (!m) return "none";
  return fmt::format("{}-{}", attack::to_string(m->capability), attack::to_string(m->behavior));
}

DefenseStrategy parse_strategy(const std::string& s, const StrategicRrm& base) {
  if (s == "none") return NoDefense{};
  if (s == "strategic") return base;
  constexpr std::string_view prefix = "periodic:";
  if (s.rfind(prefix, 0) == 0) {
    const double period = to_double(s.substr(prefix.size()));
    if (!(period > 0.0)) throw ConfigError("mutation period must be positive");
    const auto us = us_from_s(period);
    if (us <= 0) throw ConfigError("mutation period too small");
    return PeriodicRrm{us};
  }
  throw ConfigError("strategy must be none, periodic:<seconds> or strategic, got '" + s + "'");
}

void set_option(ScenarioConfig& cfg, const std::string& key, const std::string& value,
                const std::string& section) {
  const Key* found = nullptr;
  for (const auto& k : keys()) {
    if (key == k.name && (section.empty() || section == k.section)) {
      found = &k;
      break;
    }
  }
  if (!found) {
    throw ConfigError(section.empty() ? "unknown key '" + key + "'"
                                      : "unknown key '" + key + "' in [" + section + "]");
  }
  found->set(cfg, value);
  if (std::string_view(found->section) == "game") {
    if (key == "f1" || key == "f2" || key == "f3") {
      for (double w : {cfg.weights.f1, cfg.weights.f2, cfg.weights.f3}) {
        if (!(w >= 0.0 && w <= 1.0)) throw ConfigError("belief weights must lie in [0, 1]");
      }
    } else {
      cfg.game.validate();
    }
  }
}

ScenarioConfig parse_scenario_text(const std::string& text) {
  ScenarioConfig cfg;
  std::istringstream in(text);
  std::string raw, section;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    try {
      if (line.front() == '[') {
        if (line.back() != ']') throw ConfigError("malformed section header");
        section = trim(std::string_view(line).substr(1, line.size() - 2));
        if (!known_section(section)) throw ConfigError("unknown section [" + section + "]");
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ConfigError("expected key=value");
      const auto key = trim(std::string_view(line).substr(0, eq));
      const auto value = trim(std::string_view(line).substr(eq + 1));
      if (key.empty()) throw ConfigError("empty key");
      set_option(cfg, key, value, section);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(lineno, e.what());
    }
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig parse_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str());
}

void ScenarioConfig::validate() const {
  if (!seed) throw ConfigError("scenario seed is required");
  if (!(duration_s > 0.0) || !(bucket_s > 0.0) || !(drain_s >= 0.0)) {
    throw ConfigError("durations must be positive");
  }
  if (n_clients == 0) throw ConfigError("n_clients must be positive");
  if (k_paths < 2) throw ConfigError("k_paths must be at least 2");
  if (update_duration_us < 0) throw ConfigError("update duration must be non-negative");
  if (!(client_rate_pps > 0.0) || pkt_size == 0) throw ConfigError("client traffic must be positive");
  if (!(time_unit_s > 0.0)) throw ConfigError("time_unit_s must be positive");
  game.validate();
  weights.validate();
  rrmgame::validate(defense());
  if (attacker) {
    const auto a = attacker_config();
    a.validate(client_rate_pps);
    if (us_from_s(duration_s) <= a.recon_duration) {
      throw ConfigError("duration_s must exceed the attacker's recon_s");
    }
  }
}

DefenseStrategy ScenarioConfig::defense() const {
  StrategicRrm base;
  base.params = game;
  base.weights = weights;
  base.time_unit = us_from_s(time_unit_s);
  base.initial_belief = initial_belief;
  base.recon_gated = recon_gated;
  return parse_strategy(strategy, base);
}

std::uint64_t ScenarioConfig::seed_value() const {
  if (!seed) throw ConfigError("scenario seed is required");
  return *seed;
}

attack::AttackerConfig ScenarioConfig::attacker_config() const {
  attack::AttackerConfig a = attack;
  if (attacker) {
    a.behavior = attacker->behavior;
    a.capability = attacker->capability;
  }
  a.bot_rate_pps = bot_rate_pps.value_or(client_rate_pps);
  return a;
}

std::string to_text(const ScenarioConfig& c) {
  std::string s;
  auto line = [&](std::string_view k, const auto& v) { s += fmt::format("{}={}\n", k, v); };
  s += "[scenario]\n";
  line("id", c.id);
  if (c.seed) line("seed", *c.seed);
  line("duration_s", c.duration_s);
  line("bucket_s", c.bucket_s);
  line("drain_s", c.drain_s);
  s += "\n[network]\n";
  line("topology", c.topology);
  line("n_clients", c.n_clients);
  line("capacity_bps", c.links.capacity_bps);
  line("prop_delay_us", c.links.prop_delay_us);
  line("queue_pkts", c.links.queue_pkts);
  line("update_duration_us", c.update_duration_us);
  line("mutation_mode", c.mutation_mode == netsim::MutationMode::AnySize ? "any" : "optimal");
  line("k_paths", c.k_paths);
  s += "\n[traffic]\n";
  line("client_rate_pps", c.client_rate_pps);
  line("pkt_size", c.pkt_size);
  s += "\n[attacker]\n";
  line("attacker", describe(c.attacker));
  line("recon_s", netsim::to_seconds(c.attack.recon_duration));
  line("target_links", c.attack.target_link_count);
  if (c.bot_rate_pps) line("bot_rate_pps", *c.bot_rate_pps);
  line("rate_spread", c.attack.rate_spread);
  line("bot_pkt_size", c.attack.pkt_size);
  line("probe_interval_s", netsim::to_seconds(c.attack.probe_interval));
  line("stealthy_recon_mean_s", c.attack.stealthy_recon_mean_s);
  line("stealthy_idle_mean_s", c.attack.stealthy_idle_mean_s);
  line("stealthy_attack_mean_s", c.attack.stealthy_attack_mean_s);
  s += "\n[defense]\n";
  line("strategy", c.strategy);
  line("time_unit_s", c.time_unit_s);
  line("recon_gated", c.recon_gated ? "true" : "false");
  line("initial_belief", c.initial_belief);
  s += "\n[game]\n";
  line("alpha", c.game.alpha);
  line("beta", c.game.beta);
  line("delta", c.game.delta);
  line("lambda", c.game.lambda);
  line("c", c.game.c);
  line("f", c.game.f);
  line("f1", c.weights.f1);
  line("f2", c.weights.f2);
  line("f3", c.weights.f3);
  return s;
}

}  // namespace rrmgame
