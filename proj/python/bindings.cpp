#include <pybind11/pybind11.h>
#include <pybind11/operators.h>
#include <pybind11/stl.h>

#include <sstream>

#include "rrmgame/belief.hpp"
#include "rrmgame/equilibrium.hpp"
#include "rrmgame/error.hpp"
#include "rrmgame/harness.hpp"

namespace py = pybind11;
using namespace rrmgame;

namespace {

py::dict report_dict(const MetricsReport& r) {
  py::dict d;
  d["scenario_id"] = r.scenario_id;
  d["strategy"] = r.strategy;
  d["attacker_behavior"] = r.attacker_behavior;
  d["attacker_capability"] = r.attacker_capability;
  d["seed"] = r.seed;
  d["total"] = r.total;
  d["delivered"] = r.delivered;
  d["dropped"] = r.dropped;
  d["dropped_update"] = r.dropped_update;
  d["loss_pct"] = r.loss_pct;
  d["avg_delay_us"] = r.avg_delay_us;
  d["mutation_count"] = r.mutation_count;
  return d;
}

}  // namespace

PYBIND11_MODULE(_rrmgame, m) {
  m.doc() = "Signaling game and network simulator for route mutation against Crossfire attacks.";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  auto config = py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
  py::register_exception<ParseError>(m, "ParseError", config.ptr());
  py::register_exception<DomainError>(m, "DomainError", error.ptr());
  py::register_exception<DegenerateGameError>(m, "DegenerateGameError", error.ptr());
  py::register_exception<LookupError>(m, "LookupError", error.ptr());
  py::register_exception<RoutingError>(m, "RoutingError", error.ptr());

  py::enum_<SenderType>(m, "SenderType")
      .value("BOT", SenderType::Bot)
      .value("LEGITIMATE", SenderType::Legitimate);
  py::enum_<SenderAction>(m, "SenderAction")
      .value("RECON", SenderAction::Recon)
      .value("REGULAR", SenderAction::Regular);
  py::enum_<DefenderAction>(m, "DefenderAction")
      .value("MUTATE", DefenderAction::Mutate)
      .value("NO_MUTATE", DefenderAction::NoMutate);

  py::class_<PayoffParams>(m, "PayoffParams")
      .def(py::init(&PayoffParams::make), py::arg("alpha") = 3.0, py::arg("beta") = 0.0,
           py::arg("delta") = 9.0, py::arg("lambda_") = 2.3, py::arg("c") = 1.6, py::arg("f") = 1.0)
      .def_static("reference", &PayoffParams::reference)
      .def_readonly("alpha", &PayoffParams::alpha)
      .def_readonly("beta", &PayoffParams::beta)
      .def_readonly("delta", &PayoffParams::delta)
      .def_readonly("lambda_", &PayoffParams::lambda)
      .def_readonly("c", &PayoffParams::c)
      .def_readonly("f", &PayoffParams::f)
      .def(py::self == py::self)
      .def("__repr__", [](const PayoffParams& p) {
        std::ostringstream s;
        s << "PayoffParams(alpha=" << p.alpha << ", beta=" << p.beta << ", delta=" << p.delta
          << ", lambda_=" << p.lambda << ", c=" << p.c << ", f=" << p.f << ")";
        return s.str();
      });

  m.def("sender_payoff", &sender_payoff);
  m.def("defender_payoff", &defender_payoff);
  m.def("expected_defender_payoff", &expected_defender_payoff);
  m.def("best_response_defender", &best_response_defender);

  m.def("theta_star", &theta_star);
  m.def("theta_star_quoted_form", &theta_star_quoted_form);
  m.def("lambda_star", &lambda_star);
  m.def("classify_pbne", [](const PayoffParams& p, double theta) {
    std::vector<std::string> out;
    for (auto l : classify_pbne(p, theta)) out.emplace_back(to_string(l));
    return out;
  });
  m.def(
      "enumerate_pbne",
      [](const PayoffParams& p, double theta, double step) {
        std::vector<std::string> out;
        for (const auto& e : enumerate_pbne_bruteforce(p, theta, step)) out.push_back(e.profile.label());
        return out;
      },
      py::arg("params"), py::arg("theta"), py::arg("step") = kDefaultBeliefGridStep);

  py::class_<BeliefWeights>(m, "BeliefWeights")
      .def(py::init([](double f1, double f2, double f3) {
             BeliefWeights w{f1, f2, f3};
             w.validate();
             return w;
           }),
           py::arg("f1") = 0.9, py::arg("f2") = 0.09, py::arg("f3") = 0.01)
      .def_readonly("f1", &BeliefWeights::f1)
      .def_readonly("f2", &BeliefWeights::f2)
      .def_readonly("f3", &BeliefWeights::f3);

  py::class_<BeliefLedger>(m, "BeliefLedger")
      .def(py::init([](const std::vector<ClientId>& clients, double initial, const BeliefWeights& w) {
             return BeliefLedger(clients, initial, w);
           }),
           py::arg("clients"), py::arg("initial") = 0.0, py::arg("weights") = BeliefWeights{})
      .def("observe", &BeliefLedger::observe)
      .def("theta", &BeliefLedger::theta)
      .def("observations", &BeliefLedger::observations)
      .def("network_average", &BeliefLedger::network_average)
      .def("__len__", &BeliefLedger::population)
      .def("__contains__", &BeliefLedger::contains);

  m.def(
      "verify_equilibria",
      [](std::size_t samples, std::uint64_t seed) {
        const auto c = verify_equilibria(samples, seed);
        py::dict d;
        d["samples"] = c.samples;
        d["mismatches"] = c.mismatches.size();
        d["pooling_gg_found"] = c.pooling_gg_found;
        d["separating_gn_found"] = c.separating_gn_found;
        d["equilibria_found"] = c.equilibria_found;
        d["passed"] = c.passed();
        return d;
      },
      py::arg("samples") = 1000, py::arg("seed") = 42);

  m.def(
      "run_scenario",
      [](const std::string& text, const std::map<std::string, std::string>& overrides) {
        auto cfg = parse_scenario_text(text);
        for (const auto& [k, v] : overrides) set_option(cfg, k, v);
        cfg.validate();
        ScenarioRun run;
        {
          py::gil_scoped_release release;
          run = run_scenario(cfg);
        }
        return report_dict(run.report);
      },
      py::arg("text"), py::arg("overrides") = std::map<std::string, std::string>{},
      "Parse scenario text, apply key=value overrides and run it; returns the metrics report.");
}
