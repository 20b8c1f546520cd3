import os
import pathlib

import pytest

import rrmgame

SCENARIOS = pathlib.Path(os.environ.get("RRMGAME_SCENARIO_DIR", pathlib.Path(__file__).parents[2] / "scenarios"))


def test_thresholds_at_reference():
    p = rrmgame.PayoffParams.reference()
    assert rrmgame.lambda_star(p) == pytest.approx(1.6)
    assert rrmgame.theta_star(p) == pytest.approx(10.6 / 11.3)
    assert rrmgame.theta_star_quoted_form(p) == pytest.approx(10.6 / 15.9)


def test_forms_coincide_when_alpha_is_one():
    p = rrmgame.PayoffParams(alpha=1.0, delta=2.0, lambda_=0.5, c=0.7, f=3.0)
    assert rrmgame.theta_star(p) == pytest.approx(rrmgame.theta_star_quoted_form(p))


def test_classification_matches_enumeration():
    p = rrmgame.PayoffParams.reference()
    for theta in (0.1, 0.5, 0.95):
        assert len(rrmgame.classify_pbne(p, theta)) == len(rrmgame.enumerate_pbne(p, theta))


def test_invalid_params_raise():
    with pytest.raises(rrmgame.ConfigError):
        rrmgame.PayoffParams(f=0.5)
    with pytest.raises(rrmgame.Error):
        rrmgame.PayoffParams(f=0.5)


def test_belief_update():
    ledger = rrmgame.BeliefLedger([1, 2])
    assert ledger.observe(2, rrmgame.SenderAction.RECON) == pytest.approx(0.01)
    assert ledger.theta(1) == 0.0
    assert 2 in ledger and 3 not in ledger
    with pytest.raises(rrmgame.LookupError):
        ledger.theta(3)


def test_verify_equilibria():
    r = rrmgame.verify_equilibria(200, 42)
    assert r["passed"] and r["samples"] == 200


def test_run_scenario_is_deterministic():
    text = "seed=3\nstrategy=periodic:30\n"
    a = rrmgame.run_scenario(text, {"duration_s": "60"})
    b = rrmgame.run_scenario(text, {"duration_s": "60"})
    assert a == b
    assert a["total"] == a["delivered"] + a["dropped"]
    assert a["mutation_count"] == 2


def test_scenario_file_parse_error():
    with pytest.raises(rrmgame.ParseError):
        rrmgame.run_scenario("seed=1\nf=0.5\n")
    assert (SCENARIOS / "overhead.ini").exists()
