"""Verification harness: scenario registry, override validation, hypothesis
gating, report determinism and the parameter sweep."""

import json

import numpy as np
import pytest

from gmhdlab import (
    ConfigError,
    SCENARIO_IDS,
    run_scenario,
    scenario_defaults,
    sweep,
)

ALL_IDS = (
    "lemma2.1", "lemma2.2", "thm3.1", "thm4.1", "thm5.1",
    "thm5.2", "thm6.1", "thm7.1", "thm8.1",
)


def test_scenario_registry_is_stable():
    assert SCENARIO_IDS == ALL_IDS
    for sid in ALL_IDS:
        assert scenario_defaults(sid)


def test_defaults_are_copies():
    cfg = scenario_defaults("thm8.1")
    cfg["n"] = 9999
    assert scenario_defaults("thm8.1")["n"] != 9999


def test_unknown_scenario_and_option_rejected():
    with pytest.raises(ConfigError):
        scenario_defaults("thm9.9")
    with pytest.raises(ConfigError):
        run_scenario("thm8.1", {"not_an_option": 1})


# one deliberately violating preset per scenario; every one must come back
# as a hypothesis report, not a crash and not a fabricated pass
VIOLATIONS = [
    ("lemma2.1", {"b0": "sine:1,1"}),  # no zero of the required order
    ("lemma2.2", {"kappas": [0.75]}),  # outside the collapse range
    ("thm3.1", {"kappa": 2.0}),  # leaves the concave regime
    ("thm4.1", {"b0": "bump_m:1,1"}),  # b0 slope alive at the collapse label
    ("thm5.1", {"b0": "sine:1,1"}),  # no zero of the required order
    ("thm5.2", {"lams": [0.5]}),  # mirror regime needs lam < 0
    ("thm6.1", {"b0": "sine:1,0.1"}),  # nonzero b-slope at the wall
    ("thm7.1", {"b0": "scale:-1:sine:1,0.1"}),  # negative b-slope at the label
    ("thm8.1", {"u0": "poly:0.1,1,-1"}),  # violates the wall condition
]


@pytest.mark.parametrize("sid,overrides", VIOLATIONS, ids=[v[0] for v in VIOLATIONS])
def test_violating_preset_reports_unmet_hypotheses(sid, overrides):
    report = run_scenario(sid, overrides)
    assert report.status == "HypothesesUnmet"
    assert report.assertions == []
    assert report.notes and report.notes[0]
    assert not report.passed


def test_report_json_is_deterministic():
    first = run_scenario("thm8.1")
    second = run_scenario("thm8.1")
    assert first.to_json() == second.to_json()
    payload = json.loads(first.to_json())
    assert payload["scenario"] == "thm8.1"
    assert payload["status"] == "ok"
    assert payload["passed"] is True
    assert {c["name"] for c in payload["assertions"]} >= {
        "horizon_reached", "ux_closed_form_err", "jacobian_closed_form_err",
    }


def test_sweep_preserves_order_and_classifies():
    rows = sweep([(1.0, -1.0), (0.4, -0.4)], n=64, horizon=2.5, m_stop=20.0, workers=2)
    assert [(r.lam, r.kappa) for r in rows] == [(1.0, -1.0), (0.4, -0.4)]
    assert rows[0].verdict == "blowup"
    assert rows[0].t_blowup_estimate is not None
    assert rows[1].verdict == "horizon-reached"
    assert all(r.fault is None for r in rows)
    assert all(r.steps > 0 for r in rows)


def test_sweep_captures_row_faults():
    # quadratic data is not periodic-compatible; the row records the fault
    rows = sweep([(1.0, -1.0)], bc="periodic", n=64, horizon=0.5)
    assert rows[0].verdict == "fault"
    assert rows[0].fault.startswith("ConsistencyError")
    assert rows[0].t_blowup_estimate is None


def test_sweep_rejects_empty_input():
    with pytest.raises(ConfigError):
        sweep([])
