"""Acceptance contract: each criterion drives one verification scenario at
its stated tolerance and contributes one pass/fail line to the terminal
summary (see conftest). Tolerances are asserted against the contract values
so config drift cannot silently weaken a criterion."""

import pytest

from gmhdlab import SCENARIO_IDS
from gmhdlab.verify import STATUS_OK


def _named(report, *names):
    by_name = {c.name: c for c in report.assertions}
    missing = [n for n in names if n not in by_name]
    assert not missing, f"missing assertions {missing}; have {sorted(by_name)}"
    return [by_name[n] for n in names]


def _finish(record, num, label, report, checks):
    ok = report.status == STATUS_OK and all(c.passed for c in checks)
    record(num, label, ok)
    assert report.status == STATUS_OK, f"status {report.status}: {report.notes}"
    for c in checks:
        assert c.passed, (
            f"{c.name}: measured {c.measured:.6g} vs tolerance {c.tolerance:.6g}"
        )


def test_criterion_01_exact_blowup_clock(scenarios, record_criterion):
    rep = scenarios.report("thm5.1")
    checks = _named(
        rep, "tstar_quadratic_err", "pde_blowup_detected", "pde_tstar_rel_err"
    )
    assert checks[0].tolerance == 1e-6
    assert checks[2].tolerance == 5e-2
    _finish(record_criterion, 1,
            "exact blowup clock matches the grid detector", rep, checks)


def test_criterion_02_global_vs_blowup_dichotomy(scenarios, record_criterion):
    rep = scenarios.report("thm5.1")
    checks = _named(
        rep,
        "tstar_infinite[lam=0.4]",
        "horizon_reached[lam=0.4]",
        "sup_growth_factor[lam=0.4]",
        "pde_blowup_detected[lam=0.75]",
        "pde_tstar_rel_err[lam=0.75]",
    )
    assert checks[2].tolerance == 10.0
    assert checks[4].tolerance == 5e-2
    _finish(record_criterion, 2,
            "slope exponent splits global existence from blowup", rep, checks)


def test_criterion_03_conserved_energy_window(scenarios, record_criterion):
    rep = scenarios.report("lemma2.2")
    names = []
    for tag in ("[kappa=-1]", "[kappa=0]", "[kappa=0.25]"):
        names += [
            f"blowup_detected{tag}", f"window_completed{tag}",
            f"energy_drift{tag}", f"forcing_bound_slack{tag}",
        ]
    checks = _named(rep, *names)
    for c in checks:
        if c.name.startswith("energy_drift"):
            assert c.tolerance == 1e-6
        if c.name.startswith("forcing_bound_slack"):
            assert c.tolerance == 1e-8
    _finish(record_criterion, 3,
            "energy conserved and forcing bounded up to breakdown", rep, checks)


def test_criterion_04_transport_identities(scenarios, record_criterion):
    rep = scenarios.report("thm8.1")
    checks = _named(
        rep, "horizon_reached", "ux_closed_form_err", "jacobian_closed_form_err",
        "slope_drop_bound_residual", "transport_invariance",
    )
    assert checks[1].tolerance == 1e-6
    assert checks[2].tolerance == 1e-6
    assert checks[3].tolerance == 1e-10
    assert checks[4].tolerance == 1e-6
    _finish(record_criterion, 4,
            "tracked trajectories reproduce the zero-parameter closed form",
            rep, checks)


def test_criterion_05_chord_bound(scenarios, record_criterion):
    rep = scenarios.report("thm3.1")
    checks = _named(
        rep, "chord_bound_residual", "blowup_detected", "detector_stop_ratio"
    )
    assert checks[0].tolerance == 1e-6
    assert checks[2].tolerance == 1.05
    _finish(record_criterion, 5,
            "inverse slope stays under its chord until breakdown", rep, checks)


def test_criterion_06_inverse_slope_line_bound(scenarios, record_criterion):
    rep = scenarios.report("thm4.1")
    checks = _named(
        rep, "inverse_slope_bound_residual", "blowup_detected",
        "detector_stop_ratio", "t_estimate_ratio",
    )
    assert checks[0].tolerance == 1e-6
    assert checks[2].tolerance == 1.05
    assert checks[3].tolerance == 1.10
    _finish(record_criterion, 6,
            "straight-line inverse-slope bound brackets the stop time",
            rep, checks)


def test_criterion_07_trace_lower_bounds(scenarios, record_criterion):
    rep = scenarios.report("lemma2.1")
    names = []
    for kappa in ("-1", "0", "1"):
        for m in ("2", "3"):
            tag = f"[kappa={kappa},m={m}]"
            names += [f"lower_traces_sup{tag}", f"jacorder_residual{tag}"]
    checks = _named(rep, *names)
    for c in checks:
        expected = 1e-6 if c.name.startswith("lower_traces_sup") else 1e-4
        assert c.tolerance == expected
    _finish(record_criterion, 7,
            "nonnegative traces and the order-m Jacobian power law", rep, checks)


def test_criterion_08_magnetic_suppression(scenarios, record_criterion):
    rep = scenarios.report("thm7.1")
    checks = _named(
        rep, "horizon_reached", "b_slope_stays_positive", "ode_completed",
        "ode_envelope_residual", "ode_w_identity_residual",
        "pde_envelope_residual", "ode_vs_pde_slope", "ode_vs_pde_b_slope",
    )
    assert checks[3].tolerance == 1e-6
    assert checks[4].tolerance == 1e-8
    assert checks[5].tolerance == 1e-6
    assert checks[6].tolerance == 2e-2
    assert checks[7].tolerance == 2e-2
    _finish(record_criterion, 8,
            "magnetic coupling keeps the run global under the decaying envelope",
            rep, checks)


def test_criterion_09_companion_ordering(scenarios, record_criterion):
    rep = scenarios.report("thm6.1")
    checks = _named(
        rep, "sigma_negativity", "monitored_window_nonempty",
        "companion_blowup_detected", "companion_tstar_rel_err",
    )
    assert checks[0].tolerance == 1e-6
    assert checks[3].tolerance == 5e-2
    _finish(record_criterion, 9,
            "magnetic slope never exceeds the magnetic-free companion",
            rep, checks)


def test_criterion_10_closed_form_self_consistency(scenarios, record_criterion):
    rep = scenarios.report("thm5.1")
    checks = _named(
        rep, "lbar0_quadrature_agreement", "slope_jacobian_identity",
        "origin_jac_exponent_err[lam=0.75]", "origin_jac_exponent_err[lam=2]",
    )
    assert checks[0].tolerance == 1e-9
    assert checks[1].tolerance == 1e-9
    assert checks[2].tolerance == 5e-2
    assert checks[3].tolerance == 5e-2
    _finish(record_criterion, 10,
            "closed-form identities hold to quadrature accuracy", rep, checks)


@pytest.mark.parametrize("sid", SCENARIO_IDS)
def test_all_scenarios_pass(scenarios, sid):
    rep = scenarios.report(sid)
    assert rep.status == STATUS_OK, f"{sid} status {rep.status}: {rep.notes}"
    failing = [c.name for c in rep.assertions if not c.passed]
    assert not failing, f"{sid} failing assertions: {failing}"
