"""Grid solver: initial-state guards, exact t=0 diagnostics, energy
conservation on the lam = -1/2 line, step order, blowup detection."""

import math

import numpy as np
import pytest

from gmhdlab import (
    BC,
    ConfigError,
    GridSpec,
    Params,
    SERIES_COLUMNS,
    StepControl,
    Verdict,
    ZeroData,
    compute_I,
    energy,
    make_initial_state,
    parse_preset,
    run,
)
from gmhdlab.dynamics import estimate_blowup_time
from gmhdlab.errors import ConsistencyError

PI2_OVER_6 = 1.6449340668482264


def _simulate(u0, b0, lam, kappa, bc, n, horizon, **ctrl):
    grid = GridSpec(n, bc)
    state = make_initial_state(parse_preset(u0), parse_preset(b0), grid)
    return run(state, Params(lam, kappa, bc), horizon, StepControl(**ctrl))


def test_initial_state_rejects_incompatible_data():
    per = GridSpec(64, BC.PERIODIC)
    dir_ = GridSpec(64, BC.DIRICHLET)
    with pytest.raises(ConsistencyError):
        make_initial_state(parse_preset("quadratic"), ZeroData(), per)
    with pytest.raises(ConsistencyError):
        make_initial_state(parse_preset("poly:0.1,1,-1"), ZeroData(), dir_)
    with pytest.raises(ConsistencyError):
        make_initial_state(parse_preset("sine:1,0.1"), parse_preset("poly:0.2,0"), dir_)


def test_initial_diagnostics_exact_for_parabola():
    g = GridSpec(65, BC.DIRICHLET)
    st = make_initial_state(parse_preset("quadratic"), ZeroData(), g)
    assert energy(st) == pytest.approx(1.0 / 3.0, abs=1e-14)
    assert compute_I(st, Params(1.0, -1.0)) == pytest.approx(-2.0 / 3.0, abs=1e-14)


def test_energy_conserved_on_collapse_line():
    rec = _simulate("sine:1,0.5", "sine:2,0.1", -0.5, 0.25, BC.PERIODIC, 128, 0.5)
    assert rec.verdict is Verdict.COMPLETED
    assert np.max(np.abs(rec.column("energy_drift"))) < 1e-9
    # the two-sided forcing bounds hold with zero slack on this run
    assert np.max(rec.column("forcing_bound_residual")) <= 1e-12


def test_forcing_bounds_only_defined_on_the_line():
    rec = _simulate("quadratic", "zero", 1.0, -1.0, BC.DIRICHLET, 64, 0.1)
    assert np.all(np.isnan(rec.column("forcing_bound_residual")))


def test_step_halving_shows_fourth_order():
    def final(dt):
        # large cfl pins the step to dt_max on this smooth window
        rec = _simulate("quadratic", "zero", 1.0, -1.0, BC.DIRICHLET, 64, 0.2,
                        dt_max=dt, cfl=100.0)
        return rec.final_state.omega.values

    a, b, c = final(0.02), final(0.01), final(0.005)
    ratio = np.max(np.abs(a - b)) / np.max(np.abs(b - c))
    assert ratio > 12.0


def test_blowup_estimate_matches_exact_time():
    rec = _simulate("quadratic", "zero", 1.0, -1.0, BC.DIRICHLET, 256, 2.0,
                    dt_max=1e-3, m_stop=1e4)
    assert rec.verdict is Verdict.BLOWUP
    assert abs(rec.t_blowup_estimate / PI2_OVER_6 - 1.0) < 1e-2


def test_small_lambda_run_stays_global():
    rec = _simulate("quadratic", "zero", 0.4, -0.4, BC.DIRICHLET, 128, 3.0)
    assert rec.verdict is Verdict.COMPLETED
    sup = rec.column("sup_omega")
    assert sup.max() <= 10.0 * sup[0]


def test_estimate_blowup_time_inverse_linear():
    times = np.linspace(0.0, 2.0, 100)
    extremum = -1.0 / (3.0 - times)
    assert estimate_blowup_time(times, extremum) == pytest.approx(3.0, abs=1e-9)


def test_estimate_blowup_time_refuses_decay():
    times = np.linspace(0.0, 2.0, 100)
    assert estimate_blowup_time(times, -np.exp(-times)) is None


def test_zero_data_is_a_fixed_point():
    rec = _simulate("zero", "zero", 1.0, 0.5, BC.DIRICHLET, 64, 0.5)
    assert rec.verdict is Verdict.COMPLETED
    assert np.max(rec.column("sup_omega")) == 0.0
    assert np.max(rec.column("energy")) == 0.0


def test_horizon_landing_and_series_shape():
    rec = _simulate("quadratic", "zero", 1.0, -1.0, BC.DIRICHLET, 64, 0.25)
    assert rec.verdict is Verdict.COMPLETED
    assert rec.final_state.t == pytest.approx(0.25, abs=1e-12)
    assert set(rec.series) == set(SERIES_COLUMNS)
    lengths = {rec.column(name).size for name in SERIES_COLUMNS}
    assert len(lengths) == 1
    assert rec.max_shift < 1e-9


def test_run_rejects_nonpositive_horizon():
    g = GridSpec(64, BC.DIRICHLET)
    st = make_initial_state(parse_preset("quadratic"), ZeroData(), g)
    with pytest.raises(ConfigError):
        run(st, Params(1.0, -1.0), 0.0)


def test_periodic_state_recenters_mean():
    g = GridSpec(64, BC.PERIODIC)
    st = make_initial_state(parse_preset("sine:1,0.3"), ZeroData(), g)
    assert abs(st.omega.values.sum()) < 1e-12
    # velocity is the zero-mean antiderivative of the slope
    assert abs(st.u.values.sum() / g.n) < 1e-12


def test_regime_tags():
    assert "conserved-energy" in Params(-0.5, 0.2).regime_tags()
    assert "power-jacobian" in Params(0.75, -0.75).regime_tags()
    assert "pure-transport" in Params(0.0, 0.0).regime_tags()
    assert Params(2.0, 0.3).regime_tags() == ()
