"""Companion ODEs: the two-variable suppression system against its exact
degenerate branch, the Gronwall envelope, the inverse-slope chord bound,
and the lock-stepped magnetic/magnetic-free pair."""

import math

import numpy as np
import pytest

from gmhdlab import (
    PreconditionError,
    RegimeError,
    comparison_scenario,
    integrate_suppression,
    parse_preset,
    riccati_bound_check,
)


def tangent_branch(z0, e0, t):
    """Exact solution of z' = -(z^2 + e0)/2, the w = 0 branch."""
    s = math.sqrt(e0)
    theta0 = math.atan2(z0, s)
    return s * np.tan(theta0 - 0.5 * s * np.asarray(t))


def test_degenerate_branch_matches_tangent_form():
    z0, c2 = 0.3, 0.125
    res = integrate_suppression(z0, 0.0, c2, horizon=4.0)
    assert res.verdict == "completed"
    assert np.all(res.w == 0.0)
    exact = tangent_branch(z0, 2.0 * c2, res.times)
    assert np.max(np.abs(res.z - exact)) < 1e-8
    assert res.w_identity_residual == 0.0
    assert res.envelope_residual == 0.0


def test_degenerate_branch_blowdown_time():
    # z0 = -1, e0 = 1 dives to -inf at exactly t = pi/2
    res = integrate_suppression(-1.0, 0.0, 0.5, horizon=3.0)
    assert res.verdict == "blowdown"
    assert res.t_blowdown_estimate == pytest.approx(math.pi / 2.0, rel=2e-2)


# the decaying envelope needs e0 = 2 c2 <= 1
@pytest.mark.parametrize("c2", [0.3, 0.45])
def test_positive_branch_envelope_and_identity(c2):
    res = integrate_suppression(0.4, 0.3, c2, horizon=3.0)
    assert res.verdict == "completed"
    assert np.all(res.w > 0.0)
    assert res.e0 == pytest.approx(2.0 * c2)
    # W never exceeds W(0) * exp((1 - e0) t)
    assert res.envelope_residual <= 1e-12
    assert res.w_identity_residual < 1e-8


@pytest.mark.parametrize(
    "z0,w0,c2,horizon,dt",
    [
        (0.1, -0.2, 0.1, 1.0, 1e-4),
        (0.1, 0.2, -0.1, 1.0, 1e-4),
        (0.1, 0.2, 0.1, 0.0, 1e-4),
        (0.1, 0.2, 0.1, 1.0, -1e-4),
    ],
)
def test_suppression_preconditions(z0, w0, c2, horizon, dt):
    with pytest.raises(PreconditionError):
        integrate_suppression(z0, w0, c2, horizon, dt=dt)


def test_inverse_slope_chord_is_tight_for_pure_decay():
    # z' = -z^2/2 gives 1/z = 1/m0 + t/2: the chord with zero slack
    m0 = -2.0
    times = np.linspace(0.0, 0.9, 50)
    z = 1.0 / (1.0 / m0 + 0.5 * times)
    res = riccati_bound_check(times, z, m0)
    assert res.t_bound == pytest.approx(1.0)
    assert res.max_residual <= 1e-12


def test_inverse_slope_guards():
    times = np.linspace(0.0, 1.0, 10)
    with pytest.raises(PreconditionError):
        riccati_bound_check(times, -np.ones(10), 0.5)
    z = -np.ones(10)
    z[7] = 0.1
    with pytest.raises(RegimeError):
        riccati_bound_check(times, z, -1.0)


def test_comparison_pair_orders_wall_slopes():
    res = comparison_scenario(
        parse_preset("quadratic"), parse_preset("scale:0.1:bump2:0"),
        n=128, horizon=0.8, dt_max=2e-3,
    )
    assert res.sigma[0] == 0.0  # identical wall slopes at t = 0
    assert res.sigma_min >= -1e-6
    # the slope-norm hypothesis gives out before this horizon; the pair
    # stops there and reports the time instead of raising
    assert res.verdict == "hypothesis_failed"
    assert res.first_violation is not None
    assert res.times[-1] <= res.first_violation + 1e-12
    assert not res.hypothesis_ok


def test_comparison_initial_hypothesis_guards():
    quadratic = parse_preset("quadratic")
    with pytest.raises(PreconditionError):
        # nonzero b-slope at the left wall
        comparison_scenario(quadratic, parse_preset("sine:1,0.1"), n=64, horizon=0.1)
    with pytest.raises(PreconditionError):
        # wall slope below the companion's
        comparison_scenario(parse_preset("scale:0.5:quadratic"),
                            parse_preset("scale:0.1:bump2:0"), n=64, horizon=0.1)
