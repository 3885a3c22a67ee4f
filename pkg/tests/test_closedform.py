"""Closed-form evaluators on the balanced line kappa = -lam: moment
integrals, the clock map, blowup-time classification and exact identities.

The literal targets below were frozen from direct quadrature of the
defining integrals, independent of this package's code paths.
"""

import math

import numpy as np
import pytest

from gmhdlab import (
    ConfigError,
    DomainError,
    Lbar,
    Lbar0_quadratic,
    Lbar1_quadratic,
    PolyData,
    RegimeError,
    TauMap,
    jac_along,
    jac_origin_lam1_asymptote,
    make_context,
    omega_ode_residual,
    omega_solution,
    parse_preset,
    t_of_tau,
    tstar,
    ux_along,
    ux_norm_sq,
    zero_params_solution,
)

LN3 = 1.0986122886681098
T_STAR_LAM_1 = 1.6449340668482264  # pi^2 / 6
T_STAR_LAM_075 = 2.814921254412206
T_STAR_LAM_NEG_HALF = 1.8137993642342176
INV_SINH_1 = 0.8509181282393216
UX_MID_T1 = -0.31303528549933124


@pytest.fixture(scope="module")
def ctx1():
    return make_context(1.0, parse_preset("quadratic"))


def test_lbar_quadratic_halfway_values():
    assert Lbar0_quadratic(0.5, 1.0) == pytest.approx(LN3, abs=1e-12)
    assert Lbar1_quadratic(0.5, 1.0) == pytest.approx(4.0 / 3.0, abs=1e-12)
    assert Lbar0_quadratic(0.0, 2.0) == 1.0
    with pytest.raises(RegimeError):
        Lbar0_quadratic(0.5, 0.0)


def test_lbar_adaptive_path_matches_shortcut():
    # zero-padded coefficients defeat the quadratic fast path
    ctx = make_context(1.0, PolyData([0.0, 1.0, -1.0, 0.0, 0.0]))
    assert not ctx.is_quadratic
    assert Lbar(0, 0.5, ctx) == pytest.approx(Lbar0_quadratic(0.5, 1.0), abs=1e-9)
    assert Lbar(1, 0.5, ctx) == pytest.approx(Lbar1_quadratic(0.5, 1.0), abs=1e-9)


def test_lbar_guards(ctx1):
    with pytest.raises(ConfigError):
        Lbar(2, 0.5, ctx1)
    with pytest.raises(DomainError):
        Lbar(0, 1.5, ctx1)  # tau* = 1 for lam = 1


@pytest.mark.parametrize(
    "lam,kind,value,tol",
    [
        (1.0, "finite", T_STAR_LAM_1, 1e-6),
        (0.75, "finite", T_STAR_LAM_075, 3e-6),
        (-0.5, "finite", T_STAR_LAM_NEG_HALF, 2e-6),
        (0.5, "infinite", math.inf, None),
        (0.4, "infinite", math.inf, None),
    ],
)
def test_tstar_classification(lam, kind, value, tol):
    res = tstar(make_context(lam, parse_preset("quadratic")))
    assert res.kind == kind
    if kind == "finite":
        assert abs(res.value - value) < tol
    else:
        assert math.isinf(res.value)


def test_clock_map_roundtrip(ctx1):
    tmap = TauMap(ctx1)
    t = t_of_tau(0.3, ctx1)
    assert tmap.t_of_tau(0.3) == pytest.approx(t, abs=1e-9)
    assert tmap.tau_of_t(t) == pytest.approx(0.3, abs=1e-9)
    assert t_of_tau(0.0, ctx1) == 0.0
    assert np.all(np.diff(tmap.t_nodes) > 0)


def test_state_at_zero_clock(ctx1):
    for a in (0.0, 0.3, 0.8):
        assert jac_along(a, 0.0, ctx1) == 1.0
        assert ux_along(a, 0.0, ctx1) == pytest.approx(1.0 - 2.0 * a, abs=1e-14)
    assert ux_norm_sq(0.0, ctx1) == pytest.approx(1.0 / 3.0, abs=1e-9)


@pytest.mark.parametrize("lam", [1.0, 0.75, -0.5])
def test_slope_jacobian_identity(lam):
    # omega * jac^lam = 1 pointwise along the solution
    ctx = make_context(lam, parse_preset("quadratic"))
    for a in (0.0, 0.3, 0.7):
        tau = 0.5 * ctx.tau_star
        prod = float(omega_solution(a, tau, ctx)) * jac_along(a, tau, ctx) ** lam
        assert abs(prod - 1.0) < 1e-9


@pytest.mark.parametrize("lam,alpha0", [(1.0, 0.25), (0.75, 0.8)])
def test_slope_power_solves_its_second_order_ode(lam, alpha0):
    ctx = make_context(lam, parse_preset("quadratic"))
    assert omega_ode_residual(ctx, alpha0) < 1e-3


def test_origin_asymptote_near_saturation(ctx1):
    tau = 0.999
    ratio = jac_origin_lam1_asymptote(tau) / jac_along(0.0, tau, ctx1)
    assert abs(ratio - 1.0) < 2e-3
    with pytest.raises(DomainError):
        jac_origin_lam1_asymptote(1.0)


def test_zero_params_explicit_values():
    sol = zero_params_solution(parse_preset("quadratic"), [0.25, 0.5, 0.75], 1.0)
    assert sol.jac[1] == pytest.approx(INV_SINH_1, abs=1e-10)
    assert sol.ux[1] == pytest.approx(UX_MID_T1, abs=1e-10)
    assert sol.drop_bound > 0.0
    assert sol.bound_residual(parse_preset("quadratic")) == 0.0


def test_make_context_rejects_zero_lambda():
    with pytest.raises(RegimeError):
        make_context(0.0, parse_preset("quadratic"))


def test_tau_star_sign_conventions():
    quadratic = parse_preset("quadratic")
    # lam > 0 saturates at the slope maximum, lam < 0 at the minimum
    assert make_context(2.0, quadratic).tau_star == pytest.approx(0.5)
    assert make_context(-0.5, quadratic).tau_star == pytest.approx(2.0)
    falling = PolyData([0.0, -1.0])  # slope identically -1
    assert math.isinf(make_context(1.0, falling).tau_star)
    assert make_context(-1.0, falling).tau_star == pytest.approx(1.0)
