"""Low-dimensional companions to the full solver.

Three pieces live here, each restricted to a single tracked location so
they can serve as independent oracles for the grid solver:

* ``integrate_suppression`` - the two-variable system obeyed by the slope
  pair (u_x, b_x) along the trajectory through a simple zero of b when the
  nonlocal forcing is frozen at -c^2, together with its Gronwall
  functional W and envelope.
* ``riccati_bound_check`` - the inverse-linear lower bound obeyed by a
  negative slope minimum under quadratic damping.
* ``comparison_scenario`` - a lock-stepped pair of grid runs (magnetic
  vs. magnetic-free) sharing one time axis, monitoring the pressure-term
  hypothesis and the sign of their boundary-slope gap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import (
    FieldState,
    Params,
    StepControl,
    _cfl_dt,
    estimate_blowup_time,
    make_initial_state,
    step_rk4,
)
from .errors import ConsistencyError, PreconditionError, RegimeError
from .grid import BC, Field, GridSpec, derivative, quadrature
from .presets import InitialData, PolyData, ZeroData

DEFAULT_DT = 1e-4
STOP_THRESHOLD = 1e8


@dataclass
class SuppressionResult:
    times: np.ndarray
    z: np.ndarray
    w: np.ndarray
    int_z: np.ndarray
    W: np.ndarray
    envelope: np.ndarray
    e0: float
    verdict: str  # completed | blowdown | unbounded
    t_blowdown_estimate: float | None
    w_identity_residual: float

    @property
    def envelope_residual(self) -> float:
        return float(np.max(np.maximum(0.0, self.W - self.envelope))) if self.W.size else 0.0


def _suppression_rhs(z: float, w: float, c2: float) -> tuple[float, float, float]:
    return 0.5 * w * w - 0.5 * z * z - c2, -w * z, z


def integrate_suppression(
    z0: float,
    w0: float,
    c2: float,
    horizon: float,
    dt: float = DEFAULT_DT,
    stop_threshold: float = STOP_THRESHOLD,
) -> SuppressionResult:
    """March (z, w) with z' = w^2/2 - z^2/2 - c2 and w' = -wz.

    The running integral of z is carried as a third component so the
    exponential identity w = w0 * exp(-int z) can be checked without a
    separate quadrature. `w0 = 0` is the degenerate branch: w stays zero
    and z obeys a pure quadratically-damped decay, reaching -infinity in
    finite time whenever z0 < 0 or c2 > 0.
    """
    if w0 < 0.0:
        raise PreconditionError("initial b-slope at the tracked label must be >= 0")
    if c2 < 0.0:
        raise PreconditionError("c2 is half an energy and cannot be negative")
    if horizon <= 0.0 or dt <= 0.0:
        raise PreconditionError("horizon and dt must be positive")

    e0 = 2.0 * c2
    n_steps = int(np.ceil(horizon / dt))
    ts = [0.0]
    zs = [float(z0)]
    ws = [float(w0)]
    qs = [0.0]
    verdict = "completed"
    t = 0.0
    z, w, q = float(z0), float(w0), 0.0

    for k in range(n_steps):
        h = min(dt, horizon - t)
        k1 = _suppression_rhs(z, w, c2)
        k2 = _suppression_rhs(z + 0.5 * h * k1[0], w + 0.5 * h * k1[1], c2)
        k3 = _suppression_rhs(z + 0.5 * h * k2[0], w + 0.5 * h * k2[1], c2)
        k4 = _suppression_rhs(z + h * k3[0], w + h * k3[1], c2)
        z += h * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]) / 6.0
        w += h * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]) / 6.0
        q += h * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2]) / 6.0
        t += h
        if not (np.isfinite(z) and np.isfinite(w)):
            verdict = "blowdown" if zs[-1] < 0.0 else "unbounded"
            break
        ts.append(t)
        zs.append(z)
        ws.append(w)
        qs.append(q)
        if w0 > 0.0 and w <= 0.0:
            raise ConsistencyError(
                f"b-slope component crossed zero at t={t:.6g}; "
                "the step is too large for this stiffness"
            )
        if abs(z) >= stop_threshold or w >= stop_threshold:
            verdict = "blowdown" if z < 0.0 else "unbounded"
            break

    times = np.array(ts)
    z_arr = np.array(zs)
    w_arr = np.array(ws)
    q_arr = np.array(qs)

    if w0 > 0.0:
        w_model = w0 * np.exp(-q_arr)
        ident = float(np.max(np.abs(w_arr - w_model) / np.maximum(np.abs(w_model), 1e-300)))
        W = w0 * w_arr + (w0 / w_arr) * (1.0 + z_arr**2)
        envelope = W[0] * np.exp((1.0 - e0) * times)
    else:
        ident = 0.0
        W = np.zeros_like(times)
        envelope = np.zeros_like(times)

    t_est = None
    if verdict == "blowdown":
        t_est = estimate_blowup_time(times, z_arr)

    return SuppressionResult(
        times=times,
        z=z_arr,
        w=w_arr,
        int_z=q_arr,
        W=W,
        envelope=envelope,
        e0=e0,
        verdict=verdict,
        t_blowdown_estimate=t_est,
        w_identity_residual=ident,
    )


@dataclass
class RiccatiBoundResult:
    times: np.ndarray
    residuals: np.ndarray
    max_residual: float
    t_bound: float


def riccati_bound_check(times, z, m0: float) -> RiccatiBoundResult:
    """Check (1/m0)(1 + m0 t / 2) <= 1/z(t) < 0 along a sampled slope.

    `z` is the slope at the label where it starts at its most negative
    value m0; quadratic damping forces 1/z to stay above the straight
    line through 1/m0 with slope 1/2, which pins the divergence to
    t <= -2/m0.
    """
    times = np.asarray(times, dtype=float)
    z = np.asarray(z, dtype=float)
    if m0 >= 0.0:
        raise PreconditionError("m0 must be negative")
    if np.any(z >= 0.0):
        k = int(np.argmax(z >= 0.0))
        raise RegimeError(
            f"slope became nonnegative at t={times[k]:.6g}; "
            "the bound applies at a label where it stays negative"
        )
    line = (1.0 + 0.5 * m0 * times) / m0
    residuals = np.maximum(0.0, line - 1.0 / z)
    return RiccatiBoundResult(
        times=times,
        residuals=residuals,
        max_residual=float(residuals.max()) if residuals.size else 0.0,
        t_bound=-2.0 / m0,
    )


@dataclass
class ComparisonResult:
    times: np.ndarray
    z_mhd: np.ndarray
    z_plain: np.ndarray
    sigma: np.ndarray
    hypothesis_slack: np.ndarray
    sigma_min: float  # over the samples where the running hypothesis held
    hypothesis_ok: bool
    first_violation: float | None
    plain_t_estimate: float | None
    verdict: str  # horizon | divergence_stop | hypothesis_failed
    steps: int


def comparison_scenario(
    u0: InitialData,
    b0: InitialData,
    n: int = 512,
    horizon: float = 2.0,
    dt_max: float = 1e-3,
    m_stop: float = 1e4,
    sample_dt: float | None = None,
) -> ComparisonResult:
    """Lock-stepped pair: magnetic run vs. magnetic-free companion.

    Both systems use lam = 1 under Dirichlet walls; the companion carries
    the canonical parabola x(1-x) and no b-field. Initial hypotheses:
    b0'(0) = 0, u0'(0) >= companion slope at 0, and the companion slope
    norm must dominate the magnetic deficit. The running hypothesis
    (plain slope norm >= magnetic slope norm - b-slope norm) is monitored
    every sample; on its first failure the pair stops and the failure
    time is reported, not raised.
    """
    grid = GridSpec(n, BC.DIRICHLET)
    plain_u0 = PolyData([0.0, 1.0, -1.0], spec="quadratic")

    b0_slope_at_0 = float(b0.deriv(0.0, 1))
    scale = max(b0.sup_norm(), 1.0)
    if abs(b0_slope_at_0) > 1e-10 * scale:
        raise PreconditionError("b0 must have zero slope at the left wall")
    if float(u0.deriv(0.0, 1)) < float(plain_u0.deriv(0.0, 1)) - 1e-12:
        raise PreconditionError("u0 slope at the left wall must dominate the companion's")

    nrm_u0 = float(quadrature(_sq_field(u0, grid)))
    nrm_b0 = float(quadrature(_sq_field(b0, grid, order=1)))
    nrm_U0 = float(quadrature(_sq_field(plain_u0, grid)))
    if nrm_U0 < nrm_u0 - nrm_b0 - 1e-12:
        raise PreconditionError(
            "companion slope norm must be at least the magnetic slope deficit"
        )

    p = Params(1.0, 1.0, BC.DIRICHLET)
    mhd = make_initial_state(u0, b0, grid)
    plain = make_initial_state(plain_u0, ZeroData(), grid)
    ctrl = StepControl(dt_max=dt_max, m_stop=m_stop)
    if sample_dt is None:
        sample_dt = horizon / 400.0

    ts, z_m, z_p, slack = [], [], [], []

    def sample(a: FieldState, b: FieldState):
        ts.append(a.t)
        z_m.append(float(a.omega.values[0]))
        z_p.append(float(b.omega.values[0]))
        uxm = quadrature(_square(a.omega))
        uxp = quadrature(_square(b.omega))
        bxm = quadrature(_square(derivative(a.b)))
        slack.append(uxp - (uxm - bxm))

    sample(mhd, plain)
    verdict = "horizon"
    steps = 0
    next_sample = sample_dt
    while mhd.t < horizon - 1e-13:
        dt = min(_cfl_dt(mhd, ctrl), _cfl_dt(plain, ctrl), horizon - mhd.t)
        mhd, _ = step_rk4(mhd, p, dt)
        plain, _ = step_rk4(plain, p, dt)
        steps += 1
        stop = (
            float(np.max(np.abs(mhd.omega.values))) >= m_stop
            or float(np.max(np.abs(plain.omega.values))) >= m_stop
        )
        if mhd.t >= next_sample - 1e-12 or stop or mhd.t >= horizon - 1e-13:
            sample(mhd, plain)
            while next_sample <= mhd.t + 1e-12:
                next_sample += sample_dt
            if slack[-1] < -1e-10:
                # nothing is claimed past this point, so stop the pair here
                verdict = "hypothesis_failed"
                break
        if stop:
            verdict = "divergence_stop"
            break

    times = np.array(ts)
    z_mhd = np.array(z_m)
    z_plain = np.array(z_p)
    sigma = z_mhd - z_plain
    slack_arr = np.array(slack)
    viol = np.nonzero(slack_arr < -1e-10)[0]
    first_violation = float(times[viol[0]]) if viol.size else None
    held = slack_arr >= -1e-10

    plain_t_est = None
    if verdict == "divergence_stop":
        plain_t_est = estimate_blowup_time(times, z_plain)

    return ComparisonResult(
        times=times,
        z_mhd=z_mhd,
        z_plain=z_plain,
        sigma=sigma,
        hypothesis_slack=slack_arr,
        sigma_min=float(sigma[held].min()) if held.any() else float("nan"),
        hypothesis_ok=viol.size == 0,
        first_violation=first_violation,
        plain_t_estimate=plain_t_est,
        verdict=verdict,
        steps=steps,
    )


def _square(f: Field) -> Field:
    return Field(f.values * f.values, f.grid)


def _sq_field(data: InitialData, grid: GridSpec, order: int = 1) -> Field:
    v = np.asarray(data.deriv(grid.points, order), dtype=float)
    return Field(v * v, grid)
