"""Trajectories of the evolving velocity field and what rides along them.

A tracker co-advects labels with the PDE stepper: each RK4 stage of the
field supplies the stage velocity, and the same Butcher tableau advances
the positions gamma and the log-Jacobian (the time integral of the slope
along the path). Sampled rows additionally store the slope trace and the
traces of b and its first ``m_max`` spatial derivatives along each path.

The two structural checks of the model live here:

* ``jacorder_residual``: a zero of order m of the initial field is
  transported as b^(m)(gamma) = b0^(m)(alpha0) * jac^(kappa-m); the
  checker also reports the +(m-kappa) reading of the exponent for
  comparison, since the two appear in conflicting forms upstream.
* ``concavity_check``: in the concave regime (-1 <= lam < 0,
  kappa <= -lam) the Jacobian power jac^|lam| at the slope-argmin label
  stays under the chord 1 - lam*m0*t, forcing collapse by 1/(lam*m0).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, PreconditionError, RegimeError, TrajectoryFault
from .grid import BC, GridSpec, derivative, make_sampler
from .presets import InitialData, validate_zero_order

ESCAPE_TOL = 1e-8
LABEL_MATCH_TOL = 1e-12


def default_labels(count: int = 65, include: tuple[float, ...] = ()) -> np.ndarray:
    """Evenly spaced labels over [0, 1] plus any pinned locations."""
    labels = set(np.linspace(0.0, 1.0, count).tolist())
    labels.update(float(a) for a in include)
    return np.array(sorted(labels))


@dataclass
class TrajectorySet:
    """Recorded trajectory history; rows align with the run's sample times."""

    alphas: np.ndarray  # (L,)
    times: np.ndarray  # (T,)
    gamma: np.ndarray  # (T, L) positions (periodic: unwrapped)
    logjac: np.ndarray  # (T, L) log of the flow Jacobian
    slope_trace: np.ndarray  # (T, L) omega sampled along each path
    b_traces: np.ndarray  # (T, L, m_max+1) b and derivatives along each path

    @property
    def m_max(self) -> int:
        return self.b_traces.shape[2] - 1

    def label_index(self, alpha0: float) -> int:
        i = int(np.argmin(np.abs(self.alphas - alpha0)))
        if abs(self.alphas[i] - alpha0) > LABEL_MATCH_TOL:
            raise ConfigError(f"label {alpha0} is not tracked (nearest {self.alphas[i]})")
        return i


class TrajectoryTracker:
    """Co-advected label set; plug into dynamics.run via its tracker slot."""

    def __init__(self, alphas: np.ndarray, m_max: int = 2):
        self.alphas = np.asarray(alphas, dtype=float)
        if self.alphas.ndim != 1 or np.any(np.diff(self.alphas) <= 0):
            raise ConfigError("labels must be strictly increasing")
        if np.any(self.alphas < 0.0) or np.any(self.alphas > 1.0):
            raise ConfigError("labels must lie in [0, 1]")
        self.m_max = int(m_max)
        self.grid: GridSpec | None = None
        self.gamma = self.alphas.copy()
        self.logjac = np.zeros_like(self.alphas)
        self._times: list[float] = []
        self._gammas: list[np.ndarray] = []
        self._logjacs: list[np.ndarray] = []
        self._slopes: list[np.ndarray] = []
        self._traces: list[np.ndarray] = []

    # run() hooks ------------------------------------------------------------
    def start(self, state):
        self.grid = state.grid
        self._pinned = np.isin(self.alphas, (0.0, 1.0)) if self.grid.bc is BC.DIRICHLET else None

    def advance(self, stages, dt: float):
        g0, j0 = self.gamma, self.logjac
        kg, kj = [], []
        pos = g0
        for frac, stage in zip((0.5, 0.5, 1.0, None), stages):
            u = make_sampler(stage.u)
            w = make_sampler(stage.omega)
            kg.append(np.asarray(u(pos)))
            kj.append(np.asarray(w(pos)))
            if frac is not None:
                pos = self._confine(g0 + frac * dt * kg[-1])
        self.gamma = g0 + dt / 6.0 * (kg[0] + 2 * kg[1] + 2 * kg[2] + kg[3])
        self.logjac = j0 + dt / 6.0 * (kj[0] + 2 * kj[1] + 2 * kj[2] + kj[3])
        self._enforce_domain()

    def record(self, state):
        if np.any(np.diff(self.gamma) < -1e-12):
            raise TrajectoryFault("label ordering lost: flow map no longer monotone")
        pos = self.gamma
        self._times.append(state.t)
        self._gammas.append(pos.copy())
        self._logjacs.append(self.logjac.copy())
        self._slopes.append(np.asarray(make_sampler(state.omega)(pos)))
        fields = [state.b]
        for _ in range(self.m_max):
            fields.append(derivative(fields[-1]))
        self._traces.append(np.stack([np.asarray(make_sampler(f)(pos)) for f in fields], axis=1))

    # internals ---------------------------------------------------------------
    def _confine(self, pos: np.ndarray) -> np.ndarray:
        # mid-stage positions may poke past the wall by one step's overshoot
        if self.grid.bc is BC.DIRICHLET:
            return np.clip(pos, 0.0, 1.0)
        return pos

    def _enforce_domain(self):
        if self.grid.bc is not BC.DIRICHLET:
            return
        if np.any(self.gamma < -ESCAPE_TOL) or np.any(self.gamma > 1.0 + ESCAPE_TOL):
            worst = self.gamma[np.argmax(np.maximum(-self.gamma, self.gamma - 1.0))]
            raise TrajectoryFault(f"trajectory escaped the unit interval (position {worst!r})")
        self.gamma = np.clip(self.gamma, 0.0, 1.0)
        if self._pinned is not None:
            self.gamma[self._pinned] = self.alphas[self._pinned]

    def result(self) -> TrajectorySet:
        return TrajectorySet(
            alphas=self.alphas.copy(),
            times=np.array(self._times),
            gamma=np.array(self._gammas),
            logjac=np.array(self._logjacs),
            slope_trace=np.array(self._slopes),
            b_traces=np.array(self._traces),
        )


def b_trace_orders(state, positions, m_max: int) -> np.ndarray:
    """b and its first m_max derivatives sampled at given positions."""
    fields = [state.b]
    for _ in range(m_max):
        fields.append(derivative(fields[-1]))
    pos = np.asarray(positions, dtype=float)
    return np.stack([np.asarray(make_sampler(f)(pos)) for f in fields], axis=1)


@dataclass
class JacOrderResult:
    """Order-m trace against the Jacobian-power prediction."""

    times: np.ndarray
    measured: np.ndarray  # order-m trace along the path
    predicted: np.ndarray  # b0^(m)(alpha0) * jac^(kappa - m)
    residual: np.ndarray  # relative, against the kappa-m exponent
    residual_flipped_exponent: np.ndarray  # informational +(m-kappa) reading
    lower_traces_sup: np.ndarray  # sup over orders < m of |trace| per time


def jacorder_residual(
    ts: TrajectorySet, b0: InitialData, alpha0: float, m: int, p,
) -> JacOrderResult:
    """Residual of the transported order-m zero at label alpha0."""
    if m < 1 or m > ts.m_max:
        raise ConfigError(f"need 1 <= m <= tracked m_max={ts.m_max}")
    validate_zero_order(b0, alpha0, m)
    i = ts.label_index(alpha0)
    b0m = float(b0.deriv(alpha0, m))
    lj = ts.logjac[:, i]
    predicted = b0m * np.exp((p.kappa - m) * lj)
    flipped = b0m * np.exp((m - p.kappa) * lj)
    measured = ts.b_traces[:, i, m]
    scale = np.maximum(np.abs(predicted), 1e-30)
    lower = np.max(np.abs(ts.b_traces[:, i, :m]), axis=1)
    return JacOrderResult(
        times=ts.times.copy(),
        measured=measured.copy(),
        predicted=predicted,
        residual=np.abs(measured - predicted) / scale,
        residual_flipped_exponent=np.abs(measured - flipped) / np.maximum(np.abs(flipped), 1e-30),
        lower_traces_sup=lower,
    )


@dataclass
class ConcavityResult:
    """Jacobian-power chord bound at the slope-argmin label."""

    times: np.ndarray
    jac_power: np.ndarray  # jac^|lam| along the label
    chord: np.ndarray  # 1 - lam*m0*t
    residual: np.ndarray  # max(0, jac_power - chord)
    t_bound: float  # 1/(lam*m0)


def concavity_check(ts: TrajectorySet, alpha0: float, p, m0: float) -> ConcavityResult:
    """Chord bound on the Jacobian power in the concave-blowup regime."""
    if not (-1.0 <= p.lam < 0.0 and p.kappa <= -p.lam):
        raise RegimeError(
            f"concavity bound needs -1 <= lam < 0 and kappa <= -lam; got ({p.lam}, {p.kappa})"
        )
    if m0 >= 0.0:
        raise PreconditionError("slope minimum must be negative for the chord bound")
    i = ts.label_index(alpha0)
    t = ts.times
    jac_power = np.exp(abs(p.lam) * ts.logjac[:, i])
    chord = 1.0 - p.lam * m0 * t
    return ConcavityResult(
        times=t.copy(),
        jac_power=jac_power,
        chord=chord,
        residual=np.maximum(0.0, jac_power - chord),
        t_bound=1.0 / (p.lam * m0),
    )
