"""Spatial discretization of the unit interval.

Two boundary treatments share one operator interface:

* ``BC.PERIODIC``: nodes x_j = j/n (x=1 identified with x=0), Fourier
  differentiation and antidifferentiation, trapezoid quadrature --
  spectrally accurate for smooth periodic data.
* ``BC.DIRICHLET``: nodes x_j = j/(n-1) including both endpoints,
  4th-order finite differences with one-sided edge rows, composite
  Simpson quadrature (3/8-rule head when the interval count is odd),
  and a 4-point cumulative integrator.

Operators consume and produce :class:`Field` values; :func:`sample`
evaluates between nodes with cubic splines (periodic wraparound or
clamped ends). All routines reject non-finite input.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ConfigError, ConsistencyError, DomainError, NonFiniteError

MIN_POINTS = 16

# default tolerance on the mean of periodic data fed to antiderivative
TOL_MEAN = 1e-10


class BC(enum.Enum):
    DIRICHLET = "dirichlet"
    PERIODIC = "periodic"


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid on [0, 1]; `n` is the stored point count."""

    n: int
    bc: BC

    def __post_init__(self):
        if self.n < MIN_POINTS:
            raise ConfigError(f"grid needs at least {MIN_POINTS} points, got {self.n}")

    @property
    def h(self) -> float:
        return 1.0 / self.n if self.bc is BC.PERIODIC else 1.0 / (self.n - 1)

    @property
    def points(self) -> np.ndarray:
        return np.arange(self.n) * self.h


@dataclass
class Field:
    """Grid samples of a scalar function on [0, 1]."""

    values: np.ndarray
    grid: GridSpec

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n,):
            raise ConfigError(
                f"field shape {self.values.shape} does not match grid n={self.grid.n}"
            )
        _require_finite(self.values, "field values")

    def copy(self) -> "Field":
        return Field(self.values.copy(), self.grid)


def _require_finite(values: np.ndarray, what: str):
    bad = ~np.isfinite(values)
    if bad.any():
        idx = np.nonzero(bad)[0]
        raise NonFiniteError(f"{what}: non-finite entries at indices {idx[:8]}", indices=idx)


def field_from_callable(grid: GridSpec, fn) -> Field:
    return Field(np.asarray(fn(grid.points), dtype=float), grid)


# ---------------------------------------------------------------------------
# differentiation

# 4th-order one-sided first-derivative stencils (forward form, units of 1/12h)
_EDGE0 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0])
_EDGE1 = np.array([-3.0, -10.0, 18.0, -6.0, 1.0])


def derivative(f: Field) -> Field:
    """First spatial derivative, same grid."""
    v = f.values
    g = f.grid
    if g.bc is BC.PERIODIC:
        n = g.n
        vhat = np.fft.rfft(v)
        k = np.arange(vhat.size)
        vhat = vhat * (2j * np.pi * k)
        if n % 2 == 0:
            vhat[-1] = 0.0  # Nyquist mode has no well-defined real derivative
        return Field(np.fft.irfft(vhat, n=n), g)

    h = g.h
    out = np.empty_like(v)
    out[2:-2] = (v[:-4] - 8.0 * v[1:-3] + 8.0 * v[3:-1] - v[4:]) / (12.0 * h)
    out[0] = _EDGE0 @ v[:5] / (12.0 * h)
    out[1] = _EDGE1 @ v[:5] / (12.0 * h)
    out[-1] = -(_EDGE0 @ v[-1:-6:-1]) / (12.0 * h)
    out[-2] = -(_EDGE1 @ v[-1:-6:-1]) / (12.0 * h)
    return Field(out, g)


def second_derivative(f: Field) -> Field:
    return derivative(derivative(f))


# ---------------------------------------------------------------------------
# quadrature

def quadrature(f: Field, rule: str = "auto") -> float:
    """Integral over [0, 1].

    Dirichlet rules: "simpson" needs an odd point count; "auto" falls back
    to a 3/8-rule head plus Simpson when the count is even.
    """
    v = f.values
    g = f.grid
    if g.bc is BC.PERIODIC:
        return float(v.sum() * g.h)

    h = g.h
    n = g.n
    odd = n % 2 == 1
    if rule == "simpson" and not odd:
        raise ConfigError("Simpson quadrature needs an odd Dirichlet point count")
    if rule not in ("auto", "simpson", "newton_cotes"):
        raise ConfigError(f"unknown quadrature rule {rule!r}")
    if odd:
        return float(_simpson(v, h))
    # even point count: odd interval count; 3/8 rule on the first three
    # intervals, Simpson on the remaining even count
    head = 3.0 * h / 8.0 * (v[0] + 3.0 * v[1] + 3.0 * v[2] + v[3])
    return float(head + _simpson(v[3:], h))


def _simpson(v: np.ndarray, h: float) -> float:
    return h / 3.0 * (v[0] + v[-1] + 4.0 * v[1:-1:2].sum() + 2.0 * v[2:-1:2].sum())


# ---------------------------------------------------------------------------
# antidifferentiation

# 4-point interval weights (units of h/24), exact for cubics
_HEAD = np.array([9.0, 19.0, -5.0, 1.0]) / 24.0
_MID = np.array([-1.0, 13.0, 13.0, -1.0]) / 24.0


def antiderivative(f: Field, tol_mean: float = TOL_MEAN) -> Field:
    """Antiderivative u with u(0)=0 (Dirichlet) or zero mean (periodic).

    Periodic input must already have zero mean up to `tol_mean`.
    """
    v = f.values
    g = f.grid
    if g.bc is BC.PERIODIC:
        n = g.n
        mean = v.sum() / n
        if abs(mean) > tol_mean:
            raise ConsistencyError(
                f"periodic antiderivative needs zero-mean data; |mean|={abs(mean):.3e}"
            )
        vhat = np.fft.rfft(v)
        k = np.arange(vhat.size)
        scale = np.zeros_like(vhat)
        scale[1:] = 1.0 / (2j * np.pi * k[1:])
        uhat = vhat * scale
        if n % 2 == 0:
            uhat[-1] = 0.0
        u = np.fft.irfft(uhat, n=n)
        return Field(u - u.sum() / n, g)

    h = g.h
    inc = np.empty(g.n - 1)
    inc[0] = _HEAD @ v[:4]
    inc[-1] = _HEAD @ v[-1:-5:-1]
    if g.n > 3:
        win = np.lib.stride_tricks.sliding_window_view(v, 4)
        inc[1:-1] = win @ _MID
    out = np.empty(g.n)
    out[0] = 0.0
    np.cumsum(inc * h, out=out[1:])
    return Field(out, g)


# ---------------------------------------------------------------------------
# off-grid evaluation

def _edge_slopes(v: np.ndarray, h: float) -> tuple[float, float]:
    d0 = _EDGE0 @ v[:5] / (12.0 * h)
    d1 = -(_EDGE0 @ v[-1:-6:-1]) / (12.0 * h)
    return float(d0), float(d1)


def make_sampler(f: Field):
    """Cubic-spline evaluator for a field; reusable across many points."""
    g = f.grid
    if g.bc is BC.PERIODIC:
        x = np.append(g.points, 1.0)
        v = np.append(f.values, f.values[0])
        spl = CubicSpline(x, v, bc_type="periodic")
        return lambda q: spl(np.mod(q, 1.0))
    d0, d1 = _edge_slopes(f.values, g.h)
    spl = CubicSpline(g.points, f.values, bc_type=((1, d0), (1, d1)))
    return spl


def sample(f: Field, x) -> np.ndarray | float:
    """Evaluate a field at arbitrary points of [0, 1] (periodic: wrapped)."""
    q = np.asarray(x, dtype=float)
    _require_finite(np.atleast_1d(q), "sample points")
    if f.grid.bc is BC.DIRICHLET and (np.any(q < 0.0) or np.any(q > 1.0)):
        raise DomainError("sample points must lie in [0, 1]")
    out = make_sampler(f)(q)
    return float(out) if np.isscalar(x) or q.ndim == 0 else out


# ---------------------------------------------------------------------------
# dealiasing

def dealias(values: np.ndarray, grid: GridSpec) -> np.ndarray:
    """2/3-rule spectral truncation of raw periodic samples."""
    if grid.bc is not BC.PERIODIC:
        return values
    n = grid.n
    vhat = np.fft.rfft(values)
    cut = n // 3
    vhat[cut + 1 :] = 0.0
    return np.fft.irfft(vhat, n=n)
