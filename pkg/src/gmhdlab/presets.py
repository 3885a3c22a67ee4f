"""Analytic initial-data presets.

Each preset knows its exact derivatives (orders 0..6), the extrema of its
slope, and its boundary compatibility, so downstream checks never have to
differentiate initial data numerically. Grammar accepted by
:func:`parse_preset`:

    quadratic                  x(1-x)
    zero                       identically zero
    sine:k[,a]                 a sin(2 pi k x)
    poly:c0,c1,...             sum c_i x^i   (also poly:[c0,...])
    bump2:a0                   order-2 zero at a0, order-2 wall zeros
    bump_m:a0,m                order-m zero at a0, order-1 wall zeros
    sinebump:a0,m[,a]          1-periodic trigonometric order-m zero at a0
    trigmix:c1,...,cK          sum_k c_k sin(2 pi k x)/(2 pi k); slope
                               coefficients are the c_k directly
    scale:c:<spec>             c times any preset

Polynomial bumps are Dirichlet-compatible; `sinebump` is the smooth
periodic counterpart.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial
from scipy.optimize import brentq

from .errors import ConfigError, PreconditionError

MAX_DERIV = 6

_REFINE_GRID = 4097  # dense-scan resolution for extremum refinement


@dataclass(frozen=True)
class SlopeExtrema:
    """Extrema of the first derivative over [0, 1], with their locations."""

    max_slope: float
    argmax: float
    min_slope: float
    argmin: float


class InitialData:
    """Base preset; subclasses fill in value/deriv."""

    spec: str = ""

    def value(self, a):
        return self.deriv(a, 0)

    def deriv(self, a, order: int = 1):
        raise NotImplementedError

    def slope_extrema(self) -> SlopeExtrema:
        return _refined_slope_extrema(self)

    def sup_norm(self) -> float:
        a = np.linspace(0.0, 1.0, _REFINE_GRID)
        return float(np.max(np.abs(self.value(a))))

    # boundary compatibility -------------------------------------------------
    def dirichlet_ok(self) -> bool:
        s = max(self.sup_norm(), 1.0)
        return abs(float(self.value(0.0))) <= 1e-12 * s and abs(float(self.value(1.0))) <= 1e-12 * s

    def periodic_ok(self) -> bool:
        s = max(self.sup_norm(), 1.0)
        return all(
            abs(float(self.deriv(0.0, k)) - float(self.deriv(1.0, k))) <= 1e-9 * s
            for k in range(0, 4)
        )

    def __repr__(self):
        return f"{type(self).__name__}({self.spec!r})"


class ZeroData(InitialData):
    spec = "zero"

    def deriv(self, a, order: int = 1):
        return np.zeros_like(np.asarray(a, dtype=float))

    def slope_extrema(self) -> SlopeExtrema:
        return SlopeExtrema(0.0, 0.0, 0.0, 0.0)

    def sup_norm(self) -> float:
        return 0.0


class PolyData(InitialData):
    def __init__(self, coeffs, spec: str | None = None):
        self.poly = Polynomial(np.asarray(coeffs, dtype=float))
        self.spec = spec or "poly:" + ",".join(repr(float(c)) for c in self.poly.coef)
        self._derivs = [self.poly]
        for _ in range(MAX_DERIV):
            self._derivs.append(self._derivs[-1].deriv())

    def deriv(self, a, order: int = 1):
        if not 0 <= order <= MAX_DERIV:
            raise ConfigError(f"derivative order {order} outside 0..{MAX_DERIV}")
        return self._derivs[order](np.asarray(a, dtype=float))

    def slope_extrema(self) -> SlopeExtrema:
        # critical points of the slope are exact polynomial roots
        cand = [0.0, 1.0]
        curv = self._derivs[2]
        roots = curv.roots() if np.any(curv.coef != 0.0) else np.array([])
        cand.extend(float(r.real) for r in roots if abs(r.imag) < 1e-12 and 0.0 < r.real < 1.0)
        cand = np.array(cand)
        slopes = self.deriv(cand, 1)
        imax, imin = int(np.argmax(slopes)), int(np.argmin(slopes))
        return SlopeExtrema(float(slopes[imax]), float(cand[imax]),
                            float(slopes[imin]), float(cand[imin]))

    @property
    def is_standard_quadratic(self) -> bool:
        c = self.poly.coef
        return c.size == 3 and np.allclose(c, [0.0, 1.0, -1.0], rtol=0, atol=1e-15)


class TrigData(InitialData):
    """Finite Fourier series sum_k a_k cos(2 pi k x) + b_k sin(2 pi k x)."""

    def __init__(self, cos_coeffs, sin_coeffs, spec: str | None = None):
        self.ac = np.asarray(cos_coeffs, dtype=float)
        self.bs = np.asarray(sin_coeffs, dtype=float)
        if self.ac.shape != self.bs.shape:
            raise ConfigError("cos/sin coefficient arrays must align")
        self.spec = spec or "trig"

    @classmethod
    def from_samples(cls, values: np.ndarray, spec: str | None = None) -> "TrigData":
        """Exact Fourier coefficients of a trigonometric polynomial sampled
        on a uniform periodic grid (enough points to avoid aliasing)."""
        n = values.size
        chat = np.fft.rfft(values) / n
        ac = 2.0 * chat.real
        bs = -2.0 * chat.imag
        ac[0] = chat[0].real
        if n % 2 == 0:
            ac[-1] = chat[-1].real
            bs[-1] = 0.0
        keep = max(np.nonzero(np.abs(chat) > 1e-13 * max(np.abs(chat).max(), 1e-300))[0],
                   default=0)
        return cls(ac[: keep + 1], bs[: keep + 1], spec=spec)

    def deriv(self, a, order: int = 1):
        if not 0 <= order <= MAX_DERIV:
            raise ConfigError(f"derivative order {order} outside 0..{MAX_DERIV}")
        a = np.asarray(a, dtype=float)
        k = np.arange(self.ac.size)
        w = 2.0 * np.pi * k
        ac, bs = self.ac.copy(), self.bs.copy()
        for _ in range(order):
            ac, bs = w * bs, -w * ac
        phase = np.multiply.outer(a, w)
        out = np.cos(phase) @ ac + np.sin(phase) @ bs
        return out if a.ndim else float(out)

    def periodic_ok(self) -> bool:
        return True


def sine_data(k: int, amp: float = 1.0) -> TrigData:
    ac = np.zeros(k + 1)
    bs = np.zeros(k + 1)
    bs[k] = amp
    return TrigData(ac, bs, spec=f"sine:{k},{float(amp)!r}")


def bump_data(
    alpha0: float, m: int, wall_order: int = 1, spec: str | None = None
) -> PolyData:
    """Polynomial with a zero of order exactly m at alpha0 and zeros of
    order wall_order at whichever boundary points differ from alpha0.
    Order-1 wall zeros keep the degree, and with it the size of the high
    derivatives a fixed grid must resolve, as low as Dirichlet walls
    allow."""
    if not 0.0 <= alpha0 <= 1.0:
        raise ConfigError("bump location must lie in [0, 1]")
    if m < 1:
        raise ConfigError("bump order must be >= 1")
    if wall_order < 1:
        raise ConfigError("wall order must be >= 1")
    p = Polynomial([-alpha0, 1.0]) ** m
    if alpha0 != 0.0:
        p = p * Polynomial([0.0, 1.0]) ** wall_order
    if alpha0 != 1.0:
        p = p * Polynomial([1.0, -1.0]) ** wall_order
    return PolyData(p.coef, spec=spec or f"bump_m:{float(alpha0)!r},{m}")


def trigmix_data(slope_coeffs) -> TrigData:
    """Sum of sine modes whose slope is sum_k c_k cos(2 pi k x); handy for
    shaping the slope profile (e.g. a flat-bottomed minimum) directly."""
    c = np.asarray(slope_coeffs, dtype=float)
    if c.size < 1:
        raise ConfigError("trigmix needs at least one coefficient")
    k = np.arange(1, c.size + 1)
    ac = np.zeros(c.size + 1)
    bs = np.zeros(c.size + 1)
    bs[1:] = c / (2.0 * np.pi * k)
    return TrigData(ac, bs, spec="trigmix:" + ",".join(repr(float(v)) for v in c))


def sinebump_data(alpha0: float, m: int, amp: float = 1.0) -> TrigData:
    """1-periodic trigonometric function with an order-m zero at alpha0.

    Even m uses sin^m(pi(x - a0)); odd m appends a sin(2 pi (x - a0))
    factor so the result stays 1-periodic.
    """
    if m < 2:
        raise ConfigError("sinebump order must be >= 2")
    n = 8 * (m + 2)
    x = np.arange(n) / n
    s = np.sin(np.pi * (x - alpha0))
    if m % 2 == 0:
        v = amp * s**m
    else:
        v = amp * s ** (m - 1) * np.sin(2.0 * np.pi * (x - alpha0))
    return TrigData.from_samples(v, spec=f"sinebump:{float(alpha0)!r},{m},{float(amp)!r}")


class ScaledData(InitialData):
    def __init__(self, c: float, inner: InitialData):
        self.c = float(c)
        self.inner = inner
        self.spec = f"scale:{float(self.c)!r}:{inner.spec}"

    def deriv(self, a, order: int = 1):
        return self.c * self.inner.deriv(a, order)

    def periodic_ok(self) -> bool:
        return self.inner.periodic_ok()


def _refined_slope_extrema(data: InitialData) -> SlopeExtrema:
    """Dense scan of the slope plus brentq refinement on its derivative."""
    x = np.linspace(0.0, 1.0, _REFINE_GRID)
    s = data.deriv(x, 1)
    curv = data.deriv(x, 2)
    cand = [0.0, 1.0]
    sign_change = np.nonzero(np.diff(np.signbit(curv)))[0]
    for i in sign_change:
        if curv[i] == curv[i + 1]:
            continue
        cand.append(brentq(lambda t: float(data.deriv(t, 2)), x[i], x[i + 1], xtol=1e-14))
    cand = np.array(sorted(set(cand)))
    sc = data.deriv(cand, 1)
    imax, imin = int(np.argmax(sc)), int(np.argmin(sc))
    out = SlopeExtrema(float(sc[imax]), float(cand[imax]), float(sc[imin]), float(cand[imin]))
    # the dense scan guards against refinement missing a flat extremum
    jmax, jmin = int(np.argmax(s)), int(np.argmin(s))
    if s[jmax] > out.max_slope:
        out = SlopeExtrema(float(s[jmax]), float(x[jmax]), out.min_slope, out.argmin)
    if s[jmin] < out.min_slope:
        out = SlopeExtrema(out.max_slope, out.argmax, float(s[jmin]), float(x[jmin]))
    return out


def validate_zero_order(data: InitialData, alpha0: float, m: int):
    """Confirm the data has a zero of order exactly m at alpha0."""
    scale = max(data.sup_norm(), 1e-30)
    for k in range(m):
        if abs(float(data.deriv(alpha0, k))) > 1e-10 * scale:
            raise PreconditionError(
                f"derivative order {k} at {alpha0} is {float(data.deriv(alpha0, k)):.3e}; "
                f"expected a zero of order {m}"
            )
    if abs(float(data.deriv(alpha0, m))) < 1e-6 * scale:
        raise PreconditionError(
            f"order-{m} derivative at {alpha0} is below threshold; zero order exceeds {m}"
        )


def parse_preset(spec: str) -> InitialData:
    """Parse a preset string; raises ConfigError on malformed input."""
    spec = spec.strip()
    if spec.startswith("scale:"):
        rest = spec[len("scale:"):]
        head, sep, tail = rest.partition(":")
        if not sep:
            raise ConfigError(f"scale preset needs scale:c:<spec>, got {spec!r}")
        return ScaledData(_num(head, spec), parse_preset(tail))
    name, _, args = spec.partition(":")
    arglist = [a for a in args.strip("[]").split(",") if a.strip()] if args else []
    if name == "quadratic":
        _arity(spec, arglist, 0, 0)
        return PolyData([0.0, 1.0, -1.0], spec="quadratic")
    if name == "zero":
        _arity(spec, arglist, 0, 0)
        return ZeroData()
    if name == "sine":
        _arity(spec, arglist, 1, 2)
        k = _integer(arglist[0], spec)
        amp = _num(arglist[1], spec) if len(arglist) > 1 else 1.0
        return sine_data(k, amp)
    if name == "poly":
        _arity(spec, arglist, 1, 64)
        return PolyData([_num(c, spec) for c in arglist])
    if name == "bump2":
        _arity(spec, arglist, 1, 1)
        return bump_data(_num(arglist[0], spec), 2, wall_order=2, spec=f"bump2:{arglist[0]}")
    if name == "bump_m":
        _arity(spec, arglist, 2, 2)
        return bump_data(_num(arglist[0], spec), _integer(arglist[1], spec))
    if name == "sinebump":
        _arity(spec, arglist, 2, 3)
        amp = _num(arglist[2], spec) if len(arglist) > 2 else 1.0
        return sinebump_data(_num(arglist[0], spec), _integer(arglist[1], spec), amp)
    if name == "trigmix":
        _arity(spec, arglist, 1, 64)
        return trigmix_data([_num(c, spec) for c in arglist])
    raise ConfigError(f"unknown preset {spec!r}")


def _arity(spec, args, lo, hi):
    if not lo <= len(args) <= hi:
        raise ConfigError(f"preset {spec!r}: expected {lo}..{hi} arguments, got {len(args)}")


def _num(tok: str, spec: str) -> float:
    try:
        return float(tok)
    except ValueError:
        raise ConfigError(f"preset {spec!r}: bad number {tok!r}") from None


def _integer(tok: str, spec: str) -> int:
    v = _num(tok, spec)
    if v != int(v):
        raise ConfigError(f"preset {spec!r}: expected integer, got {tok!r}")
    return int(v)
