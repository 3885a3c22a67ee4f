"""Reference solutions on the exact-solvability line kappa = -lam.

There the flow Jacobian factorizes through the auxiliary clock tau:

    J(alpha, tau)   = 1 - lam * tau * u0'(alpha)
    Lbar_i(tau)     = integral_0^1 J^{-(i + 1/lam)} d alpha      (i = 0, 1)
    jac(alpha, tau) = J(alpha, tau)^{-1/lam} / Lbar_0(tau)
    t(tau)          = integral_0^tau Lbar_0(mu)^{2 lam} d mu

The clock saturates at tau* = 1/(lam * max u0') for lam > 0 (argmin for
lam < 0); whether the physical blowup time t* = t(tau*) is finite is a
tail-integral question answered by :func:`tstar`. For the quadratic
profile x(1-x) the Lbar integrals collapse to closed forms used as the
fast path and as cross-checks against adaptive quadrature.

The lam = kappa = 0 point has its own explicit solution
(:func:`zero_params_solution`), a pure transport closed form.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .errors import ConfigError, DomainError, RegimeError
from .presets import InitialData, PolyData

QUAD_TOL = 1e-10
_TAU_TINY = 1e-6  # below this, series branches dodge cancellation
_LAM1_TOL = 1e-6  # |lam-1| below this uses the log branch

DYADIC_DEPTH = 48  # deepest tail shell tau*(1 - 2^-k)


def _quiet_quad(f, a: float, b: float, tol: float) -> float:
    """Adaptive quadrature tolerant of integrable endpoint singularities;
    QUADPACK's accuracy complaints there are expected and suppressed."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        return quad(f, a, b, limit=200, epsabs=1e-300, epsrel=tol)[0]


@dataclass(frozen=True)
class ClosedFormContext:
    """Initial slope data digested for the exact-solvability line."""

    lam: float
    u0: InitialData
    max_slope: float
    argmax: float
    min_slope: float
    argmin: float
    tau_star: float
    is_quadratic: bool
    slope_norm_sq: float  # ||u0'||_{L2}^2

    def slope(self, alpha):
        return self.u0.deriv(alpha, 1)


def make_context(lam: float, u0: InitialData) -> ClosedFormContext:
    if lam == 0.0:
        raise RegimeError("the solvability-line engine needs lam != 0; "
                          "use zero_params_solution for the zero-parameter point")
    ext = u0.slope_extrema()
    if lam > 0.0:
        tau_star = 1.0 / (lam * ext.max_slope) if ext.max_slope > 0.0 else math.inf
    else:
        tau_star = 1.0 / (lam * ext.min_slope) if ext.min_slope < 0.0 else math.inf
    q = quad(lambda a: float(u0.deriv(a, 1)) ** 2, 0.0, 1.0,
             epsabs=1e-13, epsrel=QUAD_TOL)[0]
    return ClosedFormContext(
        lam=float(lam),
        u0=u0,
        max_slope=ext.max_slope,
        argmax=ext.argmax,
        min_slope=ext.min_slope,
        argmin=ext.argmin,
        tau_star=tau_star,
        is_quadratic=isinstance(u0, PolyData) and u0.is_standard_quadratic,
        slope_norm_sq=q,
    )


def jay(ctx: ClosedFormContext, alpha, tau: float):
    """Linearized Jacobian kernel 1 - lam*tau*u0'(alpha)."""
    return 1.0 - ctx.lam * tau * np.asarray(ctx.slope(alpha))


def _check_tau(ctx: ClosedFormContext, tau: float):
    if not 0.0 <= tau < ctx.tau_star:
        raise DomainError(f"tau={tau!r} outside [0, tau*={ctx.tau_star!r})")


def _lbar_power(power: float, tau: float, ctx: ClosedFormContext, tol: float = QUAD_TOL) -> float:
    """integral_0^1 J(alpha, tau)^(-power) d alpha by adaptive quadrature."""
    if tau == 0.0:
        return 1.0
    crit = ctx.argmax if ctx.lam > 0.0 else ctx.argmin

    def f(a):
        return (1.0 - ctx.lam * tau * float(ctx.u0.deriv(a, 1))) ** (-power)

    pts = [crit] if 1e-12 < crit < 1.0 - 1e-12 else None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, _ = quad(f, 0.0, 1.0, points=pts, limit=500, epsabs=1e-300, epsrel=tol)
    return val


def Lbar(i: int, tau: float, ctx: ClosedFormContext, tol: float = QUAD_TOL) -> float:
    """Lbar_i(tau) for i in {0, 1} by adaptive quadrature."""
    if i not in (0, 1):
        raise ConfigError("Lbar index must be 0 or 1")
    _check_tau(ctx, tau)
    return _lbar_power(i + 1.0 / ctx.lam, tau, ctx, tol)


# ---------------------------------------------------------------------------
# quadratic-profile closed forms (u0 = x(1-x), slope 1-2x, tau* = 1/|lam|)

def Lbar0_quadratic(tau: float, lam: float) -> float:
    if lam == 0.0:
        raise RegimeError("lam must be nonzero")
    if tau == 0.0:
        return 1.0
    x = lam * tau
    if tau < _TAU_TINY:
        return 1.0 + (lam + 1.0) * tau * tau / 6.0
    if abs(lam - 1.0) <= _LAM1_TOL:
        return math.log((1.0 + tau) / (1.0 - tau)) / (2.0 * tau)
    p = 1.0 - 1.0 / lam
    return ((1.0 + x) ** p - (1.0 - x) ** p) / (2.0 * (lam - 1.0) * tau)


def Lbar1_quadratic(tau: float, lam: float) -> float:
    if lam == 0.0:
        raise RegimeError("lam must be nonzero")
    if tau == 0.0:
        return 1.0
    if tau < _TAU_TINY:
        return 1.0 + (lam + 1.0) * (2.0 * lam + 1.0) * tau * tau / 6.0
    x = lam * tau
    p = -1.0 / lam
    return ((1.0 - x) ** p - (1.0 + x) ** p) / (2.0 * tau)


def Lbar2_quadratic(tau: float, lam: float) -> float:
    if lam == 0.0:
        raise RegimeError("lam must be nonzero")
    if tau == 0.0:
        return 1.0
    x = lam * tau
    if abs(lam + 1.0) <= _LAM1_TOL:
        return (math.log(1.0 + x) - math.log(1.0 - x)) / (2.0 * x)
    p = -1.0 - 1.0 / lam
    return ((1.0 - x) ** p - (1.0 + x) ** p) / (2.0 * tau * (lam + 1.0))


def _lbars(tau: float, ctx: ClosedFormContext, tol: float = QUAD_TOL):
    """(Lbar0, Lbar1, Lbar2): closed forms on the quadratic fast path."""
    if ctx.is_quadratic:
        return (
            Lbar0_quadratic(tau, ctx.lam),
            Lbar1_quadratic(tau, ctx.lam),
            Lbar2_quadratic(tau, ctx.lam),
        )
    return (
        _lbar_power(0.0 + 1.0 / ctx.lam, tau, ctx, tol),
        _lbar_power(1.0 + 1.0 / ctx.lam, tau, ctx, tol),
        _lbar_power(2.0 + 1.0 / ctx.lam, tau, ctx, tol),
    )


# ---------------------------------------------------------------------------
# the tau -> t clock

def _clock_integrand(ctx: ClosedFormContext, tol: float = QUAD_TOL):
    if ctx.is_quadratic:
        return lambda mu: Lbar0_quadratic(mu, ctx.lam) ** (2.0 * ctx.lam)
    return lambda mu: _lbar_power(1.0 / ctx.lam, mu, ctx, tol) ** (2.0 * ctx.lam)


def _dyadic_nodes(ctx: ClosedFormContext, per_octave: int = 4) -> np.ndarray:
    """Node ladder: uniform head, then tau*(1 - 2^-e) shells toward tau*."""
    ts = ctx.tau_star
    if math.isinf(ts):
        return np.linspace(0.0, 10.0, 201)
    head = np.linspace(0.0, ts / 2.0, 25)[:-1]
    exps = np.arange(1 * per_octave, DYADIC_DEPTH * per_octave + 1) / per_octave
    tail = ts * (1.0 - np.power(2.0, -exps))
    return np.concatenate([head, tail])


def t_of_tau(tau: float, ctx: ClosedFormContext, tol: float = QUAD_TOL) -> float:
    """Physical time at clock value tau (piecewise adaptive quadrature)."""
    _check_tau(ctx, tau)
    if tau == 0.0:
        return 0.0
    f = _clock_integrand(ctx, tol)
    nodes = _dyadic_nodes(ctx)
    nodes = nodes[nodes < tau]
    edges = np.append(nodes, tau)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        total += _quiet_quad(f, a, b, tol)
    return total


class TauMap:
    """Tabulated monotone clock map tau <-> t with quadrature refinement."""

    def __init__(self, ctx: ClosedFormContext, tol: float = QUAD_TOL):
        self.ctx = ctx
        self._f = _clock_integrand(ctx, tol)
        self.tau_nodes = _dyadic_nodes(ctx)
        inc = [
            _quiet_quad(self._f, a, b, tol)
            for a, b in zip(self.tau_nodes[:-1], self.tau_nodes[1:])
        ]
        self.t_nodes = np.concatenate([[0.0], np.cumsum(inc)])
        self._forward = PchipInterpolator(self.tau_nodes, self.t_nodes)
        self._inverse = PchipInterpolator(self.t_nodes, self.tau_nodes)

    @property
    def t_max(self) -> float:
        return float(self.t_nodes[-1])

    def t_of_tau(self, tau: float) -> float:
        _check_tau(self.ctx, tau)
        k = int(np.searchsorted(self.tau_nodes, tau, side="right") - 1)
        k = min(k, self.tau_nodes.size - 1)
        base = self.t_nodes[k]
        if tau == self.tau_nodes[k]:
            return float(base)
        return float(base + _quiet_quad(self._f, self.tau_nodes[k], tau, QUAD_TOL))

    def tau_of_t(self, t: float) -> float:
        """Invert the clock; exact to quadrature tolerance via bracketing."""
        if t < 0.0 or t > self.t_max:
            raise DomainError(f"t={t!r} beyond tabulated clock range [0, {self.t_max!r}]")
        if t == 0.0:
            return 0.0
        k = int(np.searchsorted(self.t_nodes, t, side="right") - 1)
        k = min(k, self.t_nodes.size - 2)
        lo, hi = self.tau_nodes[k], self.tau_nodes[k + 1]
        g = lambda tau: self.t_of_tau(tau) - t
        glo, ghi = g(lo), g(hi)
        if glo > 0.0 or ghi < 0.0:  # pragma: no cover - monotonicity guard
            return float(self._inverse(t))
        if glo == 0.0:
            return float(lo)
        return float(brentq(g, lo, hi, xtol=1e-15 * max(1.0, hi), rtol=1e-14))


# ---------------------------------------------------------------------------
# blowup-time classification

@dataclass(frozen=True)
class TStarResult:
    kind: str  # "finite" | "infinite" | "indeterminate"
    value: float  # t* (inf when infinite, nan when indeterminate)
    partial_sum: float  # integral up to the deepest shell
    tail_estimate: float
    tail_ratio: float  # measured geometric ratio of the last shells


def tstar(ctx: ClosedFormContext, tol: float = QUAD_TOL) -> TStarResult:
    """Classify and evaluate t* = lim t(tau) as tau -> tau*.

    Dyadic shells tau*(1-2^-k) feed a tail-ratio test; the quadratic
    profile instead uses the known tail exponent of Lbar_0 (finite iff
    lam > 1/2 or lam < 0).
    """
    if math.isinf(ctx.tau_star):
        return TStarResult("infinite", math.inf, math.nan, math.nan, math.nan)
    f = _clock_integrand(ctx, tol)
    ts = ctx.tau_star
    shells = ts * (1.0 - np.power(2.0, -np.arange(0.0, DYADIC_DEPTH + 1.0)))
    seg = np.array([
        _quiet_quad(f, a, b, tol) for a, b in zip(shells[:-1], shells[1:])
    ])
    partial = float(seg.sum())
    ratios = seg[1:] / seg[:-1]
    measured_ratio = float(np.median(ratios[-3:]))

    if ctx.is_quadratic:
        lam = ctx.lam
        if 0.0 < lam <= 0.5:
            return TStarResult("infinite", math.inf, partial, math.inf, measured_ratio)
        # tail exponent of the clock integrand: shells shrink by 2^-(2 lam - 1)
        # for 1/2 < lam < 1; bounded integrand (ratio 1/2) for lam >= 1 or lam < 0
        r = 2.0 ** (-(2.0 * lam - 1.0)) if 0.5 < lam < 1.0 else measured_ratio
        tail = float(seg[-1] * r / (1.0 - r))
        return TStarResult("finite", partial + tail, partial, tail, measured_ratio)

    window = ratios[-3:]
    if np.all(window < 0.9):
        r = measured_ratio
        tail = float(seg[-1] * r / (1.0 - r))
        return TStarResult("finite", partial + tail, partial, tail, measured_ratio)
    if np.all(window > 0.98):
        return TStarResult("infinite", math.inf, partial, math.inf, measured_ratio)
    return TStarResult("indeterminate", math.nan, partial, math.nan, measured_ratio)


# ---------------------------------------------------------------------------
# state along trajectories

def jac_along(alpha0: float, tau: float, ctx: ClosedFormContext, tol: float = QUAD_TOL) -> float:
    """Flow Jacobian at label alpha0: J(alpha0)^{-1/lam} / Lbar_0."""
    _check_tau(ctx, tau)
    if tau == 0.0:
        return 1.0
    l0 = _lbars(tau, ctx, tol)[0]
    j0 = float(jay(ctx, alpha0, tau))
    return j0 ** (-1.0 / ctx.lam) / l0


def ux_along(alpha0: float, tau: float, ctx: ClosedFormContext, tol: float = QUAD_TOL) -> float:
    """Velocity slope along the label-alpha0 trajectory at clock value tau."""
    _check_tau(ctx, tau)
    s0 = float(ctx.slope(alpha0))
    if tau == 0.0:
        return s0
    if tau < _TAU_TINY * min(ctx.tau_star, 1.0):
        # leading-order reduced dynamics; dodges 1/J - Lbar1/Lbar0 cancellation
        rate = ctx.lam * s0 * s0 - (1.0 + ctx.lam) * ctx.slope_norm_sq
        return s0 + tau * rate
    l0, l1, _ = _lbars(tau, ctx, tol)
    j0 = float(jay(ctx, alpha0, tau))
    return l0 ** (-2.0 * ctx.lam) / (ctx.lam * tau) * (1.0 / j0 - l1 / l0)


def omega_solution(alpha, tau: float, ctx: ClosedFormContext, tol: float = QUAD_TOL):
    """Label-space slope power omega = Lbar_0^lam * J(alpha, tau)."""
    _check_tau(ctx, tau)
    l0 = _lbars(tau, ctx, tol)[0] if tau > 0.0 else 1.0
    return l0**ctx.lam * jay(ctx, alpha, tau)


def ux_norm_sq(tau: float, ctx: ClosedFormContext, tol: float = QUAD_TOL) -> float:
    """||u_x||^2 at clock value tau via the Lbar_2 moment identity."""
    _check_tau(ctx, tau)
    if tau == 0.0:
        return ctx.slope_norm_sq
    l0, l1, l2 = _lbars(tau, ctx, tol)
    return l0 ** (-4.0 * ctx.lam - 1.0) * (l2 - l1 * l1 / l0) / (ctx.lam * tau) ** 2


def omega_ode_residual(ctx: ClosedFormContext, alpha0: float, tmap: TauMap | None = None,
                       n_t: int = 200, t_lo_frac: float = 0.05,
                       t_hi_frac: float = 0.8) -> float:
    """Max relative residual of omega'' + lam*I(t)*omega = 0 along a label.

    omega(t) is the label-space slope power composed with the clock map;
    I(t) = -(1+lam)||u_x||^2 on the solvability line. Central second
    differences on a uniform t grid.
    """
    tmap = tmap or TauMap(ctx)
    res = tstar(ctx)
    t_cap = res.value if res.kind == "finite" else tmap.t_max
    t_hi = min(t_hi_frac * t_cap, 0.98 * tmap.t_max)
    t_lo = t_lo_frac * t_hi
    tgrid = np.linspace(t_lo, t_hi, n_t)
    dt = tgrid[1] - tgrid[0]
    taus = np.array([tmap.tau_of_t(t) for t in tgrid])
    om = np.array([float(omega_solution(alpha0, tau, ctx)) for tau in taus])
    forcing = np.array([-(1.0 + ctx.lam) * ux_norm_sq(tau, ctx) for tau in taus])
    second = (om[2:] - 2.0 * om[1:-1] + om[:-2]) / dt**2
    resid = second + ctx.lam * forcing[1:-1] * om[1:-1]
    scale = np.max(np.abs(ctx.lam * forcing[1:-1] * om[1:-1])) + np.max(np.abs(second))
    return float(np.max(np.abs(resid)) / max(scale, 1e-30))


# ---------------------------------------------------------------------------
# quadratic-profile origin asymptote (lam = 1)

def jac_origin_lam1_asymptote(tau: float) -> float:
    """tau -> 1 asymptote of the origin Jacobian for the quadratic profile
    at lam = 1; exact values come from jac_along."""
    if not 0.0 < tau < 1.0:
        raise DomainError("asymptote defined on 0 < tau < 1")
    return 2.0 / ((1.0 - tau) * (math.log(2.0) - math.log(1.0 - tau)))


# ---------------------------------------------------------------------------
# the lam = kappa = 0 transport point

@dataclass(frozen=True)
class ZeroParamsSolution:
    """Exact state of the zero-parameter point at one instant."""

    t: float
    alphas: np.ndarray
    jac: np.ndarray  # flow Jacobian per label
    ux: np.ndarray  # slope along each trajectory
    drop_bound: float  # upper bound on u0' - ux (its lower bound is 0)

    def bound_residual(self, u0: InitialData) -> float:
        """How far the monotone drop bound is violated (0 when satisfied)."""
        drop = np.asarray(u0.deriv(self.alphas, 1)) - self.ux
        return float(max(np.max(-drop, initial=0.0),
                         np.max(drop - self.drop_bound, initial=0.0)))


def zero_params_solution(u0: InitialData, alphas, t: float,
                         tol: float = QUAD_TOL) -> ZeroParamsSolution:
    """Closed-form Jacobian and slope trace at lam = kappa = 0.

    jac = e^{t u0'(alpha)} / integral e^{t u0'}; the slope along each
    trajectory is u0' minus the exponentially weighted slope mean.
    """
    alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
    s = lambda a: float(u0.deriv(a, 1))
    denom = quad(lambda a: math.exp(t * s(a)), 0.0, 1.0, epsabs=1e-300, epsrel=tol)[0]
    num = quad(lambda a: s(a) * math.exp(t * s(a)), 0.0, 1.0, epsabs=1e-300, epsrel=tol)[0]
    slope = np.asarray(u0.deriv(alphas, 1))
    return ZeroParamsSolution(
        t=float(t),
        alphas=alphas,
        jac=np.exp(t * slope) / denom,
        ux=slope - num / denom,
        drop_bound=num,
    )
