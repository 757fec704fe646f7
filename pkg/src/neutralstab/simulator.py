"""Uniform-grid integrator for scalar neutral delay differential equations.

The stepped equation is

    x'(t) = a(t) x'(g(t)) - b(t) x(h(t)) + f(t),

advanced with an explicit two-stage predictor-corrector (Heun).  Solution
history is interpolated with cubic Hermite pieces; derivative history with
linear pieces, since x' of a neutral equation is at best piecewise
continuous.  When g(t) lands inside the current step (including g(t) = t)
the derivative identity is resolved by fixed-point iteration, which
contracts with factor at most A0 < 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .funcspec import DelayFunc, FuncExpr, const_expr

__all__ = [
    "NDDEProblem",
    "Trajectory",
    "DecayEstimate",
    "Lemma45Report",
    "IntegrationError",
    "integrate",
    "fundamental",
    "estimate_decay",
    "check_lemma4_5",
]

DIVERGENCE_CUTOFF = 1e12
_FP_TOL = 1e-12
_FP_MAX_ITER = 100


class IntegrationError(RuntimeError):
    pass


class _TrajectoryFlag(Exception):
    def __init__(self, flag: str):
        self.flag = flag


@dataclass(eq=False)
class NDDEProblem:
    """Data of the initial value problem for the neutral equation."""

    a: FuncExpr
    b: FuncExpr
    g: DelayFunc
    h: DelayFunc
    f: FuncExpr
    phi: FuncExpr
    psi: FuncExpr
    t0: float = 0.0


@dataclass(eq=False)
class Trajectory:
    """Uniform-grid solution with values and derivatives.

    ``x_at``/``dx_at`` interpolate inside [t0, T] (cubic Hermite / linear)
    and fall back to the history functions before t0.
    """

    t0: float
    dt: float
    x: np.ndarray
    dx: np.ndarray
    phi: Callable
    psi: Callable
    flag: str | None = None
    diverged_at: float | None = None

    @property
    def T(self) -> float:
        return self.t0 + (len(self.x) - 1) * self.dt

    @property
    def grid(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self.x))

    def x_at(self, t: float) -> float:
        if t < self.t0:
            return float(self.phi(t))
        if t == self.t0:
            return float(self.x[0])
        n = len(self.x) - 1
        u = (t - self.t0) / self.dt
        j = min(max(int(u), 0), n - 1)
        s = u - j
        s2, s3 = s * s, s * s * s
        return float((2 * s3 - 3 * s2 + 1) * self.x[j]
                     + (s3 - 2 * s2 + s) * self.dt * self.dx[j]
                     + (-2 * s3 + 3 * s2) * self.x[j + 1]
                     + (s3 - s2) * self.dt * self.dx[j + 1])

    def dx_at(self, t: float) -> float:
        if t < self.t0:
            return float(self.psi(t))
        n = len(self.x) - 1
        u = (t - self.t0) / self.dt
        j = min(max(int(u), 0), n - 1)
        w = u - j
        return float((1 - w) * self.dx[j] + w * self.dx[j + 1])

    def to_text(self, path, with_derivative: bool = True) -> None:
        """Write (t, x) or (t, x, dx) columns for external plotting."""
        cols = [self.grid, self.x] + ([self.dx] if with_derivative else [])
        np.savetxt(path, np.column_stack(cols), fmt="%.12g")


def _integrate_core(t0, T, dt, x0, phi, psi, deriv_factory):
    if dt <= 0:
        raise ValueError("dt must be positive")
    n = int(round((T - t0) / dt))
    if n < 1:
        raise ValueError("T must exceed t0 by at least one step")
    grid = t0 + dt * np.arange(n + 1)
    x = np.full(n + 1, np.nan)
    dx = np.full(n + 1, np.nan)
    # left limits of x' at the nodes; they differ from dx only where a
    # propagated breaking point lands exactly on a node
    dxl = np.full(n + 1, np.nan)
    eps = 1e-9 * dt

    def x_past(tq, m, left=False):
        # value of x at tq <= grid[m] (m = -1 means only history available);
        # left=True gives the left limit, which differs from x[0] at t0 when
        # the start value jumps away from the history (fundamental function)
        if tq < t0 or (left and tq <= t0 + eps):
            return float(phi(tq))
        if tq <= t0 + eps or m < 1:
            return float(x[0])
        u = (tq - t0) / dt
        j = min(int(u), m - 1)
        s = u - j
        s2, s3 = s * s, s * s * s
        return ((2 * s3 - 3 * s2 + 1) * x[j]
                + (s3 - 2 * s2 + s) * dt * dx[j]
                + (-2 * s3 + 3 * s2) * x[j + 1]
                + (s3 - s2) * dt * dx[j + 1])

    def dx_past(tq, m, left=False):
        # left=True asks for the left limit of x' at tq, which differs from
        # the stored (right) value when tq hits a propagated breaking point
        # exactly; the corrector's trapezoid stage integrates over the open
        # step and needs the left-side value there
        if tq < t0 or (left and tq <= t0 + eps):
            return float(psi(tq))
        if tq <= t0 + eps or m < 1:
            return float(dx[0])
        u = (tq - t0) / dt
        if left:
            j = int(round(u))
            if abs(u - j) < 1e-6 and 1 <= j <= m:
                return float(dxl[j])
        j = min(int(u), m - 1)
        w = u - j
        return (1 - w) * dx[j] + w * dx[j + 1]

    deriv = deriv_factory(grid, x, dx, x_past, dx_past, eps)

    x[0] = float(x0)
    flag = None
    diverged_at = None
    last = n
    i = 0
    try:
        dx[0] = deriv(0, x[0])
        dxl[0] = float(psi(t0))
        for i in range(1, n + 1):
            xp = x[i - 1] + dt * dx[i - 1]
            dp = deriv(i, xp, left=True)
            xc = x[i - 1] + 0.5 * dt * (dx[i - 1] + dp)
            x[i] = xc
            dx[i] = deriv(i, xc)
            dxl[i] = deriv(i, xc, left=True)
            if not (math.isfinite(x[i]) and math.isfinite(dx[i])):
                flag = "diverged"
                diverged_at = grid[i]
                last = i - 1
                break
            if abs(x[i]) > DIVERGENCE_CUTOFF:
                flag = "diverged"
                diverged_at = grid[i]
                last = i
                break
    except _TrajectoryFlag as exc:
        flag = exc.flag
        diverged_at = grid[i]
        last = max(i - 1, 0)

    return Trajectory(t0=t0, dt=dt, x=x[:last + 1], dx=dx[:last + 1],
                      phi=phi, psi=psi, flag=flag, diverged_at=diverged_at)


def _linear_factory(p: NDDEProblem, forcing):
    def factory(grid, x, dx, x_past, dx_past, eps):
        t0 = grid[0]
        dt = grid[1] - grid[0]
        A = p.a(grid)
        Bv = p.b(grid)
        F = forcing(grid)
        G = grid - p.g.lag(grid)
        H = grid - p.h.lag(grid)
        if np.any(G > grid + eps) or np.any(H > grid + eps):
            raise ValueError("negative lag on the integration grid")

        def deriv(i, x_cand, left=False):
            m = i - 1
            tq = G[i]
            hq = H[i]
            tm = grid[m] if m >= 0 else t0
            # x(h(t))
            if hq <= tm + eps:
                xh = x_past(hq, m, left)
            else:
                w = (hq - tm) / dt
                xh = x[m] + w * (x_cand - x[m])
            base = -Bv[i] * xh + F[i]
            if A[i] == 0.0:
                return base
            # x'(g(t))
            if i == 0:
                if tq < t0 - eps:
                    return A[0] * dx_past(tq, m) + base
                denom = 1.0 - A[0]
                if abs(denom) < 1e-15:
                    raise IntegrationError("neutral term is not a contraction")
                return base / denom
            if tq <= tm + eps:
                return A[i] * dx_past(tq, m, left) + base
            w = (tq - tm) / dt
            d = dx[m]
            for _ in range(_FP_MAX_ITER):
                dg = dx[m] + w * (d - dx[m])
                dn = A[i] * dg + base
                if abs(dn - d) < _FP_TOL * max(1.0, abs(dn)):
                    return dn
                d = dn
            raise IntegrationError(
                f"neutral fixed-point iteration failed at t={grid[i]}")

        return deriv

    return factory


def _check_dt(dt: float, *lags: float) -> None:
    positive = [ell for ell in lags if ell > 0.0]
    if positive and dt > min(positive) / 4.0 + 1e-12:
        raise ValueError("dt must be at most a quarter of the smallest "
                         "positive lag bound")


def integrate(p: NDDEProblem, T: float, dt: float) -> Trajectory:
    """Integrate the initial value problem on [t0, T] with step dt."""
    _check_dt(dt, p.g.declared_max, p.h.declared_max)
    return _integrate_core(p.t0, T, dt, p.phi(p.t0), p.phi, p.psi,
                           _linear_factory(p, p.f))


def fundamental(p: NDDEProblem, s: float, T: float, dt: float) -> Trajectory:
    """The fundamental function X(., s): unit value at s, zero before."""
    if s < p.t0:
        raise ValueError("s must not precede the problem start time")
    _check_dt(dt, p.g.declared_max, p.h.declared_max)
    zero = lambda t: 0.0
    zero_f = const_expr(0.0)
    shifted = NDDEProblem(a=p.a, b=p.b, g=p.g, h=p.h, f=zero_f,
                          phi=zero_f, psi=zero_f, t0=s)
    return _integrate_core(s, T, dt, 1.0, zero, zero,
                           _linear_factory(shifted, zero_f))


# ---------------------------------------------------------------------------
# Decay classification
# ---------------------------------------------------------------------------

@dataclass
class DecayEstimate:
    gamma_est: float
    M_est: float
    fit_residual: float
    verdict: str  # decaying | nondecaying | inconclusive
    envelope_start: float = 0.0
    envelope_end: float = 0.0
    tail_fraction: float = 0.5
    drop_ratio: float = 0.01


def estimate_decay(tr: Trajectory, tail_fraction: float = 0.5,
                   drop_ratio: float = 0.01,
                   n_blocks: int = 20) -> DecayEstimate:
    """Fit an exponential envelope to the trailing part of a trajectory.

    The tail window is split into blocks; the per-block maximum of |x| is
    the envelope.  "decaying" needs a positive fitted rate and an envelope
    drop below ``drop_ratio`` over the window.
    """
    if tr.flag == "diverged":
        raise ValueError("trajectory is flagged diverged")
    if not (0.0 < tail_fraction < 1.0):
        raise ValueError("tail_fraction must be in (0, 1)")
    grid = tr.grid
    absx = np.abs(tr.x)
    i0 = int((1.0 - tail_fraction) * (len(grid) - 1))
    chunks = np.array_split(absx[i0:], n_blocks)
    times = np.array_split(grid[i0:], n_blocks)
    env = np.array([c.max() for c in chunks if len(c)])
    tmid = np.array([t.mean() for t in times if len(t)])

    if env.max() == 0.0:
        return DecayEstimate(gamma_est=math.inf, M_est=0.0, fit_residual=0.0,
                             verdict="decaying", tail_fraction=tail_fraction,
                             drop_ratio=drop_ratio)
    pos = env > 0.0
    gamma = 0.0
    M_est = float(env[0])
    residual = 0.0
    if pos.sum() >= 2:
        c1, c0 = np.polyfit(tmid[pos], np.log(env[pos]), 1)
        gamma = -float(c1)
        M_est = float(math.exp(c0 + c1 * tr.t0))
        fit = c0 + c1 * tmid[pos]
        residual = float(np.sqrt(np.mean((np.log(env[pos]) - fit) ** 2)))

    env_first, env_last = float(env[0]), float(env[-1])
    if env_last == 0.0 or (gamma > 0.0 and env_last < drop_ratio * env_first):
        verdict = "decaying"
    elif env_last >= env_first:
        verdict = "nondecaying"
    else:
        verdict = "inconclusive"
    return DecayEstimate(gamma_est=gamma, M_est=M_est, fit_residual=residual,
                         verdict=verdict, envelope_start=env_first,
                         envelope_end=env_last, tail_fraction=tail_fraction,
                         drop_ratio=drop_ratio)


# ---------------------------------------------------------------------------
# Numerical facts about the auxiliary single-delay equation
#   x'(t) + B(t) x(t - tau0) = 0
# ---------------------------------------------------------------------------

@dataclass
class Lemma45Report:
    window_max: float
    window_ok: bool
    min_X0: float
    max_integral: float
    decay: DecayEstimate
    applicable: bool
    notes: list = field(default_factory=list)


def check_lemma4_5(Bfun: FuncExpr, tau0: float, t0: float, T: float,
                   dt: float, positivity_horizon: float = 5.0,
                   n_s: int = 12) -> Lemma45Report:
    """Check the 1/e positivity test and the unit integral bound numerically.

    Reports max_t of the window integral of B (1/e test), the minimum of the
    fundamental function X0 over an (s, t) grid, the maximum over t of
    int_{t0+tau0}^t X0(t,s) B(s) ds, and a decay verdict for X0(., t0).
    The integral is evaluated as the forced solution y' = -B y(t-tau0) +
    B(t) 1_{t >= t0+tau0}, which equals it exactly by variation of
    constants; the stepping rule is the trapezoidal (Heun) update.
    """
    if tau0 < 0.0 or T <= t0:
        raise ValueError("need tau0 >= 0 and T > t0")
    notes = []
    # align the step so that t0 + tau0 is a grid point
    dt_eff = tau0 / math.ceil(tau0 / dt) if tau0 > 0.0 else dt

    grid = t0 + dt_eff * np.arange(int(round((T - t0) / dt_eff)) + 1)
    Bvals = Bfun(grid)
    b_min = float(np.min(Bvals))
    if b_min <= 0.0:
        notes.append("B(t) is not bounded below by a positive constant")

    if tau0 > 0.0:
        cum = np.concatenate(
            ([0.0], np.cumsum(0.5 * (Bvals[1:] + Bvals[:-1]) * dt_eff)))
        k = int(round(tau0 / dt_eff))
        window_max = float(np.max(cum[k:] - cum[:-k]))
    else:
        window_max = 0.0
    window_ok = window_max <= 1.0 / math.e + 1e-9
    if not window_ok:
        notes.append("1/e window condition fails: lemma inapplicable, "
                     "diagnostics still computed")

    prob = NDDEProblem(a=const_expr(0.0), b=Bfun,
                       g=DelayFunc(const_expr(0.0), 0.0, 0.0),
                       h=DelayFunc(const_expr(tau0), tau0, tau0),
                       f=const_expr(0.0), phi=const_expr(0.0),
                       psi=const_expr(0.0), t0=t0)

    # positivity of X0 on an (s, t) grid with t - s bounded so that the
    # exact values stay above the numerical noise floor
    ph = min(positivity_horizon, T - t0)
    s_hi = max(t0, T - ph)
    s_vals = np.linspace(t0, s_hi, n_s)
    min_X0 = math.inf
    for s in s_vals:
        trs = fundamental(prob, float(s), float(s) + ph, dt_eff)
        min_X0 = min(min_X0, float(np.min(trs.x)))

    tr0 = fundamental(prob, t0, T, dt_eff)
    decay = estimate_decay(tr0)

    def step_forcing(tt):
        return np.where(np.asarray(tt) >= t0 + tau0 - 1e-12, 1.0, 0.0) * Bfun(tt)

    zero = lambda t: 0.0
    ytr = _integrate_core(t0, T, dt_eff, 0.0, zero, zero,
                          _linear_factory(prob, step_forcing))
    max_integral = float(np.max(ytr.x))

    return Lemma45Report(window_max=window_max, window_ok=window_ok,
                         min_X0=min_X0, max_integral=max_integral,
                         decay=decay,
                         applicable=window_ok and b_min > 0.0, notes=notes)
