"""Neutral logistic population model: simulation, linearization, local tests.

The model is

    x'(t) = r(t) x(t) (1 - (x(h(t)) - rho x'(g(t))) / K),

with carrying capacity K > 0 and neutral weight rho > 0.  Local stability
about K is checked both through the printed logistic inequalities and
through the linearized neutral equation z' = -r(t)[z(h(t)) - rho z'(g(t))].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .criteria import (check_all, eval_logistic_cor, eval_logistic_thm,
                       eval_yu_prop1)
from .funcspec import DelayFunc, FuncExpr, const_expr, func_range, scale_expr
from .simulator import (NDDEProblem, Trajectory, _TrajectoryFlag, _check_dt,
                        _FP_MAX_ITER, _FP_TOL, _integrate_core)

__all__ = [
    "LogisticProblem",
    "integrate_logistic",
    "linearize",
    "check_local_stability",
]


@dataclass(eq=False)
class LogisticProblem:
    r: FuncExpr
    K: float
    rho: float
    g: DelayFunc
    h: DelayFunc
    phi: FuncExpr
    psi: FuncExpr
    t0: float = 0.0

    def __post_init__(self):
        if self.K <= 0.0:
            raise ValueError("carrying capacity K must be positive")
        if self.rho <= 0.0:
            raise ValueError("neutral weight rho must be positive")

    def r_bounds(self, horizon=None, n_samples: int = 100_000):
        """(r0, R0) over the working horizon; validates R0*rho < 1."""
        if horizon is None:
            length = max(10.0 * max(self.g.declared_max,
                                    self.h.declared_max), 20.0)
            horizon = (self.t0, self.t0 + length)
        r0, R0, _ = func_range(self.r, horizon[0], horizon[1], n_samples)
        if r0 <= 0.0:
            raise ValueError("intrinsic rate must be positive")
        if R0 * self.rho >= 1.0:
            raise ValueError("need R0*rho < 1")
        return r0, R0


def _logistic_factory(p: LogisticProblem):
    K = p.K
    rho = p.rho

    def factory(grid, x, dx, x_past, dx_past, eps):
        t0 = grid[0]
        dt = grid[1] - grid[0]
        R = p.r(grid)
        G = grid - p.g.lag(grid)
        H = grid - p.h.lag(grid)
        if np.any(G > grid + eps) or np.any(H > grid + eps):
            raise ValueError("negative lag on the integration grid")

        def deriv(i, x_cand, left=False):
            if x_cand <= 0.0:
                raise _TrajectoryFlag("reached_zero")
            m = i - 1
            tq = G[i]
            hq = H[i]
            tm = grid[m] if m >= 0 else t0
            if hq <= tm + eps:
                xh = x_past(hq, m, left)
            else:
                w = (hq - tm) / dt
                xh = x[m] + w * (x_cand - x[m])

            def rhs(dg):
                return R[i] * x_cand * (1.0 - (xh - rho * dg) / K)

            if i == 0:
                if tq < t0 - eps:
                    return rhs(dx_past(tq, m))
                # g(t0) = t0: solve d = rhs(d), linear in d
                c = R[0] * x_cand * rho / K
                if abs(1.0 - c) < 1e-12 or abs(c) >= 1.0:
                    raise _TrajectoryFlag("left_contraction_region")
                return R[0] * x_cand * (1.0 - xh / K) / (1.0 - c)
            if tq <= tm + eps:
                return rhs(dx_past(tq, m, left))
            w = (tq - tm) / dt
            if abs(R[i] * x_cand * rho / K * w) >= 1.0:
                raise _TrajectoryFlag("left_contraction_region")
            d = dx[m]
            for _ in range(_FP_MAX_ITER):
                dg = dx[m] + w * (d - dx[m])
                dn = rhs(dg)
                if abs(dn - d) < _FP_TOL * max(1.0, abs(dn)):
                    return dn
                d = dn
            raise _TrajectoryFlag("left_contraction_region")

        return deriv

    return factory


def integrate_logistic(p: LogisticProblem, T: float, dt: float) -> Trajectory:
    """Integrate the logistic model on [t0, T]; flags rather than raises
    when the solution reaches zero or the neutral term stops contracting."""
    _check_dt(dt, p.g.declared_max, p.h.declared_max)
    return _integrate_core(p.t0, T, dt, p.phi(p.t0), p.phi, p.psi,
                           _logistic_factory(p))


def linearize(p: LogisticProblem, phi: FuncExpr | None = None,
              psi: FuncExpr | None = None) -> NDDEProblem:
    """Linearization about K in deviation variables z = x - K:

        z'(t) - rho r(t) z'(g(t)) = -r(t) z(h(t)),

    i.e. a(t) = rho*r(t) and b(t) = r(t) with the same delays.  Optional
    histories give the initial deviation; default zero.
    """
    zero = const_expr(0.0)
    return NDDEProblem(a=scale_expr(p.rho, p.r), b=p.r, g=p.g, h=p.h,
                       f=zero, phi=phi if phi is not None else zero,
                       psi=psi if psi is not None else zero, t0=p.t0)


def _const_lag(d: DelayFunc, horizon) -> float | None:
    lo, hi, exact = d.lag_range(horizon[0], horizon[1], n_samples=4096)
    if exact and lo == hi:
        return lo
    return None


def check_local_stability(p: LogisticProblem, horizon=None,
                          n_samples: int = 100_000) -> list:
    """All applicable local stability verdicts about the equilibrium K."""
    if horizon is None:
        length = max(10.0 * max(p.g.declared_max, p.h.declared_max), 20.0)
        horizon = (p.t0, p.t0 + length)
    r0, R0 = p.r_bounds(horizon, n_samples)
    tau = p.h.declared_max
    sigma = p.g.declared_max
    h_lo, _, _ = p.h.lag_range(horizon[0], horizon[1], n_samples)
    h_lag_inf = min(max(h_lo, p.h.declared_min, 0.0), tau)

    verdicts = list(eval_logistic_thm(r0, R0, p.rho, tau, sigma, h_lag_inf,
                                      mode="as_stated"))
    verdicts.extend(eval_logistic_thm(r0, R0, p.rho, tau, sigma, h_lag_inf,
                                      mode="derived"))

    r_const = r0 == R0
    lag_g = _const_lag(p.g, horizon)
    lag_h = _const_lag(p.h, horizon)
    autonomous = (r_const and lag_g is not None and lag_h is not None
                  and lag_g == lag_h)
    if autonomous:
        verdicts.append(eval_logistic_cor(r0, p.rho, lag_h))
        verdicts.append(eval_yu_prop1(r0, p.rho, lag_h))

    res = check_all(linearize(p), horizon=horizon, n_samples=n_samples)
    for v in res.verdicts:
        v.notes.append("evaluated on the linearization about K")
    verdicts.extend(res.verdicts)
    return verdicts
