"""Iterated delays and the geometric series for the inverse neutral-shift operator.

The operator (Sy)(t) = a(t) y(g(t)) has ||S|| <= A0 < 1 on essentially
bounded functions, so (I-S)^{-1} expands as a series over the iterated
delays g^[k].  This module evaluates truncations of that series with an
a-priori geometric tail bound, including the aggregated coefficient

    B(t) = b(t) + sum_j prod_{k<j} a(g^[k](t)) * b(g^[j](t)),

which is sandwiched between b0/(1-a0) and B0/(1-A0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .funcspec import DelayFunc, FuncExpr, ParamBounds, func_range

__all__ = [
    "IteratedDelayCache",
    "SeriesResult",
    "SeriesError",
    "SeriesConsistencyError",
    "iterated_delay",
    "iterated_delays",
    "apply_inv_I_minus_S",
    "big_B",
]

DEPTH_CAP = 10_000


class SeriesError(RuntimeError):
    """Requested tolerance unreachable within the depth cap."""


class SeriesConsistencyError(RuntimeError):
    """Computed B(t) violates its guaranteed sandwich; signals a bounds bug."""


@dataclass
class IteratedDelayCache:
    base_t: float
    values: list
    K: int


@dataclass
class SeriesResult:
    value: float
    truncation_depth: int
    tail_bound: float


def iterated_delay(g: DelayFunc, t: float, k: int) -> float:
    """The k-fold composition g^[k](t), with g^[0](t) = t."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    out = float(t)
    for _ in range(k):
        out = g.arg(out)
    return out


def iterated_delays(g: DelayFunc, t: float, K: int) -> IteratedDelayCache:
    """All compositions g^[0..K](t); values are nonincreasing since lags >= 0."""
    vals = [float(t)]
    for _ in range(K):
        vals.append(g.arg(vals[-1]))
    return IteratedDelayCache(base_t=float(t), values=vals, K=K)


def _sup_abs(f: FuncExpr, t_lo: float, t_hi: float) -> float:
    lo, hi, _ = func_range(f, t_lo, t_hi, n_samples=4096)
    return max(abs(lo), abs(hi))


def _coef_window(t: float, g: DelayFunc, depth_guess: int) -> tuple:
    # iterates live in [t - depth*sigma, t]; pad one extra sigma
    span = (depth_guess + 1) * max(g.declared_max, 1e-6)
    return (t - span, t)


def apply_inv_I_minus_S(y: FuncExpr, a: FuncExpr, g: DelayFunc, t: float,
                        tol: float, a_max: float | None = None,
                        y_sup: float | None = None,
                        t_min: float | None = None) -> SeriesResult:
    """Evaluate ((I-S)^{-1} y)(t) by series truncation.

    The depth is chosen from the geometric tail bound A0^J * sup|y| / (1-A0)
    < tol.  ``a_max`` and ``y_sup`` may be supplied; otherwise they are
    bounded from the expressions (closed form where recognized, otherwise a
    conservative sample over the reachable window).  When ``t_min`` is given,
    terms whose iterated delay falls below it are dropped, matching the
    truncated operator used on [t_min, infinity).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if a_max is None:
        a_max = _sup_abs(a, *_coef_window(t, g, 200))
    if a_max >= 1.0:
        raise ValueError("neutral coefficient not a contraction (A0 >= 1)")
    if y_sup is None:
        y_sup = max(_sup_abs(y, *_coef_window(t, g, 200)), abs(float(y(t))))

    if a_max == 0.0 or y_sup == 0.0:
        depth = 0
    else:
        depth = max(0, math.ceil(
            (math.log(tol) + math.log(1.0 - a_max) - math.log(y_sup))
            / math.log(a_max)))
    if depth > DEPTH_CAP:
        raise SeriesError(
            f"tolerance {tol} needs depth {depth} > cap {DEPTH_CAP}")

    total = float(y(t))
    prod = 1.0
    tj = float(t)
    used = 0
    for j in range(1, depth + 1):
        prod *= float(a(tj))
        tj = float(g.arg(tj))
        if t_min is not None and tj < t_min:
            break
        total += prod * float(y(tj))
        used = j
    tail = (a_max ** depth) * y_sup / (1.0 - a_max) if a_max > 0 else 0.0
    return SeriesResult(value=total, truncation_depth=max(used, depth),
                        tail_bound=tail)


def big_B(a: FuncExpr, b: FuncExpr, g: DelayFunc, t: float, tol: float,
          bounds: ParamBounds | None = None,
          t_min: float | None = None) -> SeriesResult:
    """The aggregated coefficient B(t) = ((I-S)^{-1} b)(t).

    When ``bounds`` are supplied the sandwich b0/(1-a0) <= B(t) <= B0/(1-A0)
    is enforced up to the truncation tail plus ``tol``; a violation raises
    :class:`SeriesConsistencyError` since it can only come from wrong bounds.
    """
    a_max = bounds.A0 if bounds is not None else None
    y_sup = bounds.B0 if bounds is not None else None
    res = apply_inv_I_minus_S(b, a, g, t, tol, a_max=a_max, y_sup=y_sup,
                              t_min=t_min)
    if bounds is not None:
        lo = bounds.b0 / (1.0 - bounds.a0)
        hi = bounds.B0 / (1.0 - bounds.A0)
        slack = res.tail_bound + tol
        if not (lo - slack <= res.value <= hi + slack):
            raise SeriesConsistencyError(
                f"B({t}) = {res.value} outside [{lo}, {hi}] "
                f"beyond slack {slack}")
    return res
