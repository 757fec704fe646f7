"""Bisection of criterion thresholds over a scalar problem parameter.

A template maps a parameter value to a set of verdicts; each criterion's
satisfied-set is classified over a scan grid (all, none, half-line, single
interval) and the boundaries are located by bisection.  Non-monotone
patterns are never bisected: the scan table is returned instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .criteria import CriterionId, Verdict

__all__ = ["SweepSpec", "ThresholdResult", "find_threshold", "sweep_grid"]


@dataclass
class SweepSpec:
    parameter: str
    lo: float
    hi: float
    criteria: tuple
    tol: float = 1e-6
    scan_points: int = 64

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("need lo < hi")
        if self.tol <= 0.0:
            raise ValueError("tol must be positive")
        if self.scan_points < 16:
            raise ValueError("scan_points must be at least 16")
        self.criteria = tuple(CriterionId(c) for c in self.criteria)


@dataclass
class ThresholdResult:
    criterion: CriterionId
    direction: str  # satisfied_below | satisfied_above | satisfied_inside |
                    # always | never | non_monotone
    lower: float | None = None
    upper: float | None = None
    bracket_verified: bool = False
    scan: list | None = None  # (value, satisfied) pairs when non-monotone

    def to_record(self) -> dict:
        return {
            "criterion": self.criterion.value,
            "direction": self.direction,
            "lower": self.lower,
            "upper": self.upper,
            "bracket_verified": self.bracket_verified,
        }


Template = Callable[[float], Mapping[CriterionId, Verdict]]


def _bisect(sat: Callable[[float], bool], lo: float, hi: float,
            tol: float) -> float:
    """Boundary of a predicate known to differ at lo and hi; midpoint of the
    final bracket of width <= tol/2."""
    s_lo = sat(lo)
    while hi - lo > 0.5 * tol:
        mid = 0.5 * (lo + hi)
        if sat(mid) == s_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def find_threshold(spec: SweepSpec, template: Template) -> list:
    """Locate each criterion's satisfaction boundary over the parameter."""
    xs = np.linspace(spec.lo, spec.hi, spec.scan_points)
    scans = {cid: [] for cid in spec.criteria}
    for x in xs:
        verdicts = template(float(x))
        for cid in spec.criteria:
            scans[cid].append(bool(verdicts[cid].satisfied))

    def sat_fn(cid):
        return lambda v: bool(template(v)[cid].satisfied)

    results = []
    for cid in spec.criteria:
        pattern = scans[cid]
        flips = [i for i in range(1, len(pattern))
                 if pattern[i] != pattern[i - 1]]
        sat = sat_fn(cid)
        scan_table = list(zip(map(float, xs), pattern))
        if not flips:
            direction = "always" if pattern[0] else "never"
            results.append(ThresholdResult(cid, direction, scan=scan_table))
            continue
        if len(flips) == 1:
            i = flips[0]
            thr = _bisect(sat, float(xs[i - 1]), float(xs[i]), spec.tol)
            ok = sat(thr - 2 * spec.tol) != sat(thr + 2 * spec.tol)
            if pattern[0]:
                results.append(ThresholdResult(
                    cid, "satisfied_below", upper=thr, bracket_verified=ok))
            else:
                results.append(ThresholdResult(
                    cid, "satisfied_above", lower=thr, bracket_verified=ok))
            continue
        if len(flips) == 2 and not pattern[0] and not pattern[-1]:
            i, j = flips
            lo_thr = _bisect(sat, float(xs[i - 1]), float(xs[i]), spec.tol)
            hi_thr = _bisect(sat, float(xs[j - 1]), float(xs[j]), spec.tol)
            ok = (sat(lo_thr - 2 * spec.tol) != sat(lo_thr + 2 * spec.tol)
                  and sat(hi_thr - 2 * spec.tol) != sat(hi_thr + 2 * spec.tol))
            results.append(ThresholdResult(
                cid, "satisfied_inside", lower=lo_thr, upper=hi_thr,
                bracket_verified=ok))
            continue
        results.append(ThresholdResult(cid, "non_monotone", scan=scan_table))
    return results


def sweep_grid(spec: SweepSpec, template: Template,
               n_points: int | None = None) -> list:
    """Full verdict grid as flat row records (one per value x criterion)."""
    n = n_points if n_points is not None else spec.scan_points
    rows = []
    for x in np.linspace(spec.lo, spec.hi, n):
        verdicts = template(float(x))
        for cid in spec.criteria:
            rec = verdicts[cid].to_record()
            rec = {spec.parameter: float(x), **rec}
            rows.append(rec)
    return rows
