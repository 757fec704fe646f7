"""Explicit exponential-stability criteria with quantified verdicts.

Each criterion reduces to a strict inequality lhs < rhs on the scalar
bounds of the problem; verdicts carry both sides and the margin so callers
can apply their own safety factors.  All conditions are sufficient only:
an unsatisfied verdict certifies nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .funcspec import FuncExpr, ParamBounds, _affine_sin, extract_bounds

__all__ = [
    "CriterionId",
    "Verdict",
    "CheckResult",
    "eval_thm1_a",
    "eval_thm1_b",
    "eval_cor1",
    "eval_cor2",
    "eval_logistic_thm",
    "eval_logistic_cor",
    "eval_yu_prop1",
    "eval_tangzou",
    "limsup_window_integral",
    "tangzou_N",
    "check_all",
]

_E = math.e
_ONE_PLUS_1E = 1.0 + 1.0 / math.e


class CriterionId(str, Enum):
    THM1_A = "THM1_A"
    THM1_B = "THM1_B"
    COR1_A = "COR1_A"
    COR1_B = "COR1_B"
    COR2 = "COR2"
    LOG_THM_A = "LOG_THM_A"
    LOG_THM_B = "LOG_THM_B"
    LOG_THM_A_DERIVED = "LOG_THM_A_DERIVED"
    LOG_THM_B_DERIVED = "LOG_THM_B_DERIVED"
    LOG_COR = "LOG_COR"
    YU_PROP1 = "YU_PROP1"
    TANGZOU_1 = "TANGZOU_1"
    TANGZOU_2 = "TANGZOU_2"


@dataclass
class Verdict:
    criterion: CriterionId
    lhs: float
    rhs: float
    satisfied: bool
    margin: float
    precondition_ok: bool
    notes: list = field(default_factory=list)

    def to_record(self) -> dict:
        return {
            "criterion": self.criterion.value,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "satisfied": self.satisfied,
            "precondition_ok": self.precondition_ok,
            "notes": "; ".join(self.notes),
        }


def _verdict(cid, lhs, rhs, precondition_ok=True, notes=()) -> Verdict:
    lhs = float(lhs)
    rhs = float(rhs)
    return Verdict(
        criterion=cid,
        lhs=lhs,
        rhs=rhs,
        satisfied=bool(precondition_ok and lhs < rhs),
        margin=rhs - lhs,
        precondition_ok=bool(precondition_ok),
        notes=list(notes),
    )


def _skipped(cid, reason: str) -> Verdict:
    return _verdict(cid, math.nan, math.nan, precondition_ok=False,
                    notes=[f"skipped: {reason}"])


def _thm1_lhs(p: ParamBounds) -> float:
    second = 0.0
    if p.sigma > 0.0:
        second = (p.sigma * p.A0 * p.B0 ** 2 * (1.0 - p.a0)
                  / ((1.0 - p.A0) ** 2 * p.b0))
    return p.tau * p.B0 + second


def eval_thm1_a(p: ParamBounds) -> Verdict:
    """tau*B0 + sigma*A0*B0^2*(1-a0)/((1-A0)^2*b0) < 1 - A0."""
    return _verdict(CriterionId.THM1_A, _thm1_lhs(p), 1.0 - p.A0)


def eval_thm1_b(p: ParamBounds) -> Verdict:
    """Same left side against (1+1/e)(1-A0), requiring a lag floor on h."""
    floor = (1.0 - p.A0) / (_E * p.B0)
    pre = p.h_lag_inf >= floor
    notes = [] if pre else [
        f"lag floor violated: ess inf(t-h(t)) = {p.h_lag_inf} < {floor}"]
    return _verdict(CriterionId.THM1_B, _thm1_lhs(p),
                    _ONE_PLUS_1E * (1.0 - p.A0), precondition_ok=pre,
                    notes=notes)


def eval_cor1(a: float, b: float, tau: float, sigma: float,
              h_lag_inf: float) -> tuple:
    """Constant-coefficient specialisation; returns the (a, b) verdict pair."""
    if not (0.0 <= a < 1.0 and b > 0.0):
        raise ValueError("need 0 <= a < 1 and b > 0")
    lhs = tau * b + (sigma * a * b / (1.0 - a) if sigma > 0.0 else 0.0)
    va = _verdict(CriterionId.COR1_A, lhs, 1.0 - a)
    floor = (1.0 - a) / (_E * b)
    pre = h_lag_inf >= floor
    notes = [] if pre else [
        f"lag floor violated: ess inf(t-h(t)) = {h_lag_inf} < {floor}"]
    vb = _verdict(CriterionId.COR1_B, lhs, _ONE_PLUS_1E * (1.0 - a),
                  precondition_ok=pre, notes=notes)
    return va, vb


def eval_cor2(p: ParamBounds) -> Verdict:
    """Non-delayed x-term case (h(t) = t): sigma*A0*B0^2*(1-a0)/((1-A0)^3*b0) < 1."""
    lhs = 0.0
    if p.sigma > 0.0 and p.A0 > 0.0:
        lhs = (p.sigma * p.A0 * p.B0 ** 2 * (1.0 - p.a0)
               / ((1.0 - p.A0) ** 3 * p.b0))
    return _verdict(CriterionId.COR2, lhs, 1.0)


def eval_logistic_thm(r0: float, R0: float, rho: float, tau: float,
                      sigma: float, h_lag_inf: float,
                      mode: str = "as_stated") -> tuple:
    """Local stability test for the neutral logistic equation about K.

    mode="as_stated" evaluates the printed inequalities verbatim;
    mode="derived" maps the linearization (a = rho*r, b = r) onto the
    general neutral test and delegates.  The two disagree by design; report
    both.
    """
    if not (0.0 < r0 <= R0) or rho <= 0.0:
        raise ValueError("need 0 < r0 <= R0 and rho > 0")
    if R0 * rho >= 1.0:
        raise ValueError("need R0*rho < 1")
    if mode == "derived":
        pb = ParamBounds(a0=r0 * rho, A0=R0 * rho, b0=r0, B0=R0,
                         tau=tau, sigma=sigma, h_lag_inf=h_lag_inf)
        va, vb = eval_thm1_a(pb), eval_thm1_b(pb)
        va.criterion = CriterionId.LOG_THM_A_DERIVED
        vb.criterion = CriterionId.LOG_THM_B_DERIVED
        note = "linearization mapped to a=rho*r, b=r"
        va.notes.append(note)
        vb.notes.append(note)
        return va, vb
    if mode != "as_stated":
        raise ValueError("mode must be 'as_stated' or 'derived'")

    pre_a = True
    notes_a = []
    if R0 >= 1.0:
        pre_a = False
        notes_a.append("printed right side 1-R0 is nonpositive (R0 >= 1)")
    second = 0.0
    if sigma > 0.0:
        second = (sigma * R0 ** 2 * rho * (1.0 - r0)
                  / ((1.0 - R0) ** 2 * r0))
    lhs = tau * R0 * rho + second
    va = _verdict(CriterionId.LOG_THM_A, lhs, 1.0 - R0,
                  precondition_ok=pre_a, notes=notes_a)
    floor = (1.0 - R0) / (_E * R0 * rho)
    pre_b = pre_a and h_lag_inf >= floor
    notes_b = list(notes_a)
    if pre_a and not pre_b:
        notes_b.append(
            f"lag floor violated: ess inf(t-h(t)) = {h_lag_inf} < {floor}")
    vb = _verdict(CriterionId.LOG_THM_B, lhs, _ONE_PLUS_1E * (1.0 - R0),
                  precondition_ok=pre_b, notes=notes_b)
    return va, vb


def eval_logistic_cor(r0: float, rho: float, tau: float) -> Verdict:
    """Equal-constant-delay logistic test (two branches, either suffices)."""
    if r0 * rho >= 1.0:
        raise ValueError("need r0*rho < 1")
    x = tau * r0 * rho
    first_rhs = (1.0 - r0) ** 2
    low = (1.0 - r0) / _E
    second_rhs = _ONE_PLUS_1E * (1.0 - r0) ** 2
    if x < first_rhs:
        return _verdict(CriterionId.LOG_COR, x, first_rhs,
                        notes=["first branch binding"])
    if low < x < second_rhs:
        return _verdict(CriterionId.LOG_COR, x, second_rhs,
                        notes=[f"second branch binding (tau*r0*rho > {low})"])
    if x <= low:
        # gap between the branches (only when 1-r0 < 1/e)
        return _verdict(CriterionId.LOG_COR, x, first_rhs,
                        notes=["in the gap between the two branches"])
    return _verdict(CriterionId.LOG_COR, x, second_rhs)


def eval_yu_prop1(r0: float, rho: float, tau: float) -> Verdict:
    """Classical comparison test for the autonomous neutral logistic model."""
    if r0 <= 0.0:
        raise ValueError("need r0 > 0")
    q = r0 * abs(rho)
    lhs = 2.0 * q * (2.0 - q) + r0 * tau
    return _verdict(CriterionId.YU_PROP1, lhs, 1.5,
                    notes=["ambiguous 'r*tau' term read as r0*tau"])


# ---------------------------------------------------------------------------
# sliding-window comparison criteria (window integrals of b)
# ---------------------------------------------------------------------------

def tangzou_N(a: float) -> int:
    """Smallest positive integer N with a + (3/2) a^N <= 1."""
    if not (0.0 < a < 1.0):
        raise ValueError("need 0 < a < 1")
    N = 1
    while a + 1.5 * a ** N > 1.0:
        N += 1
        if N > 10 ** 6:
            raise RuntimeError("N search did not terminate")
    return N


def limsup_window_integral(b: FuncExpr, window: float,
                           horizon: float | None = None) -> tuple:
    """limsup over t of the integral of b over [t-window, t].

    Closed form for b = c0 + c1*sin(w*t + phase); otherwise a sliding-window
    maximum over a finite horizon (>= 3 windows required).  Returns
    ``(value, method)`` with method in {"closed_form", "numeric"}.
    """
    if window < 0.0:
        raise ValueError("window must be nonnegative")
    if window == 0.0:
        return 0.0, "closed_form"
    rec = _affine_sin(b.ast)
    if rec is not None and horizon is None:
        c0, c1, w, _ = rec
        if c1 == 0.0:
            return c0 * window, "closed_form"
        if w != 0.0:
            return (c0 * window
                    + (2.0 * abs(c1) / abs(w))
                    * abs(math.sin(w * window / 2.0))), "closed_form"
    if horizon is None:
        horizon = max(3.0 * window, window + 20.0)
    if horizon < 3.0 * window:
        raise ValueError("horizon must cover at least 3 windows; "
                         "the sliding-window limsup is unreliable")
    m = max(int(math.ceil(window / 1e-3)), 64)
    step = window / m
    n = int(math.ceil(horizon / step))
    ts = step * np.arange(n + 1)
    vals = b(ts)
    cum = np.concatenate(([0.0], np.cumsum(0.5 * (vals[1:] + vals[:-1]) * step)))
    windows = cum[m:] - cum[:-m]
    return float(np.max(windows)), "numeric"


def eval_tangzou(a: float, b: FuncExpr, tau: float, sigma: float,
                 horizon: float | None = None) -> tuple:
    """Both sliding-window conditions; returns (Verdict, Verdict)."""
    N = tangzou_N(a)
    w1 = 3.0 * tau + (N - 1) * sigma
    w2 = tau + (N - 1) * sigma
    rhs1 = 1.5 - 2.0 * a * (1.0 - a / 4.0)
    rhs2 = (3.0 - 4.0 * a ** N) * (1.0 - a) / (2.0 * (1.0 - a ** N))
    lhs1, m1 = limsup_window_integral(b, w1, horizon)
    lhs2, m2 = limsup_window_integral(b, w2, horizon)
    v1 = _verdict(CriterionId.TANGZOU_1, lhs1, rhs1,
                  notes=[f"N={N}, window={w1}, limsup via {m1}"])
    v2 = _verdict(CriterionId.TANGZOU_2, lhs2, rhs2,
                  notes=[f"N={N}, window={w2}, limsup via {m2}"])
    return v1, v2


# ---------------------------------------------------------------------------
# Run everything applicable
# ---------------------------------------------------------------------------

@dataclass
class CheckResult:
    verdicts: list
    certified: bool
    bounds: ParamBounds | None

    def to_records(self) -> list:
        return [v.to_record() for v in self.verdicts]


def check_all(problem, bounds: ParamBounds | None = None,
              horizon=None, n_samples: int = 100_000,
              tangzou_horizon: float | None = None) -> CheckResult:
    """Evaluate every applicable criterion for a neutral or logistic problem.

    Inapplicable criteria appear in the list as skipped verdicts with a
    note.  ``certified`` is true when any criterion is satisfied.
    """
    # late import: the logistic module depends on this one
    from .logistic import LogisticProblem, check_local_stability

    if isinstance(problem, LogisticProblem):
        verdicts = check_local_stability(problem, horizon=horizon,
                                         n_samples=n_samples)
        return CheckResult(verdicts=verdicts,
                           certified=any(v.satisfied for v in verdicts),
                           bounds=None)

    p = bounds if bounds is not None else extract_bounds(
        problem, horizon=horizon, n_samples=n_samples)
    verdicts = [eval_thm1_a(p), eval_thm1_b(p)]

    constant_coeffs = p.a0 == p.A0 and p.b0 == p.B0
    if constant_coeffs and p.A0 < 1.0 and p.b0 > 0.0:
        verdicts.extend(eval_cor1(p.A0, p.B0, p.tau, p.sigma, p.h_lag_inf))
    else:
        verdicts.append(_skipped(CriterionId.COR1_A,
                                 "coefficients are not constant"))
        verdicts.append(_skipped(CriterionId.COR1_B,
                                 "coefficients are not constant"))

    if p.tau == 0.0:
        verdicts.append(eval_cor2(p))
    else:
        verdicts.append(_skipped(CriterionId.COR2, "h is not the identity"))

    if p.a0 == p.A0 and 0.0 < p.A0 < 1.0:
        verdicts.extend(eval_tangzou(p.A0, problem.b, p.tau, p.sigma,
                                     horizon=tangzou_horizon))
    else:
        reason = ("neutral coefficient is not constant" if p.a0 != p.A0
                  else "requires 0 < a < 1")
        verdicts.append(_skipped(CriterionId.TANGZOU_1, reason))
        verdicts.append(_skipped(CriterionId.TANGZOU_2, reason))

    return CheckResult(verdicts=verdicts,
                       certified=any(v.satisfied for v in verdicts),
                       bounds=p)
