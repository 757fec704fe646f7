"""Ready-made problems: the worked comparison examples and a regression corpus."""

from __future__ import annotations

import math

import numpy as np

from .criteria import (CriterionId, eval_tangzou, eval_thm1_a, eval_thm1_b)
from .funcspec import DelayFunc, ParamBounds, const_expr, parse
from .logistic import LogisticProblem
from .simulator import NDDEProblem

__all__ = [
    "example2_problem",
    "example2_bounds",
    "example2_template",
    "logistic_example",
    "certified_corpus",
]

# x'(t) - 0.6 x'(t-0.1) = -r (1 + 0.1 sin t) x(h(t)),  0.9 <= t-h(t) <= 1
_EX2_VAR_LAG = "0.95+0.05*sin(3*t)"


def example2_problem(r: float, variable_lag: bool = True,
                     phi: str = "1", psi: str = "0") -> NDDEProblem:
    """The variable-coefficient comparison equation at a given rate r."""
    lag_h = (DelayFunc(parse(_EX2_VAR_LAG), 1.0, 0.9) if variable_lag
             else DelayFunc(const_expr(1.0), 1.0, 1.0))
    return NDDEProblem(
        a=const_expr(0.6),
        b=parse("r*(1+0.1*sin(t))", {"r": r}),
        g=DelayFunc(const_expr(0.1), 0.1, 0.1),
        h=lag_h,
        f=const_expr(0.0),
        phi=parse(phi),
        psi=parse(psi),
        t0=0.0,
    )


def example2_bounds(r: float, variable_lag: bool = True) -> ParamBounds:
    return ParamBounds(a0=0.6, A0=0.6, b0=0.9 * r, B0=1.1 * r,
                       tau=1.0, sigma=0.1,
                       h_lag_inf=0.9 if variable_lag else 1.0)


def example2_template(variable_lag: bool = True):
    """Sweep template over r covering the four comparison criteria."""

    def template(r: float):
        p = example2_bounds(r, variable_lag)
        tz1, tz2 = eval_tangzou(0.6, parse("r*(1+0.1*sin(t))", {"r": r}),
                                tau=1.0, sigma=0.1)
        return {
            CriterionId.THM1_A: eval_thm1_a(p),
            CriterionId.THM1_B: eval_thm1_b(p),
            CriterionId.TANGZOU_1: tz1,
            CriterionId.TANGZOU_2: tz2,
        }

    return template


def logistic_example(tau: float, r0: float = 0.2, rho: float = 4.0,
                     K: float = 1.0, phi: str | None = None,
                     psi: str = "0") -> LogisticProblem:
    """Autonomous neutral logistic model with equal constant delays."""
    if phi is None:
        phi = repr(1.1 * K)
    lag = DelayFunc(const_expr(tau), tau, tau)
    return LogisticProblem(r=const_expr(r0), K=K, rho=rho, g=lag, h=lag,
                           phi=parse(phi), psi=parse(psi), t0=0.0)


def certified_corpus() -> list:
    """(name, NDDEProblem) pairs, each certified stable by some criterion.

    Constant-coefficient cases are sized so the general neutral test holds
    with roughly 50% margin; sinusoidal variants keep the same envelope.
    """
    problems = []
    for a in (0.0, 0.2, 0.4):
        for tau in (0.25, 0.5):
            sigma = tau / 2.0
            # solve tau*b + sigma*a*b/(1-a) = 0.5*(1-a) for b
            denom = tau + (sigma * a / (1.0 - a) if a > 0 else 0.0)
            b = 0.5 * (1.0 - a) / denom
            lag_g = DelayFunc(const_expr(sigma), sigma, sigma)
            lag_h = DelayFunc(const_expr(tau), tau, tau)
            problems.append((
                f"const_a{a}_tau{tau}",
                NDDEProblem(a=const_expr(a), b=const_expr(b), g=lag_g,
                            h=lag_h, f=const_expr(0.0), phi=const_expr(1.0),
                            psi=const_expr(0.0), t0=0.0),
            ))
            # oscillating coefficient with the same upper envelope
            b_expr = parse("c*(1+0.1*sin(t))", {"c": b / 1.1})
            problems.append((
                f"sin_b_a{a}_tau{tau}",
                NDDEProblem(a=const_expr(a), b=b_expr, g=lag_g, h=lag_h,
                            f=const_expr(0.0), phi=const_expr(1.0),
                            psi=const_expr(0.0), t0=0.0),
            ))
            # variable delay within the declared envelope
            hw = tau / 4.0
            lag_var = DelayFunc(
                parse("c+w*sin(2*t)", {"c": tau - hw, "w": hw}),
                tau, tau - 2 * hw)
            problems.append((
                f"var_lag_a{a}_tau{tau}",
                NDDEProblem(a=const_expr(a), b=const_expr(b), g=lag_g,
                            h=lag_var, f=const_expr(0.0),
                            phi=const_expr(1.0), psi=const_expr(0.0),
                            t0=0.0),
            ))
    # the variable-coefficient comparison equation in its certified range
    problems.append(("example2_r0.2_varlag", example2_problem(0.2, True)))
    problems.append(("example2_r0.2_constlag", example2_problem(0.2, False)))
    problems.append(("example2_r0.3_varlag", example2_problem(0.3, True)))
    return problems


def random_history_exprs(rng: np.random.Generator):
    """A bounded sinusoidal history and its exact derivative."""
    c0 = float(rng.uniform(-1.0, 1.0))
    c1 = float(rng.uniform(-1.0, 1.0))
    w = float(rng.uniform(0.3, 3.0))
    ph = float(rng.uniform(0.0, 2.0 * math.pi))
    phi = parse("c0+c1*sin(w*t+ph)", {"c0": c0, "c1": c1, "w": w, "ph": ph})
    psi = parse("c1*w*cos(w*t+ph)", {"c1": c1, "w": w, "ph": ph})
    return phi, psi
