"""Scalar functions of time for coefficients, lags, forcings and histories.

A tiny expression language over the single variable ``t`` is provided:
constants, ``t``, the binary operators ``+ - * /``, unary minus, and the
functions ``sin``, ``cos``, ``exp``, ``abs``, ``min``, ``max``.  The named
constants ``pi`` and ``e`` are built in.  Parsed expressions are immutable,
evaluation is pure, and compiled callables accept scalars or numpy arrays.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "FuncExpr",
    "DelayFunc",
    "ParamBounds",
    "FuncParseError",
    "EvalError",
    "parse",
    "const_expr",
    "scale_expr",
    "func_range",
    "extract_bounds",
]

_FUNCS1 = ("sin", "cos", "exp", "abs")
_FUNCS2 = ("min", "max")
_CONSTS = {"pi": math.pi, "e": math.e}


class FuncParseError(ValueError):
    """Malformed expression text; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class EvalError(ArithmeticError):
    """Runtime evaluation failure (division by zero); carries the query time."""

    def __init__(self, message: str, t):
        super().__init__(f"{message} (at t={t!r})")
        self.t = t


def _div(num, den, t):
    if np.any(np.asarray(den) == 0):
        raise EvalError("division by zero", t)
    return num / den


# ---------------------------------------------------------------------------
# AST: nested tuples
#   ('const', v) ('t',) ('neg', x) ('+'|'-'|'*'|'/', l, r)
#   ('sin'|'cos'|'exp'|'abs', x) ('min'|'max', l, r)
# ---------------------------------------------------------------------------

def _emit(node) -> str:
    op = node[0]
    if op == "const":
        return f"({node[1]!r})"
    if op == "t":
        return "t"
    if op == "neg":
        return f"(-{_emit(node[1])})"
    if op in "+-*":
        return f"({_emit(node[1])}{op}{_emit(node[2])})"
    if op == "/":
        return f"_div({_emit(node[1])},{_emit(node[2])},t)"
    if op in ("sin", "cos", "exp"):
        return f"np.{op}({_emit(node[1])})"
    if op == "abs":
        return f"np.abs({_emit(node[1])})"
    if op == "min":
        return f"np.minimum({_emit(node[1])},{_emit(node[2])})"
    if op == "max":
        return f"np.maximum({_emit(node[1])},{_emit(node[2])})"
    raise ValueError(f"unknown node {op!r}")


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _to_str(node, parent_prec: int = 0) -> str:
    op = node[0]
    if op == "const":
        v = node[1]
        s = repr(v)
        return f"({s})" if v < 0 and parent_prec > 0 else s
    if op == "t":
        return "t"
    if op == "neg":
        inner = _to_str(node[1], 3)
        return f"(-{inner})" if parent_prec > 0 else f"-{inner}"
    if op in _PREC:
        p = _PREC[op]
        left = _to_str(node[1], p - 1)
        # - and / are left-associative: parenthesize equal-precedence right side
        right = _to_str(node[2], p)
        s = f"{left}{op}{right}"
        return f"({s})" if p <= parent_prec else s
    args = ",".join(_to_str(a, 0) for a in node[1:])
    return f"{op}({args})"


@dataclass(eq=False)
class FuncExpr:
    """An immutable parsed expression in the single variable ``t``."""

    ast: tuple
    source_text: str
    _fn: object = field(init=False, repr=False, default=None)

    def __post_init__(self):
        code = _emit(self.ast)
        self._fn = eval(f"lambda t: {code}", {"np": np, "_div": _div})

    def __call__(self, t):
        out = self._fn(t)
        if isinstance(t, np.ndarray):
            out = np.asarray(out, dtype=float)
            if out.shape != t.shape:
                out = np.broadcast_to(out, t.shape).copy()
            return out
        return float(out)

    def to_string(self) -> str:
        """Canonical printable form; ``parse(to_string())`` evaluates identically."""
        return _to_str(self.ast)


# ---------------------------------------------------------------------------
# Parsing (recursive descent)
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/(),]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise FuncParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup == "num":
            tokens.append(("num", m.group("num"), m.start("num")))
        elif m.lastgroup == "name":
            tokens.append(("name", m.group("name"), m.start("name")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens, params):
        self.tokens = tokens
        self.i = 0
        self.params = params or {}

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, text, pos = self.take()
        if kind != "op" or text != op:
            raise FuncParseError(f"expected {op!r}", pos)

    def expr(self):
        node = self.term()
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            node = (op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[:2] in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            node = (op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return ("neg", self.unary())
        if self.peek()[:2] == ("op", "+"):
            self.take()
            return self.unary()
        return self.atom()

    def atom(self):
        kind, text, pos = self.take()
        if kind == "num":
            return ("const", float(text))
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        if kind == "name":
            if text in _FUNCS1 or text in _FUNCS2:
                self.expect_op("(")
                args = [self.expr()]
                while self.peek()[:2] == ("op", ","):
                    self.take()
                    args.append(self.expr())
                self.expect_op(")")
                want = 1 if text in _FUNCS1 else 2
                if len(args) != want:
                    raise FuncParseError(
                        f"{text} takes {want} argument(s), got {len(args)}", pos)
                return (text, *args)
            if text == "t":
                return ("t",)
            if text in self.params:
                return ("const", float(self.params[text]))
            if text in _CONSTS:
                return ("const", _CONSTS[text])
            raise FuncParseError(f"unknown identifier {text!r}", pos)
        raise FuncParseError("expected a value", pos)


def parse(text: str, params: dict | None = None) -> FuncExpr:
    """Parse ``text`` into a :class:`FuncExpr`.

    ``params`` optionally binds extra scalar names (folded to constants),
    e.g. ``parse("r*(1+0.1*sin(t))", {"r": 0.3})``.
    """
    p = _Parser(_tokenize(text), params)
    node = p.expr()
    kind, _, pos = p.peek()
    if kind != "end":
        raise FuncParseError("trailing input", pos)
    return FuncExpr(node, text)


def const_expr(v: float) -> FuncExpr:
    return FuncExpr(("const", float(v)), repr(float(v)))


def scale_expr(c: float, f: FuncExpr) -> FuncExpr:
    """The expression ``c * f(t)``."""
    return FuncExpr(("*", ("const", float(c)), f.ast),
                    f"({float(c)!r})*({f.source_text})")


# ---------------------------------------------------------------------------
# Closed-form range recognition: constants and p + q*sin(w*t + phase)
# ---------------------------------------------------------------------------

def _has_t(node) -> bool:
    if node[0] == "t":
        return True
    return any(_has_t(c) for c in node[1:] if isinstance(c, tuple))


def _const_value(node):
    if _has_t(node):
        return None
    return FuncExpr(node, "<fold>")(0.0)


def _affine_t(node):
    """Decompose as slope*t + intercept, or None."""
    c = _const_value(node)
    if c is not None:
        return (0.0, c)
    op = node[0]
    if op == "t":
        return (1.0, 0.0)
    if op == "neg":
        r = _affine_t(node[1])
        return None if r is None else (-r[0], -r[1])
    if op in ("+", "-"):
        l, r = _affine_t(node[1]), _affine_t(node[2])
        if l is None or r is None:
            return None
        sgn = 1.0 if op == "+" else -1.0
        return (l[0] + sgn * r[0], l[1] + sgn * r[1])
    if op == "*":
        l, r = _affine_t(node[1]), _affine_t(node[2])
        if l is None or r is None:
            return None
        if l[0] == 0.0:
            return (l[1] * r[0], l[1] * r[1])
        if r[0] == 0.0:
            return (r[1] * l[0], r[1] * l[1])
        return None
    if op == "/":
        l = _affine_t(node[1])
        d = _const_value(node[2])
        if l is None or d is None or d == 0.0:
            return None
        return (l[0] / d, l[1] / d)
    return None


def _affine_sin(node):
    """Decompose as p + q*sin(omega*t + phase); q == 0 means constant p."""
    c = _const_value(node)
    if c is not None:
        return (c, 0.0, 0.0, 0.0)
    op = node[0]
    if op in ("sin", "cos"):
        lin = _affine_t(node[1])
        if lin is None or lin[0] == 0.0:
            return None
        w, ph = lin
        if op == "cos":
            ph += math.pi / 2.0
        return (0.0, 1.0, w, ph)
    if op == "neg":
        r = _affine_sin(node[1])
        return None if r is None else (-r[0], -r[1], r[2], r[3])
    if op in ("+", "-"):
        l, r = _affine_sin(node[1]), _affine_sin(node[2])
        if l is None or r is None:
            return None
        sgn = 1.0 if op == "+" else -1.0
        if r[1] == 0.0:
            return (l[0] + sgn * r[0], l[1], l[2], l[3])
        if l[1] == 0.0:
            return (l[0] + sgn * r[0], sgn * r[1], r[2], r[3])
        if math.isclose(l[2], r[2], rel_tol=1e-12) and \
                math.isclose(l[3], r[3], rel_tol=1e-12, abs_tol=1e-15):
            return (l[0] + sgn * r[0], l[1] + sgn * r[1], l[2], l[3])
        return None
    if op == "*":
        l, r = _affine_sin(node[1]), _affine_sin(node[2])
        if l is None or r is None:
            return None
        if l[1] == 0.0:
            return (l[0] * r[0], l[0] * r[1], r[2], r[3])
        if r[1] == 0.0:
            return (r[0] * l[0], r[0] * l[1], l[2], l[3])
        return None
    if op == "/":
        l = _affine_sin(node[1])
        d = _const_value(node[2])
        if l is None or d is None or d == 0.0:
            return None
        return (l[0] / d, l[1] / d, l[2], l[3])
    return None


def func_range(f: FuncExpr, t_lo: float, t_hi: float,
               n_samples: int = 100_000):
    """Return ``(lo, hi, exact)`` bounds of ``f`` on ``[t_lo, t_hi]``.

    Bounds are exact for constants and single-frequency sinusoids observed
    over at least one full period; otherwise they come from a uniform grid
    with a conservative slack that shrinks as ``n_samples`` grows.
    """
    if t_hi <= t_lo:
        raise ValueError("empty horizon")
    rec = _affine_sin(f.ast)
    if rec is not None:
        p, q, w, _ = rec
        if q == 0.0:
            return (p, p, True)
        if w != 0.0 and (t_hi - t_lo) >= 2.0 * math.pi / abs(w):
            return (p - abs(q), p + abs(q), True)
    ts = np.linspace(t_lo, t_hi, int(n_samples))
    vals = f(ts)
    lo, hi = float(np.min(vals)), float(np.max(vals))
    slack = 4.0 / n_samples
    hi_adj = hi * (1.0 + slack) if hi > 0 else hi * (1.0 - slack)
    lo_adj = lo * (1.0 - slack) if lo > 0 else lo * (1.0 + slack)
    return (lo_adj, hi_adj, False)


# ---------------------------------------------------------------------------
# Delay functions and criterion inputs
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class DelayFunc:
    """A delayed argument given through its lag d(t) = t - g(t).

    ``declared_max``/``declared_min`` are the asserted lag bounds; they are
    validated against samples, not assumed.
    """

    lag: FuncExpr
    declared_max: float
    declared_min: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.declared_min <= self.declared_max):
            raise ValueError("need 0 <= declared_min <= declared_max")

    def arg(self, t):
        """The delayed argument g(t) = t - lag(t); accepts arrays."""
        return t - self.lag(t)

    def lag_range(self, t_lo: float, t_hi: float, n_samples: int = 100_000):
        return func_range(self.lag, t_lo, t_hi, n_samples)

    def validate(self, t_lo: float, t_hi: float, n_samples: int = 4096):
        ts = np.linspace(t_lo, t_hi, n_samples)
        vals = self.lag(ts)
        tol = 1e-9 * max(1.0, self.declared_max)
        if np.min(vals) < -tol:
            raise ValueError("lag is negative on the working interval")
        if np.max(vals) > self.declared_max + tol:
            raise ValueError("lag exceeds its declared maximum")
        if np.min(vals) < self.declared_min - tol:
            raise ValueError("lag falls below its declared minimum")


@dataclass
class ParamBounds:
    """Scalar inputs consumed by the stability criteria."""

    a0: float
    A0: float
    b0: float
    B0: float
    tau: float
    sigma: float
    h_lag_inf: float
    exact: bool = True
    inflation: float = 1.0

    def __post_init__(self):
        if self.A0 >= 1.0:
            raise ValueError("neutral coefficient not a contraction (A0 >= 1)")
        if not (0.0 <= self.a0 <= self.A0):
            raise ValueError("need 0 <= a0 <= A0")
        if not (0.0 < self.b0 <= self.B0):
            raise ValueError("need 0 < b0 <= B0")
        # tau = 0 is admitted so the no-delay special case (h(t) = t)
        # can reuse the same container
        if self.tau < 0.0 or self.sigma < 0.0:
            raise ValueError("delay bounds must be nonnegative")
        if not (0.0 <= self.h_lag_inf <= self.tau + 1e-12):
            raise ValueError("need 0 <= h_lag_inf <= tau")


def extract_bounds(problem, horizon=None, n_samples: int = 100_000) -> ParamBounds:
    """Extract :class:`ParamBounds` from a problem's coefficients and lags.

    ``problem`` needs attributes ``a``, ``b`` (FuncExpr), ``g``, ``h``
    (DelayFunc) and ``t0``.  Closed-form bounds are used where the
    expressions are recognized; otherwise a dense sample with recorded slack.
    """
    tau = problem.h.declared_max
    sigma = problem.g.declared_max
    if horizon is None:
        length = max(10.0 * max(tau, sigma), 20.0)
        horizon = (problem.t0, problem.t0 + length)
    t_lo, t_hi = horizon
    if n_samples < 1000:
        raise ValueError("n_samples must be at least 1000")

    problem.g.validate(t_lo, t_hi)
    problem.h.validate(t_lo, t_hi)

    a_lo, a_hi, a_exact = func_range(problem.a, t_lo, t_hi, n_samples)
    b_lo, b_hi, b_exact = func_range(problem.b, t_lo, t_hi, n_samples)
    h_lo, _, h_exact = problem.h.lag_range(t_lo, t_hi, n_samples)

    if a_hi >= 1.0:
        raise ValueError("neutral coefficient not a contraction (A0 >= 1)")
    if a_lo < -1e-12:
        raise ValueError("neutral coefficient must be nonnegative")
    if b_lo <= 0.0:
        raise ValueError("lower bound of b must be positive")

    exact = a_exact and b_exact and h_exact
    return ParamBounds(
        a0=max(a_lo, 0.0),
        A0=a_hi,
        b0=b_lo,
        B0=b_hi,
        tau=tau,
        sigma=sigma,
        h_lag_inf=min(max(h_lo, problem.h.declared_min, 0.0), tau),
        exact=exact,
        inflation=1.0 if exact else 1.0 + 4.0 / n_samples,
    )
