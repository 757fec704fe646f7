"""Integrator fidelity against exact and method-of-steps solutions."""

import math

import numpy as np
import pytest

from neutralstab import (DelayFunc, IntegrationError, NDDEProblem,
                         apply_inv_I_minus_S, check_lemma4_5, const_expr,
                         estimate_decay, fundamental, integrate, parse)


def _problem(a, b, sig, tau, phi="1", psi="0", f="0", t0=0.0):
    return NDDEProblem(
        a=parse(a) if isinstance(a, str) else const_expr(a),
        b=parse(b) if isinstance(b, str) else const_expr(b),
        g=DelayFunc(const_expr(sig), sig, sig),
        h=DelayFunc(const_expr(tau), tau, tau),
        f=parse(f), phi=parse(phi), psi=parse(psi), t0=t0)


def _steps_oracle(a, b, n_steps):
    """Exact piecewise polynomials for x' = a x'(t-1) - b x(t-1),
    x == 1 and x' == 0 on [-1, 0]; piece k covers [k, k+1] in s = t - k."""
    from numpy.polynomial import Polynomial as P
    xs = [P([1.0])]
    ds = [P([0.0])]
    for _ in range(n_steps):
        d = a * ds[-1] - b * xs[-1]
        x = d.integ()
        x = x + (xs[-1](1.0) - x(0.0))
        xs.append(x)
        ds.append(d)
    return xs  # xs[k+1] is the piece on [k, k+1]


class TestODEReduction:
    def test_exponential_decay(self):
        # zero lags reduce the stepper to a plain ODE: x' = -x
        p = _problem(0.0, 1.0, 0.0, 0.0)
        tr = integrate(p, 10.0, 1e-3)
        err = np.max(np.abs(tr.x - np.exp(-tr.grid)))
        assert err <= 5e-6

    def test_second_order_convergence(self):
        p = _problem(0.0, 1.0, 0.0, 0.0)
        errs = []
        for dt in (2e-3, 1e-3):
            tr = integrate(p, 10.0, dt)
            errs.append(np.max(np.abs(tr.x - np.exp(-tr.grid))))
        assert errs[0] / errs[1] >= 3.6  # order >= ~1.85


class TestNeutralAccuracy:
    def test_pure_derivative_coupling_is_exact(self):
        # x' = 0.5 x'(t-1), phi(t) = t, psi == 1: piecewise linear, exact
        p = _problem(0.5, 0.0, 1.0, 1.0, phi="t", psi="1")
        # b == 0 leaves only the h lag constraint on dt
        tr = integrate(p, 3.0, 0.01)
        assert tr.x_at(1.0) == pytest.approx(0.5, abs=1e-12)
        assert tr.x_at(2.0) == pytest.approx(0.75, abs=1e-12)
        assert tr.x_at(3.0) == pytest.approx(0.875, abs=1e-12)

    def test_matches_method_of_steps(self):
        a, b = 0.5, 0.4
        p = _problem(a, b, 1.0, 1.0)
        oracle = _steps_oracle(a, b, 6)
        tr = integrate(p, 6.0, 1e-3)
        worst = 0.0
        for t in np.linspace(0.05, 5.95, 119):
            k = int(t)
            worst = max(worst, abs(tr.x_at(float(t)) - oracle[k + 1](t - k)))
        assert worst <= 1e-4

    def test_convergence_at_breaking_points(self):
        a, b = 0.5, 0.4
        oracle = _steps_oracle(a, b, 6)
        errs = []
        for dt in (1e-3, 5e-4):
            tr = integrate(_problem(a, b, 1.0, 1.0), 6.0, dt)
            errs.append(max(abs(tr.x_at(float(t)) - oracle[int(t) + 1](t - int(t)))
                            for t in np.linspace(0.05, 5.95, 119)))
        assert errs[0] / errs[1] >= 1.9  # order >= ~0.95


class TestLinearity:
    def test_superposition(self):
        kw = dict(a="0.3", b="0.5*(1+0.1*sin(t))", sig=0.5, tau=1.0)
        p1 = _problem(**kw, phi="1", psi="0")
        p2 = _problem(**kw, phi="sin(t)", psi="cos(t)")
        p3 = _problem(**kw, phi="2+3*sin(t)", psi="3*cos(t)")
        x1 = integrate(p1, 8.0, 0.01).x
        x2 = integrate(p2, 8.0, 0.01).x
        x3 = integrate(p3, 8.0, 0.01).x
        np.testing.assert_allclose(x3, 2 * x1 + 3 * x2, atol=1e-9)


class TestFundamental:
    def test_piecewise_polynomial_oracle(self):
        # a=0.4, b=0.3, both lags 1: X == 1 on [0,1], linear on [1,2],
        # quadratic on [2,3]
        a, b = 0.4, 0.3
        p = _problem(a, b, 1.0, 1.0)
        tr = fundamental(p, 0.0, 3.0, 1e-3)
        assert tr.x_at(0.5) == pytest.approx(1.0, abs=1e-9)
        assert tr.x_at(1.5) == pytest.approx(1.0 - b * 0.5, abs=1e-6)
        t = 2.5
        expected = (1.0 - b) - (a * b + b) * (t - 2) + b * b * (t - 2) ** 2 / 2
        assert tr.x_at(t) == pytest.approx(expected, abs=1e-6)

    def test_start_before_t0_rejected(self):
        p = _problem(0.4, 0.3, 1.0, 1.0)
        with pytest.raises(ValueError):
            fundamental(p, -1.0, 3.0, 0.01)

    def test_variation_of_constants(self):
        # zero history, f == 1: x(T) = integral of X(T,s) F(s) ds with F the
        # inverse-shift series of f truncated below t0; tolerance is set by
        # the first-order error at propagated breaking points
        p = _problem(0.3, 0.5, 0.5, 1.0, phi="0", psi="0", f="1")
        T, dt, ds = 10.0, 0.01, 0.05
        tr = integrate(p, T, dt)
        svals = np.arange(0.0, T + ds / 2, ds)
        F = np.array([apply_inv_I_minus_S(p.f, p.a, p.g, float(s), 1e-10,
                                          t_min=p.t0).value for s in svals])
        X = np.array([1.0 if s >= T else fundamental(p, float(s), T, dt).x_at(T)
                      for s in svals])
        voc = np.trapezoid(X * F, svals)
        assert voc == pytest.approx(tr.x[-1], rel=5e-3)


class TestGuards:
    def test_dt_limited_by_smallest_lag(self):
        p = _problem(0.3, 0.5, 0.2, 1.0)
        with pytest.raises(ValueError, match="quarter"):
            integrate(p, 5.0, 0.1)

    def test_non_contracting_neutral_term(self):
        p = _problem(1.0, 0.5, 0.0, 1.0)  # a = 1 with g(t) = t
        with pytest.raises(IntegrationError):
            integrate(p, 5.0, 0.01)

    def test_divergence_flag(self):
        # b < 0 means positive feedback: x' = +2 x(t-1)
        p = _problem(0.0, -2.0, 0.0, 1.0)
        tr = integrate(p, 40.0, 0.01)
        assert tr.flag == "diverged"
        assert tr.diverged_at is not None
        with pytest.raises(ValueError):
            estimate_decay(tr)


class TestDecayClassification:
    def _traj(self, expr, T=40.0, dt=0.01):
        from neutralstab.simulator import Trajectory
        grid = np.arange(0.0, T + dt / 2, dt)
        f = parse(expr)
        x = f(grid)
        dx = np.gradient(x, dt)
        return Trajectory(t0=0.0, dt=dt, x=x, dx=dx,
                          phi=lambda t: x[0], psi=lambda t: 0.0)

    def test_exponential_decay_detected(self):
        d = estimate_decay(self._traj("exp(-t)*cos(3*t)"))
        assert d.verdict == "decaying"
        assert d.gamma_est == pytest.approx(1.0, rel=0.1)

    def test_flat_signal_is_nondecaying(self):
        d = estimate_decay(self._traj("1+0*t"))
        assert d.verdict == "nondecaying"

    def test_slow_decay_is_inconclusive(self):
        d = estimate_decay(self._traj("exp(-0.01*t)"))
        assert d.verdict == "inconclusive"

    def test_zero_tail_is_decaying(self):
        d = estimate_decay(self._traj("max(0,1-t/5)"))
        assert d.verdict == "decaying"
        assert d.gamma_est == math.inf


class TestSingleDelayFacts:
    def test_boundary_case(self):
        rep = check_lemma4_5(const_expr(1.0), 1.0 / math.e, 0.0, 12.0, 0.002)
        assert rep.window_ok
        assert rep.window_max == pytest.approx(1.0 / math.e, abs=1e-9)
        assert rep.min_X0 > 0.0
        assert rep.max_integral <= 1.0 + 1e-4
        assert rep.decay.verdict == "decaying"
        assert rep.applicable

    def test_window_failure_reported(self):
        rep = check_lemma4_5(const_expr(1.0), 1.0, 0.0, 10.0, 0.01)
        assert not rep.window_ok and not rep.applicable
        assert any("1/e window" in n for n in rep.notes)

    def test_input_validation(self):
        with pytest.raises(ValueError):
            check_lemma4_5(const_expr(1.0), -0.5, 0.0, 10.0, 0.01)
        with pytest.raises(ValueError):
            check_lemma4_5(const_expr(1.0), 0.5, 0.0, 0.0, 0.01)
