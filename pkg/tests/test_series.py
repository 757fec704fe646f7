"""Iterated delays and the series for the inverse neutral-shift operator."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neutralstab import (DelayFunc, ParamBounds, SeriesConsistencyError,
                         SeriesError, apply_inv_I_minus_S, big_B, const_expr,
                         extract_bounds, iterated_delay, iterated_delays,
                         parse)
from neutralstab.corpus import certified_corpus
from neutralstab.series import DEPTH_CAP


def _const_lag(sigma):
    return DelayFunc(const_expr(sigma), sigma, sigma)


class TestIteratedDelays:
    def test_constant_lag_closed_form(self):
        g = _const_lag(0.3)
        for k in range(10):
            assert iterated_delay(g, 5.0, k) == pytest.approx(5.0 - 0.3 * k)

    def test_cache_matches_single_calls(self):
        g = DelayFunc(parse("0.5+0.2*sin(t)"), 0.7, 0.3)
        cache = iterated_delays(g, 10.0, 20)
        assert cache.K == 20 and len(cache.values) == 21
        for k in (0, 1, 5, 20):
            assert cache.values[k] == iterated_delay(g, 10.0, k)

    def test_values_nonincreasing(self):
        g = DelayFunc(parse("0.5+0.2*sin(t)"), 0.7, 0.3)
        vals = iterated_delays(g, 10.0, 50).values
        assert all(b <= a for a, b in zip(vals, vals[1:]))

    def test_negative_k_rejected(self):
        with pytest.raises(ValueError):
            iterated_delay(_const_lag(0.1), 0.0, -1)

    @given(st.floats(min_value=-5.0, max_value=50.0),
           st.integers(min_value=0, max_value=50))
    @settings(max_examples=100, deadline=None)
    def test_lag_accumulation_bounds(self, t, n):
        # t - g^[n](t) <= n*sigma for any lag bounded by sigma
        g = DelayFunc(parse("0.25+0.15*sin(2*t)"), 0.4, 0.1)
        gn = iterated_delay(g, t, n)
        assert t - gn <= n * 0.4 + 1e-9 * max(1.0, abs(t))
        assert t - gn >= n * 0.1 - 1e-9 * max(1.0, abs(t))


class TestInverseOperator:
    def test_geometric_constant_case(self):
        # constant a, y == 1: the series is geometric with sum 1/(1-a)
        g = _const_lag(0.3)
        for a, expected in ((0.5, 2.0), (0.6, 2.5)):
            res = apply_inv_I_minus_S(const_expr(1.0), const_expr(a), g,
                                      5.0, 1e-8)
            assert res.value == pytest.approx(expected, abs=2e-8)
            assert res.tail_bound <= 1e-8

    def test_depth_grows_with_tolerance(self):
        g = _const_lag(0.3)
        r1 = apply_inv_I_minus_S(const_expr(1.0), const_expr(0.6), g, 5.0, 1e-4)
        r2 = apply_inv_I_minus_S(const_expr(1.0), const_expr(0.6), g, 5.0, 1e-8)
        assert r2.truncation_depth > r1.truncation_depth
        assert r2.truncation_depth >= 37  # 0.6^37/0.4 < 1e-8 needs 37+ terms

    def test_matches_hand_unrolled_sum(self):
        # independent accumulation of sum_j prod_{k<j} a(g^[k](t)) y(g^[j](t))
        a = parse("0.3+0.1*sin(t)")
        g = DelayFunc(parse("0.5+0.2*sin(t)"), 0.7, 0.3)
        y = parse("cos(t)")
        t = 12.0
        res = apply_inv_I_minus_S(y, a, g, t, 1e-10, a_max=0.4, y_sup=1.0)
        total = y(t)
        prod, tj = 1.0, t
        for _ in range(res.truncation_depth):
            prod *= a(tj)
            tj = tj - g.lag(tj)
            total += prod * y(tj)
        assert res.value == pytest.approx(total, abs=1e-12)

    def test_operator_norm_respected(self):
        # sup-norm-1 inputs map inside the ball of radius 1/(1-A0)
        a = const_expr(0.6)
        g = _const_lag(0.25)
        rng = np.random.default_rng(7)
        for _ in range(20):
            w = rng.uniform(0.3, 3.0)
            ph = rng.uniform(0.0, 2 * math.pi)
            y = parse("sin(w*t+ph)", {"w": w, "ph": ph})
            res = apply_inv_I_minus_S(y, a, g, float(rng.uniform(0, 30)),
                                      1e-10, a_max=0.6, y_sup=1.0)
            assert abs(res.value) <= 1.0 / 0.4 + 1e-8

    def test_t_min_truncates(self):
        g = _const_lag(1.0)
        res = apply_inv_I_minus_S(const_expr(1.0), const_expr(0.5), g, 3.0,
                                  1e-12, t_min=0.0)
        # only iterates 3, 2, 1, 0 contribute: 1 + 1/2 + 1/4 + 1/8
        assert res.value == pytest.approx(1.875, abs=1e-15)

    def test_depth_cap(self):
        g = _const_lag(0.01)
        with pytest.raises(SeriesError):
            apply_inv_I_minus_S(const_expr(1.0), const_expr(0.999), g, 0.0,
                                1e-16, a_max=0.999, y_sup=1.0)
        assert DEPTH_CAP == 10_000

    def test_bad_inputs(self):
        g = _const_lag(0.1)
        with pytest.raises(ValueError):
            apply_inv_I_minus_S(const_expr(1.0), const_expr(0.5), g, 0.0, 0.0)
        with pytest.raises(ValueError, match="not a contraction"):
            apply_inv_I_minus_S(const_expr(1.0), const_expr(1.5), g, 0.0, 1e-6)


class TestBigB:
    def test_constant_coefficients_closed_form(self):
        g = _const_lag(0.3)
        res = big_B(const_expr(0.5), const_expr(1.0), g, 7.0, 1e-13)
        assert res.value == pytest.approx(2.0, abs=1e-12)

    def test_matches_deep_direct_sum(self):
        a = parse("0.5+0.1*sin(t)")
        b = parse("0.2*(1+0.1*sin(t))")
        g = DelayFunc(parse("0.4+0.1*cos(t)"), 0.5, 0.3)
        t = 20.0
        res = big_B(a, b, g, t, 1e-10)
        total, prod, tj = b(t), 1.0, t
        for _ in range(200):
            prod *= a(tj)
            tj = tj - g.lag(tj)
            total += prod * b(tj)
        assert res.value == pytest.approx(total, abs=1e-9)

    def test_sandwich_on_corpus(self):
        rng = np.random.default_rng(11)
        for name, prob in certified_corpus()[:6]:
            bounds = extract_bounds(prob)
            lo = bounds.b0 / (1.0 - bounds.a0)
            hi = bounds.B0 / (1.0 - bounds.A0)
            for t in rng.uniform(5.0, 40.0, size=10):
                res = big_B(prob.a, prob.b, prob.g, float(t), 1e-10,
                            bounds=bounds)
                assert lo - 1e-8 <= res.value <= hi + 1e-8, name

    def test_wrong_bounds_raise_consistency_error(self):
        g = _const_lag(0.3)
        # actual B = 2, claimed sandwich [2.4, 2.4]
        bad = ParamBounds(a0=0.5, A0=0.5, b0=1.2, B0=1.2, tau=1.0,
                          sigma=0.3, h_lag_inf=1.0)
        with pytest.raises(SeriesConsistencyError):
            big_B(const_expr(0.5), const_expr(1.0), g, 7.0, 1e-10, bounds=bad)
