"""Neutral logistic model: simulation, linearization, local stability."""

import numpy as np
import pytest

from neutralstab import (check_local_stability, const_expr, extract_bounds,
                         integrate, integrate_logistic, linearize, parse)
from neutralstab import CriterionId, DelayFunc, LogisticProblem
from neutralstab.corpus import logistic_example


class TestModelValidation:
    def test_positive_parameters_required(self):
        lag = DelayFunc(const_expr(0.5), 0.5, 0.5)
        with pytest.raises(ValueError):
            LogisticProblem(r=const_expr(0.2), K=0.0, rho=4.0, g=lag, h=lag,
                            phi=parse("1"), psi=parse("0"))
        with pytest.raises(ValueError):
            LogisticProblem(r=const_expr(0.2), K=1.0, rho=0.0, g=lag, h=lag,
                            phi=parse("1"), psi=parse("0"))

    def test_r_bounds_checks_contraction(self):
        p = logistic_example(0.5, r0=0.2, rho=4.0)
        assert p.r_bounds() == (0.2, 0.2)
        bad = logistic_example(0.5, r0=0.3, rho=4.0)
        with pytest.raises(ValueError, match="R0\\*rho < 1"):
            bad.r_bounds()


class TestSimulation:
    def test_equilibrium_is_stationary(self):
        p = logistic_example(0.9, phi="1")
        tr = integrate_logistic(p, 50.0, 0.01)
        assert np.max(np.abs(tr.x - 1.0)) <= 1e-10

    def test_convergence_to_carrying_capacity(self):
        p = logistic_example(0.9)  # phi = 1.1*K
        tr = integrate_logistic(p, 200.0, 0.0225)
        assert tr.flag is None
        assert abs(tr.x[-1] - 1.0) <= 0.01

    def test_non_contracting_neutral_term_flagged(self):
        # with g(t) = t the derivative identity is solved in-step; the
        # coefficient r*x*rho/K = 1.425 > 1 leaves the contraction region
        p = LogisticProblem(r=const_expr(0.5), K=1.0, rho=1.9,
                            g=DelayFunc(const_expr(0.0), 0.0, 0.0),
                            h=DelayFunc(const_expr(0.5), 0.5, 0.5),
                            phi=parse("1.5"), psi=parse("0"))
        tr = integrate_logistic(p, 10.0, 0.01)
        assert tr.flag == "left_contraction_region"

    def test_step_size_guard(self):
        p = logistic_example(0.2)
        with pytest.raises(ValueError, match="quarter"):
            integrate_logistic(p, 10.0, 0.1)


class TestLinearization:
    def test_coefficient_mapping(self):
        p = logistic_example(0.9, r0=0.2, rho=4.0)
        lin = linearize(p)
        b = extract_bounds(lin)
        assert b.a0 == b.A0 == pytest.approx(0.8)
        assert b.b0 == b.B0 == pytest.approx(0.2)
        assert b.tau == b.sigma == 0.9

    def test_small_perturbations_follow_the_linear_model(self):
        # residual sup|x - K - z| scales quadratically in the perturbation
        K, T, dt = 1.0, 30.0, 0.01

        def residual(delta):
            p = logistic_example(0.9, phi=repr(K * (1 + delta)))
            tr = integrate_logistic(p, T, dt)
            lin = linearize(p, phi=const_expr(K * delta),
                            psi=const_expr(0.0))
            trz = integrate(lin, T, dt)
            return float(np.max(np.abs(tr.x - K - trz.x)))

        ratio = residual(0.2) / residual(0.1)
        assert 3.0 <= ratio <= 5.0


class TestLocalStability:
    def test_certified_below_the_equal_delay_threshold(self):
        verdicts = check_local_stability(logistic_example(0.9))
        by_id = {v.criterion: v for v in verdicts}
        assert by_id[CriterionId.LOG_COR].satisfied
        assert not by_id[CriterionId.YU_PROP1].satisfied

    def test_nothing_certifies_beyond_the_threshold(self):
        verdicts = check_local_stability(logistic_example(1.5))
        assert all(not v.satisfied for v in verdicts)

    def test_autonomous_only_tests_skipped_for_variable_rate(self):
        lag = DelayFunc(const_expr(0.5), 0.5, 0.5)
        p = LogisticProblem(r=parse("0.2*(1+0.1*sin(t))"), K=1.0, rho=1.0,
                            g=lag, h=lag, phi=parse("1.1"), psi=parse("0"))
        ids = {v.criterion for v in check_local_stability(p)}
        assert CriterionId.LOG_COR not in ids
        assert CriterionId.YU_PROP1 not in ids
        assert CriterionId.LOG_THM_A in ids

    def test_linearized_verdicts_carry_a_note(self):
        verdicts = check_local_stability(logistic_example(0.9))
        thm = [v for v in verdicts if v.criterion is CriterionId.THM1_A]
        assert thm and "linearization" in thm[0].notes[-1]
