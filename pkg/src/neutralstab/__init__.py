"""Stability toolkit for scalar neutral delay differential equations."""

from .criteria import (CheckResult, CriterionId, Verdict, check_all,
                       eval_cor1, eval_cor2, eval_logistic_cor,
                       eval_logistic_thm, eval_tangzou, eval_thm1_a,
                       eval_thm1_b, eval_yu_prop1, limsup_window_integral,
                       tangzou_N)
from .funcspec import (DelayFunc, EvalError, FuncExpr, FuncParseError,
                       ParamBounds, const_expr, extract_bounds, func_range,
                       parse, scale_expr)
from .logistic import (LogisticProblem, check_local_stability,
                       integrate_logistic, linearize)
from .series import (IteratedDelayCache, SeriesConsistencyError, SeriesError,
                     SeriesResult, apply_inv_I_minus_S, big_B, iterated_delay,
                     iterated_delays)
from .simulator import (DecayEstimate, IntegrationError, Lemma45Report,
                        NDDEProblem, Trajectory, check_lemma4_5,
                        estimate_decay, fundamental, integrate)
from .sweep import SweepSpec, ThresholdResult, find_threshold, sweep_grid

__version__ = "0.1.0"

__all__ = [
    "CheckResult", "CriterionId", "Verdict", "check_all", "eval_cor1",
    "eval_cor2", "eval_logistic_cor", "eval_logistic_thm", "eval_tangzou",
    "eval_thm1_a", "eval_thm1_b", "eval_yu_prop1", "limsup_window_integral",
    "tangzou_N",
    "DelayFunc", "EvalError", "FuncExpr", "FuncParseError", "ParamBounds",
    "const_expr", "extract_bounds", "func_range", "parse", "scale_expr",
    "LogisticProblem", "check_local_stability", "integrate_logistic",
    "linearize",
    "IteratedDelayCache", "SeriesConsistencyError", "SeriesError",
    "SeriesResult", "apply_inv_I_minus_S", "big_B", "iterated_delay",
    "iterated_delays",
    "DecayEstimate", "IntegrationError", "Lemma45Report", "NDDEProblem",
    "Trajectory", "check_lemma4_5", "estimate_decay", "fundamental",
    "integrate",
    "SweepSpec", "ThresholdResult", "find_threshold", "sweep_grid",
]
