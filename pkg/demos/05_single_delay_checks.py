"""Numerical facts behind the single-delay comparison machinery.

For x'(t) + B(t) x(t - tau0) = 0 with the window integral of B bounded by
1/e, the fundamental function X0 stays positive and its forced integral
max_t int X0(t,s) B(s) ds never exceeds 1.  Both facts are checked
numerically at the boundary case B == 1, tau0 = 1/e.
"""

import math

from neutralstab import check_lemma4_5, const_expr, parse

rep = check_lemma4_5(const_expr(1.0), 1.0 / math.e, 0.0, 12.0, 0.002)
print(f"window integral max: {rep.window_max:.9f} (1/e = {1/math.e:.9f})")
print(f"window condition ok: {rep.window_ok}")
print(f"min X0 over the (s, t) grid: {rep.min_X0:.3e}")
print(f"max_t int X0(t,s) B(s) ds:   {rep.max_integral:.9f} (bound 1)")
print(f"X0(., 0) decay verdict: {rep.decay.verdict} "
      f"(gamma ~ {rep.decay.gamma_est:.3f})")

# a failing window: doubling the delay pushes the integral past 1/e
rep2 = check_lemma4_5(const_expr(1.0), 2.0 / math.e, 0.0, 12.0, 0.002)
print(f"\ntau0 = 2/e: window max {rep2.window_max:.4f}, "
      f"applicable = {rep2.applicable}")
for note in rep2.notes:
    print(f"  note: {note}")

# a time-varying coefficient within the admissible envelope
rep3 = check_lemma4_5(parse("0.3*(1+0.1*sin(t))"), 1.0, 0.0, 30.0, 0.005)
print(f"\nB = 0.3(1+0.1 sin t), tau0 = 1: window max {rep3.window_max:.4f}, "
      f"min X0 = {rep3.min_X0:.3e}, max integral = {rep3.max_integral:.4f}")
