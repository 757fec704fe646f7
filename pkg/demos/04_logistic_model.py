"""Neutral logistic population model: simulation and local stability.

    x'(t) = r x(t) (1 - (x(t - tau) - rho x'(t - tau)) / K)

The equilibrium K is locally stable for small enough delay; the
equal-constant-delay test certifies tau < (1 + 1/e)(1 - r rho)^2/(r rho)
for this parameter set, about 1.0943.
"""

import numpy as np

from neutralstab import check_local_stability, integrate_logistic, linearize
from neutralstab.corpus import logistic_example

for tau in (0.5, 0.9, 1.2):
    p = logistic_example(tau, r0=0.2, rho=4.0)  # phi = 1.1 K
    tr = integrate_logistic(p, 100.0 * tau, min(tau / 4, 0.0225))
    print(f"tau={tau}: x(T)={tr.x[-1]:.6f} "
          f"(deviation {abs(tr.x[-1] - 1):.2e}), flag={tr.flag}")

print("\nlocal stability verdicts at tau = 0.9:")
for v in check_local_stability(logistic_example(0.9)):
    mark = "yes" if v.satisfied else "no"
    print(f"  {v.criterion.value:<18} lhs={v.lhs:>9.4g} "
          f"rhs={v.rhs:>9.4g}  {mark}")

# the linearization about K is itself a neutral equation with a = rho*r
lin = linearize(logistic_example(0.9))
print(f"\nlinearized coefficients: a = {lin.a(0.0):g}, b = {lin.b(0.0):g}, "
      f"delays {lin.g.declared_max:g}/{lin.h.declared_max:g}")
