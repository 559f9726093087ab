"""Smoothing a nonsmooth term through its max-form.

Run with ``python demos/01_smoothing.py``.
"""

import numpy as np

from asgard.proxcore import Box, NonnegOrthant, ZeroSet
from asgard.smoothing import (
    ConstraintDual, LipschitzDual, SmoothedDual, constrained_smoothed_grad,
    constrained_smoothed_value, dual_diameter_bound, smoothed_grad, smoothed_value,
)

# The absolute value is max_{|y| <= 1} u*y. Subtracting beta/2 * y^2 inside the
# max gives the Huber function: quadratic near zero and linear beyond beta.
abs_dual = LipschitzDual(Box(-1.0, 1.0), dim=1)
for beta in (1.0, 0.1, 0.01):
    sd = SmoothedDual(abs_dual, beta, np.zeros(1))
    row = [smoothed_value(sd, np.array([u])) for u in (-2.0, -0.05, 0.0, 0.05, 2.0)]
    print(f"beta={beta:<5} g_beta at (-2, -0.05, 0, 0.05, 2):", np.round(row, 5))

# The smoothed value never exceeds g, and it undershoots by at most beta * D,
# where D bounds the distance term over the dual domain.
rng = np.random.default_rng(0)
n = 6
dual = LipschitzDual(Box(-1.0, 1.0), dim=n)
sd = SmoothedDual(dual, 0.3, np.zeros(n))
D = dual_diameter_bound(sd)
gaps = []
for _ in range(1000):
    u = 3 * rng.standard_normal(n)
    gaps.append(dual.value(u) - smoothed_value(sd, u))
print(f"\ng - g_beta over 1000 points lies in [{min(gaps):.3e}, {max(gaps):.3e}]; "
      f"beta * D = {sd.beta * D:.3f}")

# Its gradient is the dual maximizer, which is (1/beta)-Lipschitz.
u, v = rng.standard_normal(n), rng.standard_normal(n)
ratio = np.linalg.norm(smoothed_grad(sd, u) - smoothed_grad(sd, v)) / np.linalg.norm(u - v)
print(f"gradient change / input change = {ratio:.3f} <= 1/beta = {1 / sd.beta:.3f}")

# Constraints Ax - b in K are indicators. Their smoothing is a scaled squared
# distance, and its gradient is a projection residual.
eq = SmoothedDual(ConstraintDual(ZeroSet(), np.zeros(2)), 0.5, np.zeros(2))
print("\nK = {0}:  value", constrained_smoothed_value(eq, np.array([1.0, 0.0])),
      " gradient", constrained_smoothed_grad(eq, np.array([1.0, 0.0])))
ineq = SmoothedDual(ConstraintDual(NonnegOrthant(), np.zeros(1)), 1.0, np.zeros(1))
for r in (1.0, -1.0):
    print(f"K = R_+, r = {r:+}: value {constrained_smoothed_value(ineq, np.array([r])):.2f}, "
          f"gradient {constrained_smoothed_grad(ineq, np.array([r]))}")
