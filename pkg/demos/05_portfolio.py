"""A three-term problem: smooth objective, simplex, and a ball constraint.

Maximize the mean return over portfolio weights on the simplex, subject to a
cap on the empirical variance. The linear objective enters as the smooth
term h with zero curvature.

Run with ``python demos/05_portfolio.py`` (a few seconds).
"""

import numpy as np

from asgard.problems import build_portfolio, make_returns
from asgard.solvers import (
    ChambollePockConfig, SolverConfig, run_asgard_dl_three_term, run_chambolle_pock,
)

R = make_returns(60, 10, seed=3)
M = R - R.mean(axis=0)
rho = R.mean(axis=0)
risk = (M ** 2).sum(axis=0) / R.shape[1]
best = int(np.argmax(rho))
epsilon = 0.3 * risk[best]
prob = build_portfolio(R, epsilon)
print(f"asset {best} has the best mean return {rho[best]:.5f} but risk "
      f"{risk[best]:.2e} > cap {epsilon:.2e}\n")

res = run_asgard_dl_three_term(prob, SolverConfig(beta0=prob.A.norm(), iter_budget=20000))
cp = run_chambolle_pock(prob, ChambollePockConfig(iter_budget=20000))
for name, trace in (("ASGARD-DL", res.trace), ("CP", cp.trace)):
    print(name)
    for k in (100, 1000, 20000):
        r = trace.at(k)
        print(f"  k={k:>6}  mean return {-r.objective:.7f}  distance to the risk ball {r.feasibility:.2e}")

x = res.x
print("\nweights:", np.round(x, 4))
print(f"variance {np.sum((M @ x) ** 2) / R.shape[1]:.4e} (cap {epsilon:.4e})")
