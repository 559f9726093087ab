"""Last iterate against averaged iterate on a square-root LASSO problem.

The double-loop method certifies its last iterate. Chambolle-Pock is
usually analysed through the running average, which converges more slowly
than its own last iterate on this instance.

Run with ``python demos/03_last_vs_average.py`` (about 15 seconds).
"""

from asgard.problems import build_sqrt_lasso, reference_solution
from asgard.solvers import (
    ChambollePockConfig, SolverConfig, run_asgard, run_asgard_dl, run_chambolle_pock,
)

prob = reference_solution(build_sqrt_lasso(seed=7), "long_run", budget=200000)
print(f"reference value P* = {prob.reference.value:.12f} ({prob.reference.note})\n")
normA = prob.A.norm()
budget = 10000
single = run_asgard(prob, SolverConfig(beta0=normA, iter_budget=budget))
double = run_asgard_dl(prob, SolverConfig(beta0=normA, iter_budget=budget))
cp = run_chambolle_pock(prob, ChambollePockConfig(iter_budget=budget))

cols = [("ASGARD", single.trace), ("ASGARD-DL", double.trace),
        ("CP last", cp.trace), ("CP average", cp.trace_average)]
print(f"{'k':>6}" + "".join(f"{name:>12}" for name, _ in cols))
for k in (10, 100, 1000, 10000):
    print(f"{k:>6}" + "".join(f"{t.at(k).objective_residual:12.2e}" for _, t in cols))
