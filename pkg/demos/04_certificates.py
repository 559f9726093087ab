"""Checking the closed-form convergence bounds along a run.

With an exact LP solution at hand, every outer boundary of a double-loop run
can be compared against the worst-case bounds: an objective-gap bound when
the dual domain is bounded, and gap plus feasibility bounds for constrained
problems.

Run with ``python demos/04_certificates.py`` (a few seconds).
"""

from asgard.harness.certificates import certify_result
from asgard.problems import (
    build_basis_pursuit, build_l1_svm, make_classification, reference_solution,
)
from asgard.solvers import SolverConfig, run_asgard_dl, theorem1_bound

# l1-regularized SVM: the hinge loss has the dual domain [0, 1]^n.
svm = reference_solution(build_l1_svm(make_classification(50, 20, seed=1), lam=0.1), "lp_exact")
cfg = SolverConfig(beta0=0.1 * svm.A.norm(), iter_budget=3000)
res = run_asgard_dl(svm, cfg)
(check,) = certify_result(svm, cfg, res)
print(f"SVM: P* = {svm.reference.value:.10f}, {check.count} boundaries, "
      f"worst slack {check.worst_slack:.3e}, passed = {check.passed}")
R0_sq, D_Y = check.details["R0_sq"], check.details["D_Y"]
print(f"{'K':>6}  {'P - P*':>10}  {'bound':>10}")
for bd in res.boundaries[::4]:
    bound = theorem1_bound(R0_sq, D_Y, cfg.beta0, cfg.omega, cfg.m0, bd.K)
    print(f"{bd.K:>6}  {bd.objective - svm.reference.value:10.3e}  {bound:10.3e}")

# Basis pursuit: equality constraints, so the dual domain is unbounded and
# the lower bound on f - f* involves the constraint violation.
bp = reference_solution(build_basis_pursuit(n=20, p=50, seed=11), "lp_exact")
cfg = SolverConfig(beta0=10 * bp.A.norm(), iter_budget=20000, trace_every=20000)
res = run_asgard_dl(bp, cfg)
print(f"\nbasis pursuit: f* = {bp.reference.value:.10f}")
for c in certify_result(bp, cfg, res):
    print(f"  {c.name:<22} passed={c.passed}  worst slack {c.worst_slack:.3e} over {c.count}")
