"""Post-hoc convergence certificates for double-loop runs."""

from dataclasses import asdict, dataclass, field

import numpy as np

from ..solvers import (
    initial_center, lemma1_check, theorem1_bound, theorem1_R0_sq, theorem2_bounds, theorem2_R0,
)

__all__ = ["SLACK_TOL", "CertificateCheck", "certify_result"]

#: A certificate passes when its worst slack is at least ``-SLACK_TOL``.
SLACK_TOL = 1e-8


@dataclass
class CertificateCheck:
    name: str
    passed: bool
    worst_slack: float
    count: int
    details: dict = field(default_factory=dict)

    def as_dict(self):
        return asdict(self)


def _check(name, slacks, **details):
    slacks = [float(s) for s in slacks]
    worst = min(slacks) if slacks else float("nan")
    return CertificateCheck(name=name, passed=bool(slacks) and worst >= -SLACK_TOL,
                            worst_slack=worst, count=len(slacks), details=details)


def certify_result(problem, config, result):
    """Evaluate the bound certificates at every outer boundary of `result`.

    Needs ``problem.reference`` with ``x_star`` and ``y_star``. Bounded-dual
    problems are checked against the objective-gap bound using the
    worst-case dual diameter over all centers; constrained problems against
    the three constrained bounds and the optimality-condition estimates.
    """
    ref = problem.reference
    if ref is None or ref.x_star is None or ref.y_star is None:
        raise ValueError("certificates need a reference with x* and y*")
    A_norm = problem.A.norm()
    x0, y0 = problem.x0, initial_center(problem)
    b = result.boundaries
    checks = []
    if problem.mode == "bounded_dual":
        D_Y = problem.dual.diameter_bound(None)
        if D_Y is None:
            raise ValueError("no finite dual diameter for this dual domain")
        R0_sq = theorem1_R0_sq(A_norm, config.m0, config.beta0, ref.x_star, x0, ref.y_star, y0)
        slacks = [theorem1_bound(R0_sq, D_Y, config.beta0, config.omega, config.m0, bd.K)
                  - (bd.objective - ref.value) for bd in b]
        spread = max((0.5 * float(np.sum((ref.y_star - bd.ycenter) ** 2)) for bd in b),
                     default=0.0)
        checks.append(_check("objective_gap_bound", slacks, D_Y=D_Y, R0_sq=R0_sq,
                             max_center_distance=spread, outer_rounds=len(b)))
        return checks
    R0 = theorem2_R0(A_norm, config.m0, config.beta0, ref.x_star, x0, ref.y_star, y0)
    ys = float(np.linalg.norm(ref.y_star))
    lower, upper, feas = [], [], []
    for bd in b:
        lo, up, fe = theorem2_bounds(R0, ys, config.beta0, config.omega, config.m0, 1.0, bd.K)
        gap = bd.f_value - ref.value
        lower.append(gap + ys * bd.feasibility + lo)
        upper.append(up - gap)
        feas.append(fe - bd.feasibility)
    checks.append(_check("gap_lower_bound", lower, R0=R0, y_star_norm=ys, outer_rounds=len(b)))
    checks.append(_check("gap_upper_bound", upper, R0=R0, y_star_norm=ys, outer_rounds=len(b)))
    checks.append(_check("feasibility_bound", feas, R0=R0, y_star_norm=ys, outer_rounds=len(b)))
    lemma = [lemma1_check(bd.xbar, bd.ycenter, bd.beta, problem, ref.y_star, ref.value).worst
             for bd in b]
    checks.append(_check("optimality_estimates", lemma))
    return checks
