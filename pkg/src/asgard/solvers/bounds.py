"""Closed-form convergence certificates for the double-loop method."""

import math
from dataclasses import dataclass

import numpy as np

from ..smoothing import ConstraintDual
from .core import f_plus_h
from .schedules import kappa0, rho0

__all__ = [
    "theorem1_bound", "theorem1_R0_sq", "theorem2_bounds", "theorem2_R0",
    "Lemma1Report", "lemma1_check",
]


def theorem1_bound(R0_sq, D_Y, beta0, omega, m0, K):
    """Objective-gap bound for a bounded dual domain after ``K`` inner steps.

    ``omega kappa0 / (beta0 [(omega-1) K + kappa0]) * [R0^2 + beta0^2 omega D_Y / ((omega-1) m0)]``
    with ``kappa0 = m0 + omega/(omega-1)``.
    """
    if not omega > 1:
        raise ValueError("omega must exceed 1")
    if beta0 <= 0 or m0 <= 0:
        raise ValueError("beta0 and m0 must be positive")
    k0 = kappa0(m0, omega)
    lead = omega * k0 / (beta0 * ((omega - 1.0) * K + k0))
    return lead * (R0_sq + beta0 * beta0 * omega * D_Y / ((omega - 1.0) * m0))


def theorem1_R0_sq(norm_A, m0, beta0, x_star, x0, y_star, y0):
    """``4 ||A||^2 / (m0+1)^2 * d(x*, x0) + beta0^2 * b(y*, y0)`` (Euclidean distances)."""
    dx = 0.5 * float(np.sum((np.asarray(x_star) - x0) ** 2))
    dy = 0.5 * float(np.sum((np.asarray(y_star) - y0) ** 2))
    return 4.0 * norm_A ** 2 / (m0 + 1) ** 2 * dx + beta0 ** 2 * dy


def theorem2_R0(norm_A, m0, beta0, x_star, x0, y_star, y0):
    """``sqrt(4 ||A||^2/(m0+1)^2 d(x*, x0) + beta0^2 m0 (m0+3)/(m0+1)^2 b(y*, y0))``."""
    dx = 0.5 * float(np.sum((np.asarray(x_star) - x0) ** 2))
    dy = 0.5 * float(np.sum((np.asarray(y_star) - y0) ** 2))
    return math.sqrt(4.0 * norm_A ** 2 / (m0 + 1) ** 2 * dx
                     + beta0 ** 2 * m0 * (m0 + 3) / (m0 + 1) ** 2 * dy)


def theorem2_bounds(R0, y_star_norm, beta0, omega, m0, L_bY, K):
    """Right-hand sides ``(lower_gap, upper_gap, feas_bound)`` for the constrained setting.

    The certified statements at ``K = K_{s+1}`` are

    * ``f - f* >= -||y*|| dist - lower_gap``
    * ``f - f* <= upper_gap``
    * ``dist <= feas_bound``

    where ``dist = dist_K(A xbar - b)``.
    """
    if not omega > 1:
        raise ValueError("omega must exceed 1")
    if not m0 > 1.0 / (omega - 1.0):
        raise ValueError("the constrained bounds need m0 > 1/(omega-1)")
    k0 = kappa0(m0, omega)
    r0 = rho0(beta0, m0, omega)
    den = (omega - 1.0) * K + k0
    lower = 2.0 * math.sqrt(2.0) * omega * beta0 * L_bY * k0 * y_star_norm * R0 / (r0 * den)
    upper = (omega * k0 * R0 ** 2 / (r0 * den)
             + omega * beta0 * L_bY * k0 / (2.0 * den) * (y_star_norm ** 2 + 2.0 * R0 ** 2 / r0 ** 2))
    feas = (omega * beta0 * L_bY * k0 / den
            * (2.0 * y_star_norm + (2.0 * math.sqrt(2.0) + math.sqrt(2.0 / L_bY)) * R0 / r0))
    return lower, upper, feas


@dataclass(frozen=True)
class Lemma1Report:
    """Slacks (right side minus left side, ``>= 0`` when the inequality holds)."""

    gap_lower: float
    gap_upper: float
    shifted_dist: float
    band_lower: float
    band_upper: float
    band_lower_plus: float
    band_upper_plus: float
    gap: float
    smoothed_gap: float

    @property
    def worst(self):
        return min(self.gap_lower, self.gap_upper, self.shifted_dist, self.band_lower,
                   self.band_upper, self.band_lower_plus, self.band_upper_plus)


def lemma1_check(x_bar, y_center, beta, problem, y_star, f_star):
    """Evaluate the optimality-condition estimates for a constrained problem.

    With ``r = A xbar - b``, ``d = dist_K(r + beta ycenter)`` and the smoothed
    gap ``S = f(xbar) + g_beta(A xbar; ycenter) - f*`` this checks

    * ``f - f* >= beta <ycenter, y*> - ||y*|| d``
    * ``f - f* <= S - d^2 / (2 beta) + beta ||ycenter||^2 / 2``
    * ``d <= beta (||y*|| + sqrt(||ycenter - y*||^2 + 2 S / beta))``
    * ``|dist_K(r -+ beta ycenter) - dist_K(r)| <= beta (||ycenter - y*|| + ||y*||)``

    for the Euclidean dual distance (so ``L_bY = 1``).
    """
    if not isinstance(problem.dual, ConstraintDual):
        raise ValueError("lemma1_check needs a constrained problem")
    if y_star is None or f_star is None:
        raise ValueError("lemma1_check needs oracle y* and f*")
    dual = problem.dual
    x_bar = np.asarray(x_bar, dtype=float)
    yc = np.asarray(y_center, dtype=float)
    ys = np.asarray(y_star, dtype=float)
    Ax = problem.A.apply(x_bar)
    r = Ax - dual.b
    gap = f_plus_h(problem, x_bar) - f_star
    d1 = dual.set.dist(r + beta * yc)
    S = gap + dual.smoothed_value(Ax, beta, yc)
    ys_norm = float(np.linalg.norm(ys))
    diff_norm = float(np.linalg.norm(yc - ys))
    slack1 = gap - (beta * float(yc @ ys) - ys_norm * d1)
    slack2 = (S - d1 * d1 / (2.0 * beta) + 0.5 * beta * float(yc @ yc)) - gap
    inner = diff_norm ** 2 + 2.0 * S / beta
    slack3 = beta * (ys_norm + math.sqrt(max(inner, 0.0))) - d1
    d0 = dual.set.dist(r)
    width = beta * (diff_norm + ys_norm)
    d_minus = dual.set.dist(r - beta * yc)
    return Lemma1Report(
        gap_lower=slack1, gap_upper=slack2, shifted_dist=slack3,
        band_lower=d_minus - (d0 - width), band_upper=(d0 + width) - d_minus,
        band_lower_plus=d1 - (d0 - width), band_upper_plus=(d0 + width) - d1,
        gap=gap, smoothed_gap=S)
