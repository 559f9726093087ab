"""Momentum-parameter equation and the outer-loop parameter schedules."""

import math
from fractions import Fraction

__all__ = [
    "solve_tau_cubic", "tau_cubic", "next_inner_length", "schedule_unconstrained",
    "schedule_constrained", "schedule_sequence", "kappa0", "rho0",
]


def tau_cubic(tau, tau_k, L_b):
    """``tau^3 / L_b + tau^2 + tau_k^2 tau - tau_k^2``."""
    t2 = tau_k * tau_k
    return tau * tau * tau / L_b + tau * tau + t2 * tau - t2


def solve_tau_cubic(tau_k, L_b=1.0):
    """Root in ``(0, tau_k)`` of :func:`tau_cubic`, by bisection.

    The cubic is increasing on ``(0, inf)``, equals ``-tau_k^2 < 0`` at 0 and
    ``tau_k^3 (1 + 1/L_b) > 0`` at ``tau_k``, so the root is unique. Bisection
    runs until the bracket stops shrinking in floating point.
    """
    if not 0.0 < tau_k <= 1.0:
        raise ValueError("tau_k must lie in (0, 1]")
    if not L_b > 0:
        raise ValueError("L_b must be positive")
    lo, hi = 0.0, float(tau_k)
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if tau_cubic(mid, tau_k, L_b) < 0.0:
            lo = mid
        else:
            hi = mid
    # Pick the bracket end with the smaller residual; both are in (0, tau_k].
    best = lo if lo > 0.0 and abs(tau_cubic(lo, tau_k, L_b)) <= abs(tau_cubic(hi, tau_k, L_b)) else hi
    return min(best, math.nextafter(float(tau_k), 0.0))


def next_inner_length(m, omega):
    """``floor(omega (m + 1) + 1) - 1``, with the product evaluated exactly."""
    return math.floor(Fraction(omega) * (m + 1) + 1) - 1


def schedule_unconstrained(beta_s, m_s, omega):
    """Next ``(beta, m)`` for a bounded dual domain: ``beta / omega`` and the length rule."""
    if not omega > 1:
        raise ValueError("omega must exceed 1")
    return beta_s / omega, next_inner_length(m_s, omega)


def schedule_constrained(beta_s, m_s, omega):
    """Next ``(beta, m)`` for the constrained setting.

    ``m' = floor(omega (m + 1) + 1) - 1`` and
    ``beta' = beta (m' + 1) / (omega sqrt(m' (m' + 3)))``.
    """
    if not omega > 1:
        raise ValueError("omega must exceed 1")
    m_next = next_inner_length(m_s, omega)
    return beta_s * (m_next + 1) / (omega * math.sqrt(m_next * (m_next + 3))), m_next


def schedule_sequence(beta0, m0, omega, mode, count):
    """First `count` pairs ``(beta_s, m_s)``, ``s = 0 .. count-1``.

    In bounded-dual mode ``beta_s`` is the closed form ``beta0 / omega**s``
    so that ``beta_s * omega**s`` reproduces ``beta0`` to rounding.
    """
    out = []
    beta, m = float(beta0), int(m0)
    for s in range(count):
        if mode == "bounded_dual":
            beta = beta0 / omega ** s
        out.append((beta, m))
        if mode == "bounded_dual":
            m = next_inner_length(m, omega)
        elif mode == "constrained":
            beta, m = schedule_constrained(beta, m, omega)
        else:
            raise ValueError(f"unknown mode {mode!r}")
    return out


def kappa0(m0, omega):
    """``m0 + omega / (omega - 1)``."""
    return m0 + omega / (omega - 1.0)


def rho0(beta0, m0, omega):
    """``beta0 (1 - 1 / ((omega - 1) m0))``."""
    return beta0 * (1.0 - 1.0 / ((omega - 1.0) * m0))
