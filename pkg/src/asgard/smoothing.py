"""Nesterov smoothing of the nonsmooth term ``g`` through its max-form.

Two dual-side descriptors cover every problem in the package:

* :class:`LipschitzDual` -- ``g(u) = max_{y in Y} <u - c, y>`` with a
  bounded dual domain ``Y`` (box, ball or simplex) and offset ``c``.
* :class:`ConstraintDual` -- ``g(u) = indicator(u - b in K)``, whose
  conjugate is the support function ``s_{b+K}`` and whose dual domain is
  all of ``R^n``.

Both expose ``maximizer(u, beta, center)``, the maximizer ``y*`` of
``<u, y> - g*(y) - beta * b(y, center)``, which equals the gradient of the
smoothed function ``g_beta(.; center)`` at ``u``.
"""

from dataclasses import dataclass

import numpy as np

from .proxcore import (
    EUCLIDEAN, Box, CapabilityError, ConvexSet, Indicator, L2Ball, Simplex,
    SupportOfShiftedSet,
)

__all__ = [
    "LipschitzDual", "ConstraintDual", "SmoothedDual",
    "smoothed_grad", "smoothed_value", "constrained_smoothed_value",
    "constrained_smoothed_grad", "dual_diameter_bound",
]


class LipschitzDual:
    """Max-form ``g(u) = max_{y in domain} <u - offset, y>``.

    Parameters
    ----------
    domain : Box, L2Ball or Simplex
        Bounded dual domain ``dom g*``.
    offset : array_like, optional
        The vector ``c`` above; zero by default.
    bregman : BregmanDistance
        Euclidean for any domain; entropy only for the simplex.
    dim : int, optional
        Dual dimension; needed only when neither `offset` nor the box
        bounds carry it.
    """

    mode = "bounded_dual"

    def __init__(self, domain, offset=None, bregman=EUCLIDEAN, dim=None):
        if isinstance(domain, Box) and not domain.bounded:
            raise ValueError("LipschitzDual needs a bounded box")
        if not isinstance(domain, (Box, L2Ball, Simplex)):
            raise CapabilityError(f"unsupported dual domain {domain!r}")
        if bregman.kind == "entropy" and not isinstance(domain, Simplex):
            raise CapabilityError(
                f"entropy smoothing needs a simplex dual domain, got {domain!r}")
        self.domain = domain
        self.offset = None if offset is None else np.asarray(offset, dtype=float)
        self.bregman = bregman
        if dim is None:
            if self.offset is not None:
                dim = self.offset.size
            elif isinstance(domain, Box) and np.ndim(domain.lo + domain.hi):
                dim = np.size(domain.lo + domain.hi)
        self.dim = dim

    def _shift(self, u):
        return u if self.offset is None else u - self.offset

    def value(self, u):
        """``g(u)``."""
        return self.domain.support(self._shift(np.asarray(u, dtype=float)))

    def conjugate(self, y):
        c = 0.0 if self.offset is None else float(self.offset @ y)
        return c + Indicator(self.domain)(y)

    def conjugate_term(self):
        """``g*`` as a proximable term, for routes that go through its prox."""
        return _ShiftedIndicator(self.domain, self.offset)

    def maximizer(self, u, beta, center):
        w = self._shift(u)
        if self.bregman.kind == "euclidean":
            return self.domain.project(center + w / beta)
        z = np.log(center) + w / beta
        z -= z.max()
        e = np.exp(z)
        return e / e.sum()

    def smoothed_value(self, u, beta, center):
        y = self.maximizer(u, beta, center)
        return float(self._shift(np.asarray(u, dtype=float)) @ y) - beta * self.bregman(y, center)

    def prox_conjugate(self, v, sigma):
        """``prox_{sigma g*}(v)``."""
        if self.offset is not None:
            v = v - sigma * self.offset
        return self.domain.project(v)

    def diameter_bound(self, center=None):
        """``sup_{y in domain} b(y, center)``.

        With ``center=None`` the supremum is also taken over all centers in
        the domain, which is what a restarted method needs since its centers
        move.
        """
        dom = self.domain
        if self.bregman.kind == "entropy":
            if center is None:
                return None
            center = np.asarray(center, dtype=float)
            return float(np.max(-np.log(center)) - 1.0 + center.sum())
        if isinstance(dom, Box):
            if center is None:
                if self.dim is None:
                    raise ValueError("dual dimension unknown; pass dim=")
                w = np.broadcast_to(dom.hi - dom.lo, (self.dim,))
                return 0.5 * float(w @ w)
            c = np.asarray(center, dtype=float)
            far = np.maximum(c - dom.lo, dom.hi - c)
            return 0.5 * float(far @ far)
        if isinstance(dom, L2Ball):
            if center is None:
                return 2.0 * dom.radius ** 2
            c = np.asarray(center, dtype=float)
            return 0.5 * (dom.radius + float(np.sqrt(c @ c))) ** 2
        if center is None:
            return 1.0
        c = np.asarray(center, dtype=float)
        # farthest vertex e_i of the simplex
        base = float(c @ c)
        return 0.5 * float(np.max(base - 2.0 * c + 1.0))

    def __repr__(self):
        return f"LipschitzDual(domain={self.domain!r}, bregman={self.bregman.kind!r})"


class _ShiftedIndicator(Indicator):
    """``<c, y> + indicator_Y(y)``."""

    def __init__(self, domain, offset):
        super().__init__(domain)
        self.offset = offset

    def __call__(self, y):
        base = super().__call__(y)
        return base if self.offset is None else base + float(self.offset @ y)

    def prox(self, x, step):
        if self.offset is not None:
            x = x - step * self.offset
        return self.set.project(x)


class ConstraintDual:
    """``g(u) = indicator(u - b in K)`` for a closed convex ``K`` with ``0 in K``.

    Only the Euclidean dual distance has closed forms here.
    """

    mode = "constrained"

    def __init__(self, cset, b, bregman=EUCLIDEAN):
        if not isinstance(cset, ConvexSet):
            raise TypeError("cset must be a ConvexSet")
        if bregman.kind != "euclidean":
            raise CapabilityError(
                f"constrained smoothing is closed-form only for the Euclidean distance, "
                f"got {bregman.kind!r}")
        self.set = cset
        self.b = np.asarray(b, dtype=float)
        self.bregman = bregman

    def feasibility(self, u):
        """``dist_K(u - b)``."""
        return self.set.dist(np.asarray(u, dtype=float) - self.b)

    def value(self, u, tol=0.0):
        return 0.0 if self.feasibility(u) <= tol else np.inf

    def conjugate(self, y):
        y = np.asarray(y, dtype=float)
        return float(self.b @ y) + self.set.support(y)

    def conjugate_term(self):
        return SupportOfShiftedSet(self.b, self.set)

    def maximizer(self, u, beta, center):
        r = u - self.b
        return center + (r - self.set.project(r + beta * center)) / beta

    def maximizer_cone(self, u, beta, center):
        """Same maximizer through the polar cone; valid only when ``K`` is a cone."""
        if not self.set.is_cone:
            raise CapabilityError(f"{self.set!r} is not a cone")
        return self.set.project_polar(center + (u - self.b) / beta)

    def smoothed_value(self, u, beta, center):
        d = self.set.dist(u - self.b + beta * center)
        return d * d / (2.0 * beta) - 0.5 * beta * float(center @ center)

    def prox_conjugate(self, v, sigma):
        """``prox_{sigma g*}(v)``."""
        return self.conjugate_term().prox(v, sigma)

    def diameter_bound(self, center=None):
        return None

    def __repr__(self):
        return f"ConstraintDual(K={self.set!r})"


@dataclass(frozen=True)
class SmoothedDual:
    """``g_beta(.; center)`` for a fixed smoothness and dual center."""

    dual: object
    beta: float
    center: np.ndarray

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))

    @property
    def bregman(self):
        return self.dual.bregman

    def grad(self, u):
        return self.dual.maximizer(np.asarray(u, dtype=float), self.beta, self.center)

    def value(self, u):
        return self.dual.smoothed_value(np.asarray(u, dtype=float), self.beta, self.center)


def smoothed_grad(sd, u):
    """Maximizer ``y*`` of ``<u, y> - g*(y) - beta b(y, center)``.

    For the Euclidean distance this is computed as
    ``prox_{g*/beta}(center + u / beta)``, i.e. through the proximal map of
    the conjugate term rather than a descriptor-specific closed form.
    """
    u = np.asarray(u, dtype=float)
    if sd.bregman.kind == "euclidean":
        gstar = sd.dual.conjugate_term()
        return gstar.prox(sd.center + u / sd.beta, 1.0 / sd.beta)
    return sd.grad(u)


def smoothed_value(sd, u):
    u = np.asarray(u, dtype=float)
    y = smoothed_grad(sd, u)
    return float(u @ y) - sd.dual.conjugate(y) - sd.beta * sd.bregman(y, sd.center)


def _require_constrained(sd):
    if not isinstance(sd.dual, ConstraintDual):
        raise CapabilityError("constrained closed forms need a ConstraintDual")
    if sd.bregman.kind != "euclidean":
        raise CapabilityError("constrained closed forms need the Euclidean distance")


def constrained_smoothed_value(sd, Ax):
    """``dist_K(Ax - b + beta c)^2 / (2 beta) - beta ||c||^2 / 2``."""
    _require_constrained(sd)
    return sd.dual.smoothed_value(np.asarray(Ax, dtype=float), sd.beta, sd.center)


def constrained_smoothed_grad(sd, Ax):
    """``c + (Ax - b - P_K(Ax - b + beta c)) / beta``."""
    _require_constrained(sd)
    return sd.dual.maximizer(np.asarray(Ax, dtype=float), sd.beta, sd.center)


def dual_diameter_bound(sd, worst_case=False):
    """Prox-diameter of ``dom g*`` seen from the center (or from any center).

    Returns ``None`` when the dual domain is unbounded.
    """
    return sd.dual.diameter_bound(None if worst_case else sd.center)
