"""Bregman distances, projections and proximal operators.

Every term here has a closed-form proximal map; combinations without one
raise :class:`CapabilityError` rather than falling back to an inner
numerical solver.
"""

import math

import numpy as np

__all__ = [
    "CapabilityError", "DomainError",
    "BregmanDistance", "EUCLIDEAN", "ENTROPY", "bregman_value",
    "ConvexSet", "PointSet", "ZeroSet", "NonnegOrthant", "Box", "L2Ball", "Simplex",
    "project", "dist_to_set",
    "ProximableTerm", "Zero", "WeightedL1", "LinearNonneg", "Indicator",
    "SupportOfShiftedSet",
    "indicator_point", "indicator_box", "indicator_nonneg", "indicator_simplex",
    "indicator_l2ball",
    "generalized_prox", "prox_conjugate_via_moreau", "project_simplex",
]

INF = math.inf


class CapabilityError(TypeError):
    """The requested (term, distance) combination has no closed form."""


class DomainError(ValueError):
    """An argument lies outside the domain of a prox-function."""


# ---------------------------------------------------------------- Bregman

class BregmanDistance:
    """Bregman distance ``b(x, y) = p(x) - p(y) - <grad p(y), x - y>``.

    ``kind="euclidean"`` uses ``p = ||.||^2 / 2``; ``kind="entropy"`` uses
    ``p(x) = sum x log x`` (generalized Kullback-Leibler divergence).
    """

    def __init__(self, kind):
        if kind not in ("euclidean", "entropy"):
            raise ValueError(f"unknown Bregman kind {kind!r}")
        self.kind = kind

    @property
    def grad_lipschitz(self):
        """Lipschitz constant of ``grad p``; ``None`` when unbounded."""
        return 1.0 if self.kind == "euclidean" else None

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.shape != y.shape:
            raise ValueError("Bregman arguments must have equal shapes")
        if self.kind == "euclidean":
            d = x - y
            return 0.5 * float(d @ d)
        if np.any(x <= 0) or np.any(y <= 0):
            raise DomainError("entropy Bregman distance needs strictly positive entries")
        return float(np.sum(x * np.log(x / y) - x + y))

    def __eq__(self, other):
        return isinstance(other, BregmanDistance) and other.kind == self.kind

    def __hash__(self):
        return hash(self.kind)

    def __repr__(self):
        return f"BregmanDistance({self.kind!r})"


EUCLIDEAN = BregmanDistance("euclidean")
ENTROPY = BregmanDistance("entropy")


def bregman_value(d, x, y):
    return d(x, y)


# ---------------------------------------------------------------- sets

class ConvexSet:
    """Nonempty closed convex set with a Euclidean projection."""

    is_cone = False

    def project(self, u):
        raise NotImplementedError

    def contains(self, u, tol=0.0):
        return self.dist(u) <= tol

    def dist(self, u):
        u = np.asarray(u, dtype=float)
        r = u - self.project(u)
        return float(np.sqrt(r @ r))

    def support(self, y):
        """Support function ``s(y) = sup_{u in set} <u, y>``."""
        raise NotImplementedError

    def project_polar(self, u):
        """Projection onto the polar cone ``-K*`` (cones only)."""
        raise CapabilityError(f"{type(self).__name__} is not a cone")


class PointSet(ConvexSet):
    def __init__(self, point):
        self.point = np.asarray(point, dtype=float)

    def project(self, u):
        return np.broadcast_to(self.point, np.shape(u)).copy()

    def support(self, y):
        return float(self.point @ np.asarray(y, dtype=float))

    def __repr__(self):
        return f"PointSet({self.point.tolist()})"


class ZeroSet(ConvexSet):
    """The set ``{0}``, i.e. an affine equality constraint after shifting."""

    is_cone = True

    def project(self, u):
        return np.zeros_like(np.asarray(u, dtype=float))

    def dist(self, u):
        u = np.asarray(u, dtype=float)
        return float(np.sqrt(u @ u))

    def support(self, y):
        return 0.0

    def project_polar(self, u):
        return np.array(u, dtype=float)

    def __repr__(self):
        return "ZeroSet()"


class NonnegOrthant(ConvexSet):
    is_cone = True

    def project(self, u):
        return np.maximum(np.asarray(u, dtype=float), 0.0)

    def support(self, y):
        return 0.0 if np.all(np.asarray(y) <= 0) else INF

    def project_polar(self, u):
        return np.minimum(np.asarray(u, dtype=float), 0.0)

    def __repr__(self):
        return "NonnegOrthant()"


class Box(ConvexSet):
    """Box ``[lo, hi]``; infinite bounds are allowed."""

    def __init__(self, lo, hi):
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)
        if np.any(self.lo > self.hi):
            raise ValueError("box is empty: lo > hi somewhere")

    def project(self, u):
        return np.clip(np.asarray(u, dtype=float), self.lo, self.hi)

    def support(self, y):
        y = np.asarray(y, dtype=float)
        with np.errstate(invalid="ignore"):
            terms = np.where(y > 0, y * self.hi, np.where(y < 0, y * self.lo, 0.0))
        return float(np.sum(terms))

    @property
    def bounded(self):
        return bool(np.all(np.isfinite(self.lo)) and np.all(np.isfinite(self.hi)))

    def __repr__(self):
        return f"Box(lo={self.lo!r}, hi={self.hi!r})"


class L2Ball(ConvexSet):
    """Centered Euclidean ball of the given radius."""

    def __init__(self, radius=1.0):
        if radius < 0:
            raise ValueError("radius must be nonnegative")
        self.radius = float(radius)

    #: Points this many ulps (relative) outside the sphere count as inside, so
    #: that projecting a rescaled point again returns it unchanged.
    SLACK = 8 * np.finfo(float).eps

    def project(self, u):
        u = np.asarray(u, dtype=float)
        nrm = np.sqrt(u @ u)
        if nrm <= self.radius * (1.0 + self.SLACK):
            return u.copy()
        return u * (self.radius / nrm)

    def support(self, y):
        y = np.asarray(y, dtype=float)
        return self.radius * float(np.sqrt(y @ y))

    def __repr__(self):
        return f"L2Ball({self.radius})"


class Simplex(ConvexSet):
    """Unit simplex ``{x >= 0, sum x = 1}``."""

    def project(self, u):
        return project_simplex(u)

    def support(self, y):
        return float(np.max(y))

    def __repr__(self):
        return "Simplex()"


def project_simplex(u):
    """Euclidean projection onto the unit simplex by sorting.

    Sorting is stable on ``-u`` so equal entries keep index order.
    """
    u = np.asarray(u, dtype=float)
    # Points already on the simplex up to rounding are returned unchanged, which
    # makes the projection exactly idempotent.
    if np.all(u >= 0) and abs(u.sum() - 1.0) <= 4 * u.size * np.finfo(float).eps:
        return u.copy()
    order = np.argsort(-u, kind="stable")
    s = u[order]
    css = np.cumsum(s) - 1.0
    idx = np.arange(1, u.size + 1)
    cond = s - css / idx > 0
    rho = np.nonzero(cond)[0][-1]
    theta = css[rho] / (rho + 1)
    return np.maximum(u - theta, 0.0)


def project(s, u):
    return s.project(u)


def dist_to_set(s, u):
    return s.dist(u)


# ---------------------------------------------------------------- terms

class ProximableTerm:
    """Proper closed convex function with a closed-form prox.

    Subclasses implement ``__call__`` (value, ``math.inf`` off-domain) and
    ``prox(x, step)`` returning ``argmin_v  t(v) + ||v - x||^2 / (2 step)``.
    """

    def __call__(self, x):
        raise NotImplementedError

    def prox(self, x, step):
        raise NotImplementedError

    def evaluate(self, x):
        return self(x)

    def prox_entropy(self, u, y, theta):
        raise CapabilityError(
            f"no closed-form generalized prox for ({type(self).__name__}, entropy)")


class Zero(ProximableTerm):
    def __call__(self, x):
        return 0.0

    def prox(self, x, step):
        return np.array(x, dtype=float)

    def __repr__(self):
        return "Zero()"


class WeightedL1(ProximableTerm):
    """``lam * ||x||_1``; `lam` may be a scalar or per-coordinate weights."""

    def __init__(self, lam=1.0):
        lam = np.asarray(lam, dtype=float)
        if np.any(lam < 0):
            raise ValueError("l1 weights must be nonnegative")
        self.lam = lam if lam.ndim else float(lam)

    def __call__(self, x):
        return float(np.sum(self.lam * np.abs(x)))

    def prox(self, x, step):
        x = np.asarray(x, dtype=float)
        return np.sign(x) * np.maximum(np.abs(x) - step * self.lam, 0.0)

    def __repr__(self):
        return f"WeightedL1({self.lam!r})"


class LinearNonneg(ProximableTerm):
    """``<c, x> + indicator(x >= 0)``, the objective of a standard-form LP."""

    def __init__(self, c):
        self.c = np.asarray(c, dtype=float)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x < 0):
            return INF
        return float(self.c @ x)

    def prox(self, x, step):
        return np.maximum(np.asarray(x, dtype=float) - step * self.c, 0.0)

    def __repr__(self):
        return f"LinearNonneg({self.c!r})"


class Indicator(ProximableTerm):
    """Indicator of a :class:`ConvexSet`; its prox is the projection."""

    def __init__(self, cset, tol=1e-12):
        self.set = cset
        self.tol = tol

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if isinstance(self.set, Simplex):
            ok = np.all(x >= -self.tol) and abs(x.sum() - 1.0) <= self.tol * max(1, x.size)
            return 0.0 if ok else INF
        return 0.0 if self.set.dist(x) <= self.tol else INF

    def prox(self, x, step):
        return self.set.project(x)

    def prox_entropy(self, u, y, theta):
        if not isinstance(self.set, Simplex):
            return super().prox_entropy(u, y, theta)
        u = np.asarray(u, dtype=float)
        if np.any(u <= 0):
            raise DomainError("entropy prox needs a strictly positive anchor")
        z = np.log(u) - theta * np.asarray(y, dtype=float)
        z -= z.max()
        w = np.exp(z)
        return w / w.sum()

    def __repr__(self):
        return f"Indicator({self.set!r})"


class SupportOfShiftedSet(ProximableTerm):
    """``s_{b + K}(y) = <b, y> + s_K(y)``, the conjugate of ``indicator(u - b in K)``."""

    def __init__(self, b, cset):
        self.b = np.asarray(b, dtype=float)
        self.set = cset

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        return float(self.b @ y) + self.set.support(y)

    def prox(self, x, step):
        x = np.asarray(x, dtype=float)
        if self.set.is_cone:
            # s_K is the indicator of the polar cone, so the prox is a shifted projection.
            return self.set.project_polar(x - step * self.b)
        # Moreau: prox_{step s_C}(x) = x - step * P_C(x / step), C = b + K.
        return x - step * (self.b + self.set.project(x / step - self.b))

    def __repr__(self):
        return f"SupportOfShiftedSet(b={self.b!r}, K={self.set!r})"


def indicator_point(b):
    return Indicator(PointSet(b))


def indicator_box(lo, hi):
    return Indicator(Box(lo, hi))


def indicator_nonneg():
    return Indicator(NonnegOrthant())


def indicator_simplex(tol=1e-12):
    return Indicator(Simplex(), tol=tol)


def indicator_l2ball(radius):
    return Indicator(L2Ball(radius))


# ---------------------------------------------------------------- operators

def generalized_prox(t, u, y, theta, d=EUCLIDEAN):
    """``argmin_v  t(v) + <y, v - u> + d(v, u) / theta``.

    For the Euclidean distance this is ``prox_{theta t}(u - theta y)``. The
    entropy distance is supported only for the simplex indicator, where the
    minimizer is a multiplicative (softmax) update of `u`.
    """
    if theta <= 0:
        raise ValueError("theta must be positive")
    if d.kind == "euclidean":
        u = np.asarray(u, dtype=float)
        return t.prox(u - theta * np.asarray(y, dtype=float), theta)
    return t.prox_entropy(u, y, theta)


def prox_conjugate_via_moreau(t, gamma, x):
    """Prox of ``t* / gamma`` at `x`, from the prox of ``gamma t``.

    Uses ``prox_{gamma t}(z) + gamma prox_{t*/gamma}(z / gamma) = z`` with
    ``z = gamma x``.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    x = np.asarray(x, dtype=float)
    z = gamma * x
    return (z - t.prox(z, gamma)) / gamma
