"""Problem instances ``min f(x) + g(Ax) + h(x)`` and their builders.

Each builder returns an immutable :class:`ProblemInstance`. Reference
solutions (needed by the convergence certificates) are attached with
:func:`reference_solution`.
"""

import dataclasses
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .linops import LinearMap
from .proxcore import (
    Box, Indicator, L2Ball, LinearNonneg, NonnegOrthant, PointSet, ProximableTerm,
    Simplex, WeightedL1, Zero, ZeroSet,
)
from .smoothing import ConstraintDual, LipschitzDual

__all__ = [
    "SmoothTerm", "LinearSmooth", "HalfSquaredNorm", "Reference", "ProblemInstance",
    "Dataset", "OracleNotApplicable",
    "build_sqrt_lasso", "build_degenerate_lp", "build_basis_pursuit", "build_lad_lasso",
    "build_l1_svm", "build_portfolio", "make_classification", "make_returns",
    "laplace_noise", "reference_solution", "kkt_residuals", "BUILDERS",
]


class OracleNotApplicable(ValueError):
    """The requested reference oracle cannot handle this instance."""


# ---------------------------------------------------------------- smooth terms

class SmoothTerm:
    """Differentiable ``h`` with an ``lipschitz``-Lipschitz gradient."""

    lipschitz = None

    def __call__(self, x):
        raise NotImplementedError

    def grad(self, x):
        raise NotImplementedError


class LinearSmooth(SmoothTerm):
    """``h(x) = <c, x>``; its gradient is constant, so ``L_h = 0``."""

    lipschitz = 0.0

    def __init__(self, c):
        self.c = np.asarray(c, dtype=float)

    def __call__(self, x):
        return float(self.c @ x)

    def grad(self, x):
        return self.c

    def __repr__(self):
        return f"LinearSmooth({self.c!r})"


class HalfSquaredNorm(SmoothTerm):
    """``h(x) = ||x||^2 / 2``."""

    lipschitz = 1.0

    def __call__(self, x):
        return 0.5 * float(x @ x)

    def grad(self, x):
        return np.asarray(x, dtype=float)


# ---------------------------------------------------------------- instances

@dataclass(frozen=True)
class Reference:
    """Oracle solution: primal ``x_star``, optimal value, dual ``y_star``."""

    value: float
    x_star: np.ndarray = None
    y_star: np.ndarray = None
    kind: str = "analytic"
    note: str = ""


@dataclass(frozen=True)
class ProblemInstance:
    name: str
    f: ProximableTerm
    A: LinearMap
    dual: object
    h: SmoothTerm = None
    reference: Reference = None
    x0: np.ndarray = None
    params: dict = field(default_factory=dict)
    defaults: dict = field(default_factory=dict)

    def __post_init__(self):
        x0 = np.zeros(self.A.cols) if self.x0 is None else np.asarray(self.x0, dtype=float)
        if x0.shape != (self.A.cols,):
            raise ValueError("x0 has the wrong length")
        object.__setattr__(self, "x0", x0)
        if self.mode == "constrained":
            if self.dual.b.shape != (self.A.rows,):
                raise ValueError("constraint offset b must have one entry per row of A")
            if self.dual.set.dist(np.zeros(self.A.rows)) > 0:
                raise ValueError("the constraint set must contain the origin")
        elif self.dual.offset is not None and self.dual.offset.shape != (self.A.rows,):
            raise ValueError("dual offset must have one entry per row of A")

    @property
    def mode(self):
        return self.dual.mode

    @property
    def dims(self):
        return self.A.shape

    def objective(self, x, Ax=None):
        """``f + h`` plus ``g(Ax)`` in bounded-dual mode (the constraint is reported separately)."""
        val = self.f(x)
        if self.h is not None:
            val += self.h(x)
        if self.mode == "bounded_dual":
            val += self.dual.value(self.A.apply(x) if Ax is None else Ax)
        return val

    def feasibility(self, x, Ax=None):
        if self.mode != "constrained":
            return 0.0
        return self.dual.feasibility(self.A.apply(x) if Ax is None else Ax)

    def with_reference(self, reference):
        return dataclasses.replace(self, reference=reference)


@dataclass(frozen=True)
class Dataset:
    """Sparse feature matrix with labels in ``{-1, +1}``."""

    features: sp.csr_matrix
    labels: np.ndarray

    def __post_init__(self):
        X = sp.csr_matrix(self.features, dtype=float)
        y = np.asarray(self.labels, dtype=float)
        if X.shape[0] != y.shape[0]:
            raise ValueError("one label per sample required")
        if not np.all(np.isin(y, (-1.0, 1.0))):
            raise ValueError("labels must be -1 or +1")
        X.sort_indices()
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)

    @property
    def shape(self):
        return self.features.shape


# ---------------------------------------------------------------- random data

def laplace_noise(rng, size):
    """Laplace(0, 1) samples by inverting the CDF of seeded uniforms."""
    u = rng.random(size) - 0.5
    return -np.sign(u) * np.log1p(-2.0 * np.abs(u))


def _sparse_signal(rng, p, s):
    x = np.zeros(p)
    support = np.sort(rng.choice(p, size=s, replace=False))
    x[support] = rng.standard_normal(s)
    return x


def make_classification(n, p, seed=0, density=1.0, noise=0.1):
    """Synthetic linearly separable-ish binary data for the SVM builder."""
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, p))
    if density < 1.0:
        X *= rng.random((n, p)) < density
    w = rng.standard_normal(p)
    score = X @ w + noise * rng.standard_normal(n)
    labels = np.where(score > 0, 1.0, -1.0)
    return Dataset(sp.csr_matrix(X), labels)


def make_returns(n, p, seed=0, drift=1e-3, vol=1e-2):
    """Synthetic ``n x p`` matrix of per-period asset returns."""
    rng = np.random.default_rng(seed)
    mu = drift * (1.0 + rng.random(p))
    return 1.0 + mu + vol * rng.standard_normal((n, p))


# ---------------------------------------------------------------- builders

def build_sqrt_lasso(n=20, p=50, sigma_noise=0.01, lam=0.03, seed=7, sparsity=None):
    """``||Ax - b||_2 + lam ||x||_1`` with unit-norm Gaussian columns."""
    if n < 1 or p < 1:
        raise ValueError("dimensions must be positive")
    if lam <= 0:
        raise ValueError("lam must be positive")
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((n, p))
    M /= np.linalg.norm(M, axis=0)
    s = sparsity if sparsity is not None else max(1, p // 10)
    x_nat = _sparse_signal(rng, p, s)
    b = M @ x_nat + sigma_noise * rng.standard_normal(n)
    return ProblemInstance(
        name="sqrt_lasso", f=WeightedL1(lam), A=LinearMap(M),
        dual=LipschitzDual(L2Ball(1.0), offset=b),
        params=dict(n=n, p=p, sigma_noise=sigma_noise, lam=lam, seed=seed,
                    x_natural=x_nat, b=b),
        defaults=dict(beta0_scale=1.0),
    )


def build_degenerate_lp(p=10, n=200):
    """``min 2 x_p`` s.t. ``sum_{k<p} x_k = 1`` and ``n-1`` copies of ``x_p = sum_{k<p} x_k``.

    Every feasible point has ``x_p = 1`` and objective 2.
    """
    if p < 2 or n < 2:
        raise ValueError("need p >= 2 and n >= 2")
    M = np.empty((n, p))
    M[0, :-1] = 1.0
    M[0, -1] = 0.0
    M[1:, :-1] = -1.0
    M[1:, -1] = 1.0
    b = np.zeros(n)
    b[0] = 1.0
    lo = np.full(p, -np.inf)
    lo[-1] = 0.0
    c = np.zeros(p)
    c[-1] = 2.0
    x_star = np.full(p, 1.0 / (p - 1))
    x_star[-1] = 1.0
    # y_0 and sum_{j>=1} y_j are pinned to -2 by stationarity; spread evenly.
    y_star = np.full(n, -2.0 / (n - 1))
    y_star[0] = -2.0
    ref = Reference(value=2.0, x_star=x_star, y_star=y_star, kind="analytic",
                    note="every feasible point is optimal")
    return ProblemInstance(
        name="degenerate_lp", f=Indicator(Box(lo, np.inf)), A=LinearMap(M),
        dual=ConstraintDual(ZeroSet(), b), h=LinearSmooth(c), reference=ref,
        params=dict(p=p, n=n), defaults=dict(beta0_scale=1.0),
    )


def build_basis_pursuit(A=None, b=None, *, n=20, p=50, seed=11, sparsity=5, x_natural=None):
    """``min ||x||_1`` subject to ``Ax = b``.

    Without `A`, a Gaussian ``n x p`` matrix scaled by ``1/sqrt(n)`` is drawn.
    Without `b`, ``b = A x_natural`` for a `sparsity`-sparse ``x_natural``.
    """
    rng = np.random.default_rng(seed)
    if A is None:
        M = rng.standard_normal((n, p)) / np.sqrt(n)
    else:
        M = A.toarray() if isinstance(A, LinearMap) else A
        n, p = M.shape
    op = A if isinstance(A, LinearMap) else LinearMap(M)
    if b is None:
        if x_natural is None:
            x_natural = _sparse_signal(rng, p, sparsity)
        b = op.apply(np.asarray(x_natural, dtype=float))
    b = np.asarray(b, dtype=float)
    if b.shape != (op.rows,):
        raise ValueError("b must have one entry per row of A")
    ref = None
    if A is not None and op.rows == op.cols and np.array_equal(op.toarray(), np.eye(op.rows)):
        ref = Reference(value=float(np.abs(b).sum()), x_star=b.copy(), y_star=-np.sign(b),
                        kind="analytic", note="identity operator")
    return ProblemInstance(
        name="basis_pursuit", f=WeightedL1(1.0), A=op, dual=ConstraintDual(ZeroSet(), b),
        reference=ref, params=dict(n=op.rows, p=op.cols, seed=seed, x_natural=x_natural),
        defaults=dict(beta0_scale=10.0),
    )


def build_lad_lasso(n=34, p=100, s_sparsity=10, sigma=0.1, seed=0, lam=None):
    """``||Ax - b||_1 + lam ||x||_1`` with Laplace noise; ``lam = 1/n`` by default."""
    if min(n, p, s_sparsity) < 1:
        raise ValueError("dimensions must be positive")
    lam = 1.0 / n if lam is None else lam
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((n, p))
    x_nat = _sparse_signal(rng, p, s_sparsity)
    b = M @ x_nat + sigma * laplace_noise(rng, n)
    return ProblemInstance(
        name="lad_lasso", f=WeightedL1(lam), A=LinearMap(M),
        dual=LipschitzDual(Box(-1.0, 1.0), offset=b),
        params=dict(n=n, p=p, s_sparsity=s_sparsity, sigma=sigma, seed=seed, lam=lam,
                    x_natural=x_nat, b=b),
        defaults=dict(beta0_scale=100.0),
    )


def build_l1_svm(dataset, lam=0.1):
    """``(1/n) sum max(0, 1 - b_i <a_i, x>) + lam ||x||_1``.

    The hinge term is ``max_{y in [0,1]^n} <y, Ax + 1/n>`` with
    ``A = -(1/n) diag(b) X``.
    """
    if not isinstance(dataset, Dataset):
        dataset = Dataset(*dataset)
    n = dataset.shape[0]
    M = -(1.0 / n) * sp.diags(dataset.labels) @ dataset.features
    return ProblemInstance(
        name="l1_svm", f=WeightedL1(lam), A=LinearMap(sp.csr_matrix(M)),
        dual=LipschitzDual(Box(0.0, 1.0), offset=np.full(n, -1.0 / n)),
        params=dict(n=n, p=dataset.shape[1], lam=lam),
        defaults=dict(beta0_scale=0.1),
    )


def build_portfolio(returns, epsilon):
    """``min -<rho, x>`` over the simplex subject to ``||(R - rho) x||_2 <= sqrt(p eps)``.

    `returns` has one row per period and one column per asset; ``rho`` is
    the row mean.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    R = np.asarray(returns, dtype=float)
    rho = R.mean(axis=0)
    M = R - rho
    p = R.shape[1]
    radius = np.sqrt(p * epsilon)
    return ProblemInstance(
        name="portfolio", f=Indicator(Simplex()), A=LinearMap(M),
        dual=ConstraintDual(L2Ball(radius), np.zeros(R.shape[0])), h=LinearSmooth(-rho),
        params=dict(n=R.shape[0], p=p, epsilon=epsilon, rho=rho, radius=radius),
        defaults=dict(beta0_scale=1.0),
    )


BUILDERS = {
    "sqrt_lasso": build_sqrt_lasso,
    "degenerate_lp": build_degenerate_lp,
    "basis_pursuit": build_basis_pursuit,
    "lad_lasso": build_lad_lasso,
    "l1_svm": build_l1_svm,
    "portfolio": build_portfolio,
}


# ---------------------------------------------------------------- oracles

def reference_solution(problem, oracle_kind="lp_exact", budget=10**6, **solver_kw):
    """Return `problem` with a :class:`Reference` attached.

    ``analytic`` keeps a closed-form reference set by the builder,
    ``lp_exact`` solves an LP reformulation with HiGHS (primal and dual),
    ``long_run`` runs the double-loop solver for `budget` iterations.
    """
    if oracle_kind == "analytic":
        if problem.reference is None or problem.reference.kind != "analytic":
            raise OracleNotApplicable(f"no analytic solution known for {problem.name}")
        return problem
    if oracle_kind == "lp_exact":
        return problem.with_reference(_lp_reference(problem))
    if oracle_kind == "long_run":
        from .solvers import SolverConfig, run_asgard_dl  # noqa: PLC0415

        normA = problem.A.norm()
        params = dict(beta0=problem.defaults.get("beta0_scale", 1.0) * normA,
                      omega=1.2, m0=6, iter_budget=budget)
        params.update(solver_kw)
        params.setdefault("mode", problem.mode)
        params.setdefault("trace_every", max(1, budget))
        result = run_asgard_dl(problem, SolverConfig(**params))
        x = result.x
        ref = Reference(value=problem.objective(x), x_star=x, y_star=result.y_center,
                        kind="long_run",
                        note=f"{result.iterations} iterations, final beta {result.beta:.3e}")
        return problem.with_reference(ref)
    raise ValueError(f"unknown oracle kind {oracle_kind!r}")


def _lp_reference(problem):
    from scipy.optimize import linprog  # noqa: PLC0415

    if problem.h is not None and not isinstance(problem.h, LinearSmooth):
        raise OracleNotApplicable("LP oracle needs a linear (or absent) smooth term")
    M = problem.A.tocsr()
    n, p = M.shape
    f = problem.f
    cost_x = np.zeros(p) if problem.h is None else problem.h.c.copy()
    bounds_x = [(None, None)] * p
    blocks = []          # (A_block_over_all_vars, rhs, kind) assembled below
    n_aux = 0
    aux_cost = []
    eq_rows, _eq_rhs = [], []

    if isinstance(f, Zero):
        pass
    elif isinstance(f, WeightedL1):
        lam = np.broadcast_to(f.lam, (p,))
        n_aux = p
        aux_cost.append(lam)
        I = sp.identity(p, format="csr")
        blocks.append(("l1", sp.hstack([I, -I]), np.zeros(p)))
        blocks.append(("l1", sp.hstack([-I, -I]), np.zeros(p)))
    elif isinstance(f, LinearNonneg):
        cost_x += f.c
        bounds_x = [(0, None)] * p
    elif isinstance(f, Indicator):
        s = f.set
        if isinstance(s, Box):
            lo = np.broadcast_to(s.lo, (p,))
            hi = np.broadcast_to(s.hi, (p,))
            bounds_x = [(None if np.isinf(a) else a, None if np.isinf(b_) else b_)
                        for a, b_ in zip(lo, hi)]
        elif isinstance(s, NonnegOrthant):
            bounds_x = [(0, None)] * p
        elif isinstance(s, PointSet):
            pt = np.broadcast_to(s.point, (p,))
            bounds_x = [(v, v) for v in pt]
        elif isinstance(s, Simplex):
            bounds_x = [(0, None)] * p
            eq_rows.append(("simplex", sp.csr_matrix(np.ones((1, p))), np.ones(1)))
        else:
            raise OracleNotApplicable(f"f = {f!r} is not LP-representable")
    else:
        raise OracleNotApplicable(f"f = {f!r} is not LP-representable")

    dual = problem.dual
    n_z = 0
    if isinstance(dual, ConstraintDual):
        if isinstance(dual.set, ZeroSet):
            eq_rows.append(("dual", M, dual.b))
        elif isinstance(dual.set, NonnegOrthant):
            blocks.append(("dual", -M, -dual.b))
        else:
            raise OracleNotApplicable(f"constraint set {dual.set!r} is not polyhedral")
    elif isinstance(dual, LipschitzDual) and isinstance(dual.domain, Box):
        lo = np.broadcast_to(dual.domain.lo, (n,)).astype(float)
        hi = np.broadcast_to(dual.domain.hi, (n,)).astype(float)
        c = np.zeros(n) if dual.offset is None else dual.offset
        n_z = n
        # z_i >= lo_i (Ax - c)_i  and  z_i >= hi_i (Ax - c)_i
        blocks.append(("dual_lo", sp.diags(lo) @ M, lo * c))
        blocks.append(("dual_hi", sp.diags(hi) @ M, hi * c))
    else:
        raise OracleNotApplicable(f"dual descriptor {dual!r} is not LP-representable")

    p + n_aux + n_z
    cost = np.concatenate([cost_x] + aux_cost + [np.ones(n_z)])

    def widen(kind, block):
        block = sp.csr_matrix(block)
        cols = block.shape[1]
        parts = [block]
        if kind == "l1":
            if n_z:
                parts.append(sp.csr_matrix((block.shape[0], n_z)))
            return sp.hstack(parts)
        if cols != p:
            raise AssertionError
        if n_aux:
            parts.append(sp.csr_matrix((block.shape[0], n_aux)))
        if kind in ("dual_lo", "dual_hi"):
            parts.append(-sp.identity(n_z, format="csr"))
        elif n_z:
            parts.append(sp.csr_matrix((block.shape[0], n_z)))
        return sp.hstack(parts)

    ub_blocks = [(k, widen(k, blk), rhs) for k, blk, rhs in blocks]
    eq_blocks = [(k, widen(k, blk), rhs) for k, blk, rhs in eq_rows]
    A_ub = sp.vstack([b_ for _, b_, _ in ub_blocks]).tocsr() if ub_blocks else None
    b_ub = np.concatenate([r for _, _, r in ub_blocks]) if ub_blocks else None
    A_eq = sp.vstack([b_ for _, b_, _ in eq_blocks]).tocsr() if eq_blocks else None
    b_eq = np.concatenate([r for _, _, r in eq_blocks]) if eq_blocks else None
    bounds = bounds_x + [(None, None)] * n_aux + [(None, None)] * n_z

    res = linprog(cost, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds,
                  method="highs-ds",
                  options=dict(primal_feasibility_tolerance=1e-10,
                               dual_feasibility_tolerance=1e-10))
    if res.status != 0:
        raise OracleNotApplicable(f"LP oracle failed: {res.message}")
    x = res.x[:p]

    def segment(kinds, marg, blocks_):
        out, start = {}, 0
        for k, blk, _ in blocks_:
            m = blk.shape[0]
            if k in kinds:
                out[k] = marg[start:start + m]
            start += m
        return out

    if isinstance(dual, ConstraintDual):
        if isinstance(dual.set, ZeroSet):
            y = -segment({"dual"}, res.eqlin.marginals, eq_blocks)["dual"]
        else:
            y = segment({"dual"}, res.ineqlin.marginals, ub_blocks)["dual"]
    else:
        seg = segment({"dual_lo", "dual_hi"}, res.ineqlin.marginals, ub_blocks)
        nu_lo, nu_hi = -seg["dual_lo"], -seg["dual_hi"]
        y = lo * nu_lo + hi * nu_hi
        y = np.clip(y, lo, hi)
    return Reference(value=problem.objective(x), x_star=x, y_star=np.asarray(y, dtype=float),
                     kind="lp_exact", note=f"HiGHS objective {res.fun:.17g}")


def kkt_residuals(problem, x, y):
    """Distances from ``-A^T y - grad h(x)`` to ``∂f(x)`` and from ``y`` to ``∂g(Ax)``.

    Implemented for l1, box/nonneg indicators, zero ``f`` and for both dual
    descriptors with polyhedral sets; used to validate oracle output.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    v = -problem.A.adjoint_apply(y)
    if problem.h is not None:
        v = v - problem.h.grad(x)
    f = problem.f
    tol = 1e-9
    if isinstance(f, WeightedL1):
        lam = np.broadcast_to(f.lam, x.shape)
        on = np.abs(x) > tol
        r = np.where(on, np.abs(v - lam * np.sign(x)), np.maximum(np.abs(v) - lam, 0.0))
    elif isinstance(f, Zero):
        r = np.abs(v)
    elif isinstance(f, Indicator) and isinstance(f.set, (Box, NonnegOrthant)):
        if isinstance(f.set, Box):
            lo, hi = np.broadcast_to(f.set.lo, x.shape), np.broadcast_to(f.set.hi, x.shape)
        else:
            lo, hi = np.zeros_like(x), np.full_like(x, np.inf)
        at_lo = x <= lo + tol
        at_hi = x >= hi - tol
        r = np.where(at_lo & at_hi, 0.0,
                     np.where(at_lo, np.maximum(v, 0.0),
                              np.where(at_hi, np.maximum(-v, 0.0), np.abs(v))))
    else:
        raise OracleNotApplicable(f"no subdifferential test for {f!r}")
    primal = float(np.max(r)) if r.size else 0.0
    Ax = problem.A.apply(x)
    dual = problem.dual
    if isinstance(dual, ConstraintDual):
        w = Ax - dual.b
        if isinstance(dual.set, ZeroSet):
            dres = 0.0
        elif isinstance(dual.set, NonnegOrthant):
            dres = float(np.max(np.maximum(y, 0.0) + np.abs(np.minimum(w, 0.0) * 0)
                                + np.where(w > tol, np.abs(y), 0.0)))
        else:
            raise OracleNotApplicable("dual test needs a polyhedral cone")
    else:
        w = dual._shift(Ax)
        lo = np.broadcast_to(dual.domain.lo, w.shape)
        hi = np.broadcast_to(dual.domain.hi, w.shape)
        out = np.maximum(lo - y, 0.0) + np.maximum(y - hi, 0.0)
        mis = np.where(w > tol, np.abs(y - hi), np.where(w < -tol, np.abs(y - lo), 0.0))
        dres = float(np.max(out + mis))
    return primal, dres
