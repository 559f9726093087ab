"""Configuration, state, traces and shared helpers for all solvers."""

import time
from dataclasses import dataclass, field

import numpy as np

from ..proxcore import ENTROPY, Simplex

__all__ = [
    "INNER_VARIANTS", "MODES", "SolverConfig", "ChambollePockConfig", "SolverState",
    "TraceRecord", "Trace", "Boundary", "SolverResult", "initial_center",
]

INNER_VARIANTS = ("apg_averaging", "apg_proximal", "fista")
MODES = ("bounded_dual", "constrained")


@dataclass(frozen=True)
class SolverConfig:
    """Parameters shared by the smoothing solvers.

    ``mode=None`` takes the mode of the problem being solved. ``max_outer``
    caps the number of outer rounds of the double-loop method (``None`` for
    no cap); ``iter_budget`` caps the total number of inner iterations.
    ``L_b`` is the gradient-Lipschitz constant of the dual distance's
    prox-function (1 for the Euclidean distance). Metrics are recorded
    every ``trace_every`` iterations and at the final one.
    """

    beta0: float
    omega: float = 1.2
    m0: int = 6
    inner_variant: str = "apg_averaging"
    mode: str = None
    max_outer: int = None
    iter_budget: int = 1000
    seed: int = 0
    L_b: float = 1.0
    trace_every: int = 1

    def __post_init__(self):
        if not (np.isfinite(self.beta0) and self.beta0 > 0):
            raise ValueError("beta0 must be a positive number")
        if not self.omega > 1:
            raise ValueError("omega must exceed 1")
        if int(self.m0) != self.m0 or self.m0 < 1:
            raise ValueError("m0 must be a positive integer")
        object.__setattr__(self, "m0", int(self.m0))
        if self.inner_variant not in INNER_VARIANTS:
            raise ValueError(f"inner_variant must be one of {INNER_VARIANTS}")
        if self.mode is not None and self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.iter_budget < 0:
            raise ValueError("iter_budget must be nonnegative")
        if self.max_outer is not None and self.max_outer < 0:
            raise ValueError("max_outer must be nonnegative")
        if not self.L_b > 0:
            raise ValueError("L_b must be positive")
        if int(self.trace_every) != self.trace_every or self.trace_every < 1:
            raise ValueError("trace_every must be a positive integer")
        if self.mode == "constrained":
            self.check_constrained()

    def check_constrained(self):
        if not self.m0 > 1.0 / (self.omega - 1.0):
            raise ValueError(
                f"constrained mode needs m0 > 1/(omega-1) = {1.0 / (self.omega - 1.0):.6g}, "
                f"got m0={self.m0}")

    def resolve_mode(self, problem):
        mode = self.mode or problem.mode
        if mode != problem.mode:
            raise ValueError(f"config mode {mode!r} does not match problem mode {problem.mode!r}")
        if mode == "constrained":
            self.check_constrained()
        return mode


@dataclass(frozen=True)
class ChambollePockConfig:
    """Step sizes (``None`` means ``1/||A||``) and iteration budget."""

    sigma: float = None
    tau_step: float = None
    iter_budget: int = 1000
    seed: int = 0

    def __post_init__(self):
        for name in ("sigma", "tau_step"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ValueError(f"{name} must be positive")
        if self.iter_budget < 0:
            raise ValueError("iter_budget must be nonnegative")


@dataclass
class SolverState:
    """Mutable iterate bundle owned by a single run."""

    xbar: np.ndarray
    xhat: np.ndarray
    xtilde: np.ndarray
    ytilde: np.ndarray
    ycenter: np.ndarray
    beta_s: float
    m_s: int = 0
    tau_k: float = 1.0
    s: int = 0
    k: int = 0
    K_s: int = 0


@dataclass(frozen=True)
class TraceRecord:
    """Metrics of ``xbar^k``.

    ``objective_residual`` is ``P(x) - P*`` (bounded dual) or ``|f(x) - f*|``
    (constrained) when a reference exists, and the raw objective otherwise.
    """

    k: int
    objective_residual: float
    feasibility: float
    beta: float
    wall_ns: int
    objective: float = float("nan")


class Trace:
    """Ordered list of :class:`TraceRecord` with array views."""

    def __init__(self, problem, label=""):
        self.label = label
        self.reference = problem.reference
        self.mode = problem.mode
        self._problem = problem
        self.records = []
        self._t0 = time.perf_counter_ns()

    @property
    def has_reference(self):
        return self.reference is not None

    def residual(self, value):
        if self.reference is None:
            return value
        if self.mode == "constrained":
            return abs(value - self.reference.value)
        return value - self.reference.value

    def record(self, k, x, beta, Ax=None):
        p = self._problem
        Ax = p.A.apply(x) if Ax is None else Ax
        value = p.objective(x, Ax)
        rec = TraceRecord(k=k, objective_residual=self.residual(value),
                          feasibility=p.feasibility(x, Ax), beta=float(beta),
                          wall_ns=time.perf_counter_ns() - self._t0, objective=value)
        if self.records and rec.k <= self.records[-1].k:
            raise AssertionError("trace indices must increase")
        self.records.append(rec)
        return rec

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]

    def column(self, name):
        return np.array([getattr(r, name) for r in self.records])

    def at(self, k):
        """Record with index `k`."""
        for r in self.records:
            if r.k == k:
                return r
        raise KeyError(k)

    def deterministic_rows(self):
        """Rows without the wall-clock column, for reproducibility checks."""
        return [(r.k, r.objective_residual, r.feasibility, r.beta) for r in self.records]


@dataclass(frozen=True)
class Boundary:
    """Snapshot at the end of outer round ``s`` (iteration ``K = K_{s+1}``)."""

    s: int
    K: int
    beta: float
    m: int
    xbar: np.ndarray
    ycenter: np.ndarray
    objective: float
    f_value: float
    feasibility: float


@dataclass
class SolverResult:
    x: np.ndarray
    trace: Trace
    state: SolverState = None
    boundaries: list = field(default_factory=list)
    trace_average: Trace = None
    x_average: np.ndarray = None
    algorithm: str = ""

    @property
    def iterations(self):
        return 0 if self.state is None else self.state.k

    @property
    def beta(self):
        return None if self.state is None else self.state.beta_s

    @property
    def y_center(self):
        return None if self.state is None else self.state.ycenter


def initial_center(problem):
    """``argmin b(., .)`` over the dual domain: 0, or the uniform point for entropy."""
    n = problem.A.rows
    dual = problem.dual
    if dual.bregman == ENTROPY and isinstance(getattr(dual, "domain", None), Simplex):
        return np.full(n, 1.0 / n)
    return np.zeros(n)


def f_plus_h(problem, x):
    val = problem.f(x)
    if problem.h is not None:
        val += problem.h(x)
    return val
