"""Smoothing-based primal-dual solvers, parameter schedules and certificates."""

from .bounds import (
    Lemma1Report, lemma1_check, theorem1_bound, theorem1_R0_sq, theorem2_bounds, theorem2_R0,
)
from .chambolle_pock import run_chambolle_pock
from .core import (
    INNER_VARIANTS, MODES, Boundary, ChambollePockConfig, SolverConfig, SolverResult,
    SolverState, Trace, TraceRecord, initial_center,
)
from .schedules import (
    kappa0, next_inner_length, rho0, schedule_constrained, schedule_sequence,
    schedule_unconstrained, solve_tau_cubic, tau_cubic,
)
from .smoothing_solvers import (
    run_asgard, run_asgard_dl, run_asgard_dl_three_term, run_asgard_restart_heuristic,
)

__all__ = [
    "Lemma1Report", "lemma1_check", "theorem1_bound", "theorem1_R0_sq", "theorem2_bounds",
    "theorem2_R0", "run_chambolle_pock", "INNER_VARIANTS", "MODES", "Boundary",
    "ChambollePockConfig", "SolverConfig", "SolverResult", "SolverState", "Trace",
    "TraceRecord", "initial_center", "kappa0", "next_inner_length", "rho0",
    "schedule_constrained", "schedule_sequence", "schedule_unconstrained", "solve_tau_cubic",
    "tau_cubic", "run_asgard", "run_asgard_dl", "run_asgard_dl_three_term",
    "run_asgard_restart_heuristic",
]
