"""Benchmark execution: solver runs, CSV traces, JSON report, certification."""

import csv
import json
import os
import time
from dataclasses import dataclass, field

from .. import problems as pb
from ..solvers import (
    ChambollePockConfig, SolverConfig, run_asgard, run_asgard_dl, run_asgard_dl_three_term,
    run_asgard_restart_heuristic, run_chambolle_pock,
)
from .certificates import certify_result
from .config import ConfigError, build_problem, solver_beta0

__all__ = ["SOLVERS", "RunReport", "attach_oracle", "run_solver", "write_trace_csv",
           "run_benchmark", "certify"]

SOLVERS = {
    "asgard": "single-loop smoothing with the cubic momentum rule",
    "asgard_restart": "single-loop smoothing restarted every restart_every steps",
    "asgard_dl": "self-adaptive double loop (bounded-dual or constrained schedule)",
    "asgard_dl_three_term": "double loop with a smooth term h",
    "chambolle_pock": "primal-dual hybrid gradient with uniform averaging",
}
DOUBLE_LOOP = ("asgard_dl", "asgard_dl_three_term")


@dataclass
class RunReport:
    problem: str
    out_dir: str
    reference: dict = None
    solvers: dict = field(default_factory=dict)

    @property
    def ok(self):
        return all(s["status"] == "ok" for s in self.solvers.values())

    def as_dict(self):
        return {"problem": self.problem, "out_dir": self.out_dir, "reference": self.reference,
                "solvers": self.solvers}


def attach_oracle(problem, kind, budget):
    """Attach a reference per the ``[run] oracle`` key; ``auto`` keeps an analytic one."""
    if kind in ("auto", "none"):
        return problem if kind == "auto" else problem.with_reference(None)
    return pb.reference_solution(problem, kind, budget=budget)


def _smoothing_config(spec, problem, budget, seed):
    p = spec.params
    kw = dict(beta0=solver_beta0(spec, problem), iter_budget=budget, seed=seed)
    for key in ("omega", "m0", "inner_variant", "max_outer", "L_b"):
        if key in p:
            kw[key] = p[key]
    try:
        return SolverConfig(**kw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[solver.{spec.label}] {exc}") from None


def run_solver(spec, problem, budget, seed=0, wall_seconds=None):
    """Run one configured solver; returns ``(SolverResult, SolverConfig or CP config)``."""
    callback = None
    if wall_seconds is not None:
        deadline = time.perf_counter() + wall_seconds

        def callback(state, record):
            return time.perf_counter() >= deadline

    if spec.algorithm == "chambolle_pock":
        try:
            cfg = ChambollePockConfig(sigma=spec.params.get("sigma"),
                                      tau_step=spec.params.get("tau_step"),
                                      iter_budget=budget, seed=seed)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"[solver.{spec.label}] {exc}") from None
        return run_chambolle_pock(problem, cfg, callback), cfg
    cfg = _smoothing_config(spec, problem, budget, seed)
    if spec.algorithm == "asgard":
        return run_asgard(problem, cfg, callback), cfg
    if spec.algorithm == "asgard_restart":
        every = spec.params.get("restart_every", 10)
        return run_asgard_restart_heuristic(problem, cfg, every, callback), cfg
    if spec.algorithm == "asgard_dl":
        return run_asgard_dl(problem, cfg, callback), cfg
    if spec.algorithm == "asgard_dl_three_term":
        return run_asgard_dl_three_term(problem, cfg, callback), cfg
    raise ConfigError(f"unknown algorithm {spec.algorithm!r}")


def write_trace_csv(trace, path):
    """Header ``k,objective_residual,feasibility,beta,wall_ns``; the residual column is
    named ``objective_value`` when the trace has no reference."""
    second = "objective_residual" if trace.has_reference else "objective_value"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", second, "feasibility", "beta", "wall_ns"])
        for r in trace.records:
            w.writerow([r.k, repr(r.objective_residual), repr(r.feasibility), repr(r.beta),
                        r.wall_ns])


def _final(trace):
    if not trace.records:
        return None
    r = trace.records[-1]
    second = "objective_residual" if trace.has_reference else "objective_value"
    return {"k": r.k, second: r.objective_residual,
            "feasibility": r.feasibility, "beta": r.beta, "wall_ns": r.wall_ns}


def _reference_summary(problem):
    ref = problem.reference
    if ref is None:
        return None
    return {"kind": ref.kind, "value": ref.value, "note": ref.note,
            "has_dual": ref.y_star is not None}


def run_benchmark(config, out_dir=None):
    """Run every configured solver, write one CSV per trace plus ``report.json``.

    A failing solver is recorded with its error and does not stop the others.
    """
    out = os.fspath(config.output_dir(None if out_dir is None else os.fspath(out_dir)))
    os.makedirs(out, exist_ok=True)
    problem = build_problem(config)
    problem.A.norm()
    problem = attach_oracle(problem, config.oracle, config.oracle_budget)
    report = RunReport(problem=config.problem, out_dir=out,
                       reference=_reference_summary(problem))
    for spec in config.solvers:
        entry = {"algorithm": spec.algorithm}
        try:
            result, cfg = run_solver(spec, problem, config.budget, config.seed,
                                     config.wall_seconds)
        except ConfigError:
            raise
        except Exception as exc:  # noqa: BLE001  (per-solver isolation)
            entry.update(status="failed", error=f"{type(exc).__name__}: {exc}")
            report.solvers[spec.label] = entry
            continue
        path = os.path.join(out, f"{spec.label}.csv")
        write_trace_csv(result.trace, path)
        entry.update(status="ok", trace=path, final=_final(result.trace),
                     iterations=result.iterations)
        if result.trace_average is not None:
            apath = os.path.join(out, f"{spec.label}_average.csv")
            write_trace_csv(result.trace_average, apath)
            entry.update(trace_average=apath, final_average=_final(result.trace_average))
        ref = problem.reference
        if (spec.algorithm in DOUBLE_LOOP and ref is not None and ref.x_star is not None
                and ref.y_star is not None):
            try:
                checks = certify_result(problem, cfg, result)
                entry["certificates"] = {c.name: c.passed for c in checks}
            except ValueError as exc:
                entry["certificates"] = {"skipped": str(exc)}
        report.solvers[spec.label] = entry
    with open(os.path.join(out, "report.json"), "w", encoding="utf-8") as fh:
        json.dump(report.as_dict(), fh, indent=2)
        fh.write("\n")
    return report


def certify(config):
    """Certificates for every double-loop solver in `config`.

    Returns a dict with ``status`` in ``{"pass", "fail", "skipped: ..."}``
    and per-solver check lists.
    """
    problem = build_problem(config)
    problem.A.norm()
    kind = config.oracle
    if kind == "auto":
        if problem.reference is None or problem.reference.y_star is None:
            try:
                problem = pb.reference_solution(problem, "lp_exact")
            except pb.OracleNotApplicable:
                return {"status": "skipped: no reference", "solvers": {}}
    elif kind == "none":
        return {"status": "skipped: no reference", "solvers": {}}
    else:
        problem = pb.reference_solution(problem, kind, budget=config.oracle_budget)
    specs = [s for s in config.solvers if s.algorithm in DOUBLE_LOOP]
    if not specs:
        return {"status": "skipped: no double-loop solver configured", "solvers": {}}
    out = {"status": "pass", "reference": _reference_summary(problem), "solvers": {}}
    for spec in specs:
        result, cfg = run_solver(spec, problem, config.budget, config.seed)
        checks = certify_result(problem, cfg, result)
        out["solvers"][spec.label] = [c.as_dict() for c in checks]
        if not all(c.passed for c in checks):
            out["status"] = "fail"
    return out
