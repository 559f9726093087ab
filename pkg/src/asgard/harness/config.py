"""Run configuration files (INI sections of ``key = value`` lines).

Layout::

    [run]
    budget = 50000          ; inner iterations per solver
    wall_seconds = 30       ; optional wall-clock cap per solver
    seed = 0
    out = results           ; overridden by $ASGARD_BENCH_OUT and by --out
    oracle = analytic       ; analytic | lp_exact | long_run | none | auto
    oracle_budget = 1000000

    [problem]
    name = degenerate_lp
    p = 10
    n = 200

    [solver.dl]
    algorithm = asgard_dl   ; defaults to the section suffix
    beta0_scale = 1.0       ; beta0 = beta0_scale * ||A||  (or give beta0)
    omega = 1.2
    m0 = 6
"""

import configparser
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .. import problems as pb

__all__ = [
    "ConfigError", "SolverSpec", "RunConfig", "load_config", "parse_config_text",
    "build_problem", "SOLVER_KEYS", "PROBLEM_KEYS", "OUT_ENV", "ORACLES",
]

OUT_ENV = "ASGARD_BENCH_OUT"
ORACLES = ("auto", "none", "analytic", "lp_exact", "long_run")

SOLVER_KEYS = {
    "asgard": {"beta0", "beta0_scale", "L_b"},
    "asgard_restart": {"beta0", "beta0_scale", "L_b", "restart_every"},
    "asgard_dl": {"beta0", "beta0_scale", "omega", "m0", "inner_variant", "max_outer"},
    "asgard_dl_three_term": {"beta0", "beta0_scale", "omega", "m0", "inner_variant",
                             "max_outer"},
    "chambolle_pock": {"sigma", "tau_step"},
}

PROBLEM_KEYS = {
    "sqrt_lasso": {"n", "p", "sigma_noise", "lam", "seed", "sparsity"},
    "degenerate_lp": {"p", "n"},
    "basis_pursuit": {"n", "p", "seed", "sparsity"},
    "lad_lasso": {"n", "p", "s_sparsity", "sigma", "seed", "lam"},
    "l1_svm": {"dataset", "n", "p", "seed", "density", "lam"},
    "portfolio": {"returns", "n", "p", "seed", "epsilon"},
}

RUN_KEYS = {"budget", "wall_seconds", "seed", "out", "oracle", "oracle_budget"}


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


@dataclass(frozen=True)
class SolverSpec:
    label: str
    algorithm: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class RunConfig:
    problem: str
    problem_params: dict
    solvers: tuple
    budget: int = 1000
    wall_seconds: float = None
    seed: int = 0
    out: str = None
    oracle: str = "auto"
    oracle_budget: int = 10**6
    base_dir: str = "."

    def __post_init__(self):
        if not self.solvers:
            raise ConfigError("at least one [solver.<name>] section is required")
        if self.problem not in pb.BUILDERS:
            raise ConfigError(f"unknown problem {self.problem!r}; "
                              f"choose from {sorted(pb.BUILDERS)}")
        if self.budget < 0:
            raise ConfigError("budget must be nonnegative")
        if self.wall_seconds is not None and not self.wall_seconds > 0:
            raise ConfigError("wall_seconds must be positive")
        if self.oracle not in ORACLES:
            raise ConfigError(f"oracle must be one of {ORACLES}")
        labels = [s.label for s in self.solvers]
        if len(set(labels)) != len(labels):
            raise ConfigError("solver labels must be unique")

    def output_dir(self, override=None):
        """``override`` (from the command line), else ``$ASGARD_BENCH_OUT``, else ``[run] out``."""
        out = override or os.environ.get(OUT_ENV) or self.out or "bench_out"
        return out


def _coerce(text):
    low = text.strip().lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    if low in ("none", ""):
        return None
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text.strip()


def _number(section, key, value, kind, positive=False):
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            if isinstance(value, float) and value.is_integer():
                value = int(value)
            else:
                raise ConfigError(f"[{section}] {key} must be an integer, got {value!r}")
    elif isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"[{section}] {key} must be a number, got {value!r}")
    if positive and not value > 0:
        raise ConfigError(f"[{section}] {key} must be positive")
    return kind(value)


def _oracle(value):
    # ``oracle = none`` is read as the null value by the generic coercion
    return "none" if value is None else str(value)


def parse_config_text(text, base_dir="."):
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";",))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from None
    run = {k: _coerce(v) for k, v in cp["run"].items()} if cp.has_section("run") else {}
    unknown = set(run) - RUN_KEYS
    if unknown:
        raise ConfigError(f"[run] unknown keys {sorted(unknown)}")
    if not cp.has_section("problem"):
        raise ConfigError("missing [problem] section")
    prob = {k: _coerce(v) for k, v in cp["problem"].items()}
    name = prob.pop("name", None)
    if name not in PROBLEM_KEYS:
        raise ConfigError(f"unknown problem {name!r}; choose from {sorted(PROBLEM_KEYS)}")
    bad = set(prob) - PROBLEM_KEYS[name]
    if bad:
        raise ConfigError(f"[problem] unknown keys for {name}: {sorted(bad)}")
    solvers = []
    for sec in cp.sections():
        if not sec.startswith("solver."):
            if sec not in ("run", "problem"):
                raise ConfigError(f"unknown section [{sec}]")
            continue
        label = sec[len("solver."):]
        params = {k: _coerce(v) for k, v in cp[sec].items()}
        algo = params.pop("algorithm", label)
        if algo not in SOLVER_KEYS:
            raise ConfigError(f"[{sec}] unknown algorithm {algo!r}; "
                              f"choose from {sorted(SOLVER_KEYS)}")
        bad = set(params) - SOLVER_KEYS[algo]
        if bad:
            raise ConfigError(f"[{sec}] unknown keys for {algo}: {sorted(bad)}")
        solvers.append(SolverSpec(label, algo, params))
    budget = _number("run", "budget", run.get("budget", 1000), int)
    wall = run.get("wall_seconds")
    if wall is not None:
        wall = _number("run", "wall_seconds", wall, float, positive=True)
    oracle_budget = _number("run", "oracle_budget", run.get("oracle_budget", 10**6), int,
                            positive=True)
    seed = _number("run", "seed", run.get("seed", 0), int)
    return RunConfig(problem=name, problem_params=prob, solvers=tuple(solvers),
                     budget=budget, wall_seconds=wall, seed=seed,
                     out=None if run.get("out") is None else str(run.get("out")),
                     oracle=_oracle(run.get("oracle", "auto")), oracle_budget=oracle_budget,
                     base_dir=base_dir)


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config_text(text, base_dir=os.path.dirname(os.path.abspath(path)))


def _resolve(base, path):
    return path if os.path.isabs(path) else os.path.join(base, path)


def build_problem(config):
    """Instantiate the configured problem (without a reference solution)."""
    from .libsvm import parse_libsvm  # noqa: PLC0415

    name, params = config.problem, dict(config.problem_params)
    try:
        if name == "l1_svm":
            path = params.pop("dataset", None)
            lam = params.pop("lam", 0.1)
            if path is not None:
                if params:
                    raise ConfigError("l1_svm with a dataset file takes only 'lam'")
                data = parse_libsvm(_resolve(config.base_dir, str(path)))
            else:
                data = pb.make_classification(params.get("n", 50), params.get("p", 20),
                                              seed=params.get("seed", config.seed),
                                              density=params.get("density", 1.0))
            return pb.build_l1_svm(data, lam=lam)
        if name == "portfolio":
            path = params.pop("returns", None)
            eps = params.pop("epsilon", None)
            if eps is None:
                raise ConfigError("portfolio needs 'epsilon'")
            if path is not None:
                R = np.loadtxt(_resolve(config.base_dir, str(path)), delimiter=",", ndmin=2)
            else:
                R = pb.make_returns(params.get("n", 60), params.get("p", 10),
                                    seed=params.get("seed", config.seed))
            return pb.build_portfolio(R, eps)
        return pb.BUILDERS[name](**params)
    except ConfigError:
        raise
    except (TypeError, ValueError, OSError) as exc:
        raise ConfigError(f"cannot build problem {name!r}: {exc}") from None


def solver_beta0(spec, problem):
    p = spec.params
    if "beta0" in p and "beta0_scale" in p:
        raise ConfigError(f"[solver.{spec.label}] give beta0 or beta0_scale, not both")
    if "beta0" in p:
        return float(p["beta0"])
    scale = p.get("beta0_scale", problem.defaults.get("beta0_scale", 1.0))
    beta0 = float(scale) * problem.A.norm()
    if not (math.isfinite(beta0) and beta0 > 0):
        raise ConfigError(f"[solver.{spec.label}] beta0 = {beta0} is not positive")
    return beta0
