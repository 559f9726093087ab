"""Benchmark harness: configs, libsvm data, CSV traces and certificates."""

from .certificates import SLACK_TOL, CertificateCheck, certify_result
from .config import (
    OUT_ENV, ConfigError, RunConfig, SolverSpec, build_problem, load_config, parse_config_text,
)
from .libsvm import LibsvmParseError, parse_libsvm, parse_libsvm_lines, write_libsvm
from .runner import SOLVERS, RunReport, certify, run_benchmark, run_solver, write_trace_csv

__all__ = [
    "SLACK_TOL", "CertificateCheck", "certify_result", "OUT_ENV", "ConfigError", "RunConfig",
    "SolverSpec", "build_problem", "load_config", "parse_config_text", "LibsvmParseError",
    "parse_libsvm", "parse_libsvm_lines", "write_libsvm", "SOLVERS", "RunReport", "certify",
    "run_benchmark", "run_solver", "write_trace_csv",
]
