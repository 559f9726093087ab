"""``bench`` command line: run, certify, list-problems, list-solvers."""

import argparse
import json
import sys

from ..problems import BUILDERS
from .config import OUT_ENV, PROBLEM_KEYS, ConfigError, load_config
from .runner import SOLVERS, certify, run_benchmark

__all__ = ["main", "EXIT_OK", "EXIT_SOLVER_FAILURE", "EXIT_CONFIG_ERROR"]

EXIT_OK = 0
EXIT_SOLVER_FAILURE = 1
EXIT_CONFIG_ERROR = 2


def _parser():
    p = argparse.ArgumentParser(prog="bench", description="Run and certify solver benchmarks.")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run the solvers of a config and write CSV traces")
    r.add_argument("--config", required=True)
    r.add_argument("--out", default=None,
                   help=f"output directory (default: ${OUT_ENV}, then [run] out)")
    c = sub.add_parser("certify", help="check the convergence certificates of a config")
    c.add_argument("--config", required=True)
    sub.add_parser("list-problems", help="list problem builders and their keys")
    sub.add_parser("list-solvers", help="list solver algorithms")
    return p


def _summary(entry):
    if entry["status"] != "ok":
        return entry.get("error", "")
    final = entry.get("final")
    if final is None:
        return "empty trace"
    name = "objective_residual" if "objective_residual" in final else "objective_value"
    return f"k={final['k']} {name}={final[name]:.3e} feasibility={final['feasibility']:.3e}"


def main(argv=None):
    args = _parser().parse_args(argv)
    if args.command == "list-problems":
        for name in sorted(BUILDERS):
            print(f"{name}: {', '.join(sorted(PROBLEM_KEYS[name]))}")
        return EXIT_OK
    if args.command == "list-solvers":
        for name, text in SOLVERS.items():
            print(f"{name}: {text}")
        return EXIT_OK
    try:
        config = load_config(args.config)
        if args.command == "run":
            report = run_benchmark(config, args.out)
            for label, entry in report.solvers.items():
                print(f"{label}: {entry['status']} ({_summary(entry)})")
            print(f"report: {report.out_dir}/report.json")
            return EXIT_OK if report.ok else EXIT_SOLVER_FAILURE
        result = certify(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    print(json.dumps(result, indent=2))
    return EXIT_SOLVER_FAILURE if result["status"] == "fail" else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
