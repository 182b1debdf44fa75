"""Command-line interface.

Subcommands:
  run            solve one configured experiment, write JSON + CSV logs
  sweep          run a parameter grid, write per-point logs and a summary
  validate       finite-difference checks of the configured problem data
  check          property-test a stock manifold instance
  list-problems  show available problem kinds

Exit codes for ``run``: 0 converged, 2 stopped at the iteration cap,
1 any error (including malformed configs, before any file is written).
"""

from __future__ import annotations

import argparse
import json
import sys

from .diagnostics import MANIFOLD_NAMES, default_suite
from .errors import RiemoptError
from .problems import (
    PROBLEM_KINDS,
    parse_spec,
    run_experiment,
    sweep,
    validate_problem,
)


def _load_config(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _cmd_run(args) -> int:
    config = _load_config(args.config)
    if args.seed is not None:
        config["seed"] = args.seed
    if args.validate:
        return _run_validation(config)
    # Validate fully before touching the output directory.
    parse_spec(config)
    log = run_experiment(config, out_dir=args.out, name=args.name)
    print(
        f"{log.spec['problem']}: {'converged' if log.converged else 'iteration cap'}"
        f" after {len(log.records)} iterations,"
        f" cost={log.final_cost:.6e}, gradnorm={log.final_grad_norm:.3e}"
    )
    return 0 if log.converged else 2


def _run_validation(config) -> int:
    spec = parse_spec(config)
    rows = validate_problem(spec)
    ok = True
    for row in rows:
        flag = "pass" if row["passed"] else "FAIL"
        ok = ok and row["passed"]
        print(
            f"{row['check']:<18} residual={row['residual']:.3e}"
            f" tol={row['tolerance']:.1e} {flag}"
        )
    return 0 if ok else 1


def _cmd_sweep(args) -> int:
    config = _load_config(args.config)
    if args.seed is not None:
        config["seed"] = args.seed
    logs, rows = sweep(config, out_dir=args.out)
    for row in rows:
        if row["error"]:
            print(f"param={row['param']:g}: ERROR {row['error']}")
        else:
            print(
                f"param={row['param']:g}: {row['total_iterations']} iterations,"
                f" gradnorm={row['final_gradnorm']:.3e}"
            )
    return 0


def _cmd_validate(args) -> int:
    config = _load_config(args.config)
    if args.seed is not None:
        config["seed"] = args.seed
    return _run_validation(config)


def _cmd_check(args) -> int:
    reports = default_suite(args.manifold, trials=args.trials, seed=args.seed)
    failed = False
    for report in reports:
        print(report.row())
        failed = failed or not report.passed
    return 1 if failed else 0


def _cmd_list(_args) -> int:
    for kind in PROBLEM_KINDS:
        print(kind)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="riemopt",
        description="Riemannian optimization benchmarks and property checks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="solve one configured experiment")
    run.add_argument("--config", required=True, help="JSON experiment config")
    run.add_argument("--out", default=None, help="directory for JSON/CSV logs")
    run.add_argument("--seed", type=int, default=None, help="override config seed")
    run.add_argument("--name", default="run", help="basename for output files")
    run.add_argument(
        "--validate",
        action="store_true",
        help="run finite-difference checks and exit without solving",
    )
    run.set_defaults(func=_cmd_run)

    sw = sub.add_parser("sweep", help="run a parameter grid")
    sw.add_argument("--config", required=True)
    sw.add_argument("--out", default=None)
    sw.add_argument("--seed", type=int, default=None)
    sw.set_defaults(func=_cmd_sweep)

    val = sub.add_parser("validate", help="finite-difference problem checks")
    val.add_argument("--config", required=True)
    val.add_argument("--seed", type=int, default=None)
    val.set_defaults(func=_cmd_validate)

    chk = sub.add_parser("check", help="property-test a manifold")
    chk.add_argument("--manifold", required=True, choices=MANIFOLD_NAMES)
    chk.add_argument("--trials", type=int, default=50)
    chk.add_argument("--seed", type=int, default=0)
    chk.set_defaults(func=_cmd_check)

    lst = sub.add_parser("list-problems", help="show problem kinds")
    lst.set_defaults(func=_cmd_list)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (RiemoptError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
