"""Command-line entry point.

Exit codes: 0 when every check passes, 1 when any check fails, 2 for
configuration, parse or usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import MetallicError
from .report import _jsonable
from .sampling import Tolerances
from .scenario import angle_report, builtin_example1, builtin_example2, load_scenario, run_suite

SEED_ENV = "METALLIC_SLANT_SEED"
EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _seed(args):
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is None:
        return None
    try:
        return int(env)
    except ValueError:
        raise MetallicError(f"{SEED_ENV} must be an integer, got {env!r}") from None


def _apply_overrides(s, args):
    kw = {}
    seed = _seed(args)
    if seed is not None:
        kw["seed"] = seed
    if getattr(args, "tol", None) is not None:
        t = args.tol
        kw["tol"] = Tolerances(algebraic=t, fd=max(t, s.plan.tol.fd), angle=max(t, s.plan.tol.angle))
    return s.with_plan(**kw) if kw else s


def _emit_report(rep, args):
    text = rep.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    if args.json:
        print(text)
    else:
        print(f"scenario: {rep.scenario} (seed {rep.seed}, version {rep.version})")
        for line in rep.summary_lines():
            print(line)
    return EXIT_PASS if rep.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help=f"sampling seed (default: ${SEED_ENV} or the scenario's)")
    common.add_argument("--json", action="store_true", help="print the JSON report on stdout")
    common.add_argument("--out", default=None, help="also write the JSON report to this file")

    ap = _Parser(prog="metallic-slant", description="Verify metallic-structure identities on parametrized submanifolds.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    v = sub.add_parser("verify", parents=[common], help="run a scenario file")
    v.add_argument("--scenario", required=True)
    v.add_argument("--tol", type=float, default=None, help="algebraic tolerance (finite-difference tolerances never tighten below their defaults)")
    e = sub.add_parser("example", parents=[common], help="run a built-in example")
    e.add_argument("--which", type=int, choices=(1, 2), required=True)
    e.add_argument("--p", type=int, default=1)
    e.add_argument("--q", type=int, default=1)
    e.add_argument("--n", type=int, default=1, help="dimension parameter of example 2")
    e.add_argument("--tol", type=float, default=None)
    a = sub.add_parser("angle", parents=[common], help="slant angle of one distribution")
    a.add_argument("--scenario", required=True)
    a.add_argument("--distribution", required=True, help="a declared distribution name, or TM")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "example":
            s = builtin_example1(args.p, args.q) if args.which == 1 else builtin_example2(args.n, args.p, args.q)
        else:
            s = load_scenario(args.scenario)
        s = _apply_overrides(s, args)
        if args.command == "angle":
            info = _jsonable(angle_report(s, args.distribution))
            text = json.dumps(info, indent=2)
            if args.out:
                with open(args.out, "w", encoding="utf-8") as fh:
                    fh.write(text + "\n")
            if args.json:
                print(text)
            else:
                for k, val in info.items():
                    print(f"{k}: {val}")
            return EXIT_PASS
        return _emit_report(run_suite(s), args)
    except (MetallicError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
