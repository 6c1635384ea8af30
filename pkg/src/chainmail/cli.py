"""Command line entry point.

Three subcommands:

* ``check``  -- run a driver against linked internal/external modules and
  judge a spec along the recorded trace.  Exit code says what was found:
  0 no violation found on this run, 1 violated, 2 withheld, 3 usage or
  parse errors.
* ``run``    -- execute only, optionally dumping the visible trace.
* ``props``  -- run the randomized law suites and print per-law counts.

``CHAINMAIL_SEED`` is used when ``--seed`` is not given.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from .checker import (
    check_trace,
    internal_findings,
    judgment_grid,
    run_property_suites,
)
from .interpreter import Bounds, record_trace, validate_program
from .langoo import LangError, link
from .parser import parse_module, parse_spec, parse_stmts
from . import report as R

EXIT_USAGE = 3


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; the documented contract
    # says 3, so route errors through our own exception.
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _build_parser() -> _ArgumentParser:
    parser = _ArgumentParser(
        prog="chainmail",
        description="check holistic assertions along recorded runs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def module_args(p):
        p.add_argument("--internal", required=True, metavar="F.loo",
                       help="module under scrutiny")
        p.add_argument("--external", required=True, metavar="G.loo",
                       help="client module linked against it")
        p.add_argument("--driver", default=None, metavar="STMTS",
                       help="driver statements, inline")
        p.add_argument("--driver-file", default=None, metavar="FILE",
                       help="driver statements from a file")
        p.add_argument("--max-steps", type=int, default=Bounds.max_steps)
        p.add_argument("--max-micro", type=int, default=Bounds.max_micro)
        p.add_argument("--format", choices=("json", "text"), default="json")
        p.add_argument("--dump-trace", default=None, metavar="FILE",
                       help="write visible configurations as JSON lines")

    check_p = sub.add_parser("check", help="record a run and judge a spec along it")
    module_args(check_p)
    check_p.add_argument("--spec", required=True, metavar="S.cmail")
    check_p.add_argument("--fuel", type=int, default=Bounds.fuel)
    check_p.add_argument("--set-cap", type=int, default=Bounds.set_cap)
    check_p.add_argument("--seed", type=int, default=None)
    check_p.add_argument("--report-dir", default=None, metavar="DIR",
                         help="write report.json, verdicts.csv, verdicts.png")
    check_p.add_argument("--check-internal", action="store_true",
                         help="also scan hidden interior configurations (non-semantic)")

    run_p = sub.add_parser("run", help="execute a driver and report the outcome")
    module_args(run_p)

    props_p = sub.add_parser("props", help="run the randomized law suites")
    props_p.add_argument("--trials", type=int, default=200)
    props_p.add_argument("--seed", type=int, default=None)
    props_p.add_argument("--format", choices=("json", "text"), default="text")
    return parser


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _load_driver(args) -> tuple:
    if args.driver is not None and args.driver_file is not None:
        raise UsageError("give either --driver or --driver-file, not both")
    if args.driver_file is not None:
        return parse_stmts(_read(args.driver_file), args.driver_file)
    return parse_stmts(args.driver or "", "<driver>")


def _pick_seed(args) -> Optional[int]:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("CHAINMAIL_SEED")
    if env is None:
        return None
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"CHAINMAIL_SEED is not an integer: {env!r}")


def _bounds(args) -> Bounds:
    return Bounds(
        max_steps=args.max_steps,
        max_micro=args.max_micro,
        fuel=getattr(args, "fuel", Bounds.fuel),
        set_cap=getattr(args, "set_cap", Bounds.set_cap),
    )


def _record(args):
    internal = parse_module(_read(args.internal), args.internal)
    external = parse_module(_read(args.external), args.external)
    driver = _load_driver(args)
    linked = link(internal, external)
    problems = validate_program(linked, driver)
    if problems:
        raise UsageError("; ".join(problems))
    trace = record_trace(internal, external, driver, _bounds(args))
    if args.dump_trace:
        R.dump_trace_jsonl(trace, Path(args.dump_trace))
    return trace


def _cmd_check(args) -> int:
    trace = _record(args)
    spec = parse_spec(_read(args.spec), Path(args.spec).stem, args.spec)
    seed = _pick_seed(args)
    seeds = {"seed": seed} if seed is not None else {}
    verdict = check_trace(trace, spec, trace.bounds, seeds)
    if args.check_internal:
        extra = internal_findings(trace, spec, trace.bounds)
        verdict = dataclasses.replace(
            verdict, caveats=verdict.caveats + tuple(extra)
        )
    if args.report_dir:
        grid = judgment_grid(trace, spec, trace.bounds)
        written = R.write_report_dir(verdict, trace, spec, Path(args.report_dir), grid)
        print("wrote " + ", ".join(str(p) for p in written), file=sys.stderr)
    if args.format == "json":
        sys.stdout.write(R.report_json(verdict))
    else:
        sys.stdout.write(R.report_text(verdict))
    return verdict.exit_code


def _cmd_run(args) -> int:
    trace = _record(args)
    payload = {
        "positions": len(trace.externals),
        "micro_total": trace.micro_total,
        "outcome": R.outcome_to_json(trace.outcome),
        "truncated": trace.truncated,
    }
    if args.format == "json":
        sys.stdout.write(R.render_json(payload))
    else:
        out = payload["outcome"]
        tail = out["kind"] if out["kind"] != "stuck" else f"stuck ({out['reason']})"
        sys.stdout.write(
            f"{payload['positions']} visible configuration(s), "
            f"{payload['micro_total']} micro-step(s), {tail}\n"
        )
    return 0


def _cmd_props(args) -> int:
    seed = _pick_seed(args)
    reports = run_property_suites(args.trials, seed if seed is not None else 0)
    if args.format == "json":
        sys.stdout.write(R.props_json(reports))
    else:
        sys.stdout.write(R.props_text(reports))
    return 0 if all(r.ok for r in reports) else 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "check":
            return _cmd_check(args)
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_props(args)
    except UsageError as exc:
        print(f"chainmail: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LangError as exc:
        print(f"chainmail: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"chainmail: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main(argv=sys.argv[1:]))
