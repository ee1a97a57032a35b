"""``ptw check <file>`` and ``ptw fuzz``.

Exit codes: 0 when every directive matches its expectation and all engines
agree, 1 on a mismatch, disagreement or soundness failure, 2 on usage, file,
parse or state-space errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from ptw.errors import PtwError
from ptw.fuzz import FuzzConfig, render_fuzz_text, run_fuzz
from ptw.parser import load_spec
from ptw.report import ENGINES, Options, exit_code, render_report, run_spec
from ptw.statespace import DEFAULT_MAX_STATES


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 2 with a short message
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="ptw", description="Predicate transformer workbench")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ck = sub.add_parser("check", help="run the directives of a spec file")
    ck.add_argument("file")
    ck.add_argument("--engine", choices=ENGINES, default="both")
    ck.add_argument("--json", action="store_true", help="emit the JSON report")
    ck.add_argument("--annotate", action="store_true",
                    help="annotated listings for sp/slp queries")
    ck.add_argument("--trace-fixpoints", action="store_true",
                    help="per-loop Kleene traces, with the mu <= nu audit")
    ck.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES)
    ck.add_argument("--timing", action="store_true",
                    help="include wall-clock time (makes output non-reproducible)")
    ck.add_argument("--inject-disagreement", action="store_true", help=argparse.SUPPRESS)

    fz = sub.add_parser("fuzz", help="randomized property suites against the oracle")
    fz.add_argument("--seed", type=int, default=0)
    fz.add_argument("--count", type=int, default=500)
    fz.add_argument("--max-vars", type=int, default=3)
    fz.add_argument("--max-domain", type=int, default=5)
    fz.add_argument("--max-stmts", type=int, default=12)
    fz.add_argument("--max-nesting", type=int, default=2)
    fz.add_argument("--sets", type=int, default=4, help="argument sets per program")
    fz.add_argument("--no-syntactic", action="store_true",
                    help="skip the syntactic slp engine")
    fz.add_argument("--no-park", action="store_true", help="skip the Park suite")
    fz.add_argument("--json", action="store_true")
    fz.add_argument("--timing", action="store_true")
    return ap


def _check(args) -> int:
    if args.max_states < 1:
        print("ptw: --max-states must be positive", file=sys.stderr)
        return 2
    try:
        spec = load_spec(args.file)
    except OSError as exc:
        print(f"ptw: cannot read {args.file}: {exc.strerror}", file=sys.stderr)
        return 2
    except PtwError as exc:
        print(f"ptw: {args.file}:{exc}", file=sys.stderr)
        return 2
    opts = Options(engine=args.engine, annotate=args.annotate,
                   trace_fixpoints=args.trace_fixpoints, max_states=args.max_states,
                   timing=args.timing, inject_disagreement=args.inject_disagreement)
    try:
        report = run_spec(spec, opts)
    except PtwError as exc:
        print(f"ptw: {exc}", file=sys.stderr)
        return 2
    sys.stdout.buffer.write(render_report(report, "json" if args.json else "text"))
    sys.stdout.flush()
    return exit_code(report)


def _fuzz(args) -> int:
    cfg = FuzzConfig(seed=args.seed, count=args.count, max_vars=args.max_vars,
                     max_domain=args.max_domain, max_stmts=args.max_stmts,
                     max_nesting=args.max_nesting, sets_per_program=args.sets,
                     syntactic=not args.no_syntactic)
    summary = run_fuzz(cfg, park=not args.no_park)
    if args.json:
        print(json.dumps(summary.to_json(args.timing), indent=2))
    else:
        sys.stdout.write(render_fuzz_text(summary, args.timing))
    return 0 if summary.total_violations == 0 else 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "check":
        return _check(args)
    return _fuzz(args)


if __name__ == "__main__":
    sys.exit(main())
