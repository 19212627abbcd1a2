"""Command-line interface: ``idemcore <command> ...``.

Exit status is 0 when every check passes, 1 when a check fails or the input
is rejected, and 2 when a budget is exceeded.
"""

import argparse
import sys

from . import commands
from .errors import BudgetExceeded, IdemcoreError
from .problem import load
from .report import Report
from .suite import CRITERIA, run_suite


def _add_output(p):
    p.add_argument("--format", choices=["text", "json", "canonical"], default="text",
                   help="text report, JSON with timings, or canonical JSON only")
    p.add_argument("--output", "-o", help="write the report here instead of stdout")


def build_parser():
    parser = argparse.ArgumentParser(prog="idemcore", description="Verification engine for idempotent cores and sheafification.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate every entity of a problem file")
    p.add_argument("file")
    _add_output(p)

    p = sub.add_parser("orth", help="decide e ⊥ m in a finite category")
    p.add_argument("file")
    p.add_argument("--pair", nargs=2, metavar=("E", "M"), required=True)
    p.add_argument("--category")
    p.add_argument("--enriched", action="store_true")
    _add_output(p)

    p = sub.add_parser("factsys-check", help="check factorization systems and their closure operators")
    p.add_argument("file")
    p.add_argument("--factsys")
    _add_output(p)

    p = sub.add_parser("core", help="idempotent core (or Σ-reflection) of a monad")
    p.add_argument("file")
    p.add_argument("--monad")
    p.add_argument("--sigma")
    _add_output(p)

    p = sub.add_parser("lt-enum", help="enumerate Lawvere–Tierney and Grothendieck topologies")
    p.add_argument("file")
    p.add_argument("--site")
    _add_output(p)

    p = sub.add_parser("sheafify", help="sheafify a presheaf")
    p.add_argument("file")
    p.add_argument("--presheaf", required=True)
    p.add_argument("--topology", required=True)
    p.add_argument("--method", choices=["core", "plus", "both"], default="both")
    _add_output(p)

    p = sub.add_parser("verify-lt", help="sweep the LT theorem over a bounded universe")
    p.add_argument("file")
    p.add_argument("--topology", required=True)
    p.add_argument("--bound", type=int)
    p.add_argument("--site")
    _add_output(p)

    p = sub.add_parser("quasitopos", help="K-separated J-sheaves on the bisites of a file")
    p.add_argument("file")
    p.add_argument("--bisite")
    _add_output(p)

    p = sub.add_parser("run", help="run the campaigns of a problem file")
    p.add_argument("file")
    _add_output(p)

    p = sub.add_parser("suite", help="run the acceptance campaign")
    p.add_argument("--criteria", type=int, nargs="*", choices=sorted(CRITERIA))
    _add_output(p)
    return parser


def _dispatch(args):
    if args.command == "suite":
        def progress(k, title, ok, n, secs):
            print(f"criterion {k} ({title}): {'PASS' if ok else 'FAIL'} [{n} checks, {secs:.1f}s]", file=sys.stderr)

        return run_suite(args.criteria, progress=progress)
    problem = load(args.file)
    if args.command == "validate":
        return commands.validate(problem)
    if args.command == "orth":
        return commands.orth(problem, args.pair, args.category, args.enriched)
    if args.command == "factsys-check":
        return commands.factsys_check(problem, args.factsys)
    if args.command == "core":
        return commands.core(problem, args.monad, args.sigma)
    if args.command == "lt-enum":
        return commands.lt_enum(problem, args.site)
    if args.command == "sheafify":
        return commands.sheafify(problem, args.presheaf, args.topology, args.method)
    if args.command == "verify-lt":
        return commands.verify_lt(problem, args.topology, args.bound, args.site)
    if args.command == "quasitopos":
        return commands.quasitopos(problem, args.bisite)
    return commands.run_campaigns(problem)


def _emit(report, args):
    if args.format == "text":
        text = report.text()
    elif args.format == "json":
        text = report.to_json()
    else:
        text = report.canonical_json()
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        report = _dispatch(args)
        code = 0 if report.ok else 1
    except BudgetExceeded as exc:
        report = Report(args.command)
        report.error(exc)
        code = 2
    except IdemcoreError as exc:
        report = Report(args.command)
        report.error(exc)
        code = 1
    _emit(report, args)
    return code


if __name__ == "__main__":
    sys.exit(main())
