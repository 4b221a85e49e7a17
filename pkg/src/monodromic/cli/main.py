"""Command-line entry point: ``monodromic analyze <file> [options]``."""
from __future__ import annotations

import argparse
import logging
import os
import sys

from ..expansion import Mode
from .problem import InputError, parse_input
from .report import emit_report
from .runner import default_jobs, run
from .syntax import ParseError

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


def _pair(text: str) -> tuple[int, int]:
    try:
        a, b = (int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two integers 'a,b', got {text!r}") from None
    return a, b


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="monodromic",
                                 description="Center/focus analysis of monodromic singularities of planar "
                                             "polynomial vector fields.")
    sub = ap.add_subparsers(dest="command", required=True)
    an = sub.add_parser("analyze", help="analyse the field described in an input file")
    an.add_argument("file", help="input file ('-' for stdin)")
    an.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.AUTO.value)
    an.add_argument("--weights", type=_pair, help="override the Newton-diagram weights, as p,q")
    an.add_argument("--max-order", type=int, help="number of coefficients past the leading one (default 6)")
    an.add_argument("--m-window", type=_pair, help="leading-exponent scan window, as a,b (default -8,8)")
    an.add_argument("--tol-zero", type=float, help="threshold below which a computed value counts as zero")
    an.add_argument("--oracle", action=argparse.BooleanOptionalAction, default=None,
                    help="also run the numeric return-map oracle (default on)")
    an.add_argument("--report", choices=["json", "text"], default="json")
    an.add_argument("--out", help="write the report here instead of stdout")
    an.add_argument("--jobs", type=int, default=None, help="worker processes for sweeps (env MONODROMIC_JOBS)")
    return ap


def _setup_logging() -> None:
    level = os.environ.get("MONODROMIC_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def analyze(args: argparse.Namespace) -> int:
    try:
        text = sys.stdin.read() if args.file == "-" else open(args.file, encoding="utf-8").read()
    except OSError as exc:
        print(f"monodromic: cannot read {args.file}: {exc.strerror}", file=sys.stderr)
        return EXIT_INPUT
    options = {"mode": Mode(args.mode), "weights": args.weights, "max_order": args.max_order,
               "m_window": args.m_window, "tol_zero": args.tol_zero, "oracle": args.oracle}
    try:
        spec = parse_input(text, **options)
    except ParseError as exc:
        print(f"monodromic: {args.file}:{exc.line}:{exc.col}: syntax error: {exc.message}", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, ValueError) as exc:
        print(f"monodromic: {args.file}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report = run(spec, jobs=args.jobs or default_jobs())
    data = emit_report(report, args.report)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    if spec.sweep is None and report.failed:
        return EXIT_NUMERIC
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    if args.command == "analyze":
        return analyze(args)
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
