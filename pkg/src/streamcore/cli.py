"""``streamcore check | run | diagram | convert``.

Exit codes: 0 ok, 1 type error, 2 malformed input (spec or trace), 3 I/O error,
4 runtime arithmetic error, 5 internal evaluation failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Optional

from .diagram import DiagramSpec, UnknownStream, render
from .evaluator import EvaluationFailure, run
from .model import RuntimeArithmeticError
from .parser import ParseError, SpecValidationError, parse_spec
from .traces import TraceFormatError, read_trace, write_trace
from .typecheck import Mode, check_spec

EXIT_OK, EXIT_TYPE, EXIT_FORMAT, EXIT_IO, EXIT_ARITH, EXIT_INTERNAL = range(6)


def _color() -> bool:
    return os.environ.get("STREAMCORE_COLOR", "0") == "1"


def _label(word: str) -> str:
    return f"\x1b[1;31m{word}\x1b[0m" if _color() else word


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as f:
        return f.read()


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)


def _load_spec(path: str):
    """Returns ``(spec, exit_code)``; spec is None when loading failed."""
    try:
        text = _read(path)
    except OSError as exc:
        print(f"{path}: {_label('error')}: cannot read: {exc.strerror or exc}", file=sys.stderr)
        return None, EXIT_IO
    try:
        return parse_spec(text), EXIT_OK
    except ParseError as exc:
        print(f"{path}:{exc.span}: {_label('parse error')}: {exc.message}", file=sys.stderr)
    except SpecValidationError as exc:
        for err in exc.errors:
            print(f"{path}:{err.span or '?'}: {_label('error')}: {err.kind.value}: {err}", file=sys.stderr)
    return None, EXIT_FORMAT


def _mode(args) -> Mode:
    return Mode(args.mode)


def cmd_check(args) -> int:
    spec, code = _load_spec(args.spec)
    if spec is None:
        return code
    report = check_spec(spec, _mode(args), reorder=not args.no_reorder)
    if report.ok:
        order = ", ".join(spec.equations[i].target for i in report.order)
        print(f"{args.spec}: well-typed ({report.mode.value}{', reordered' if report.reordered else ''})")
        if order:
            print(f"evaluation order: {order}")
        return EXIT_OK
    for err in report.errors:
        where = err.span or spec.equation(err.stream).span or "?"
        print(f"{args.spec}:{where}: {_label('error')}: {err}")
    print(f"{len(report.errors)} error(s)")
    return EXIT_TYPE


def _load_trace(path: str, fmt: str, streams=()):
    try:
        text = _read(path)
    except OSError as exc:
        print(f"{path}: {_label('error')}: cannot read: {exc.strerror or exc}", file=sys.stderr)
        return None, EXIT_IO
    try:
        return read_trace(text, fmt, streams), EXIT_OK
    except TraceFormatError as exc:
        print(f"{path}: {_label('error')}: {exc}", file=sys.stderr)
        return None, EXIT_FORMAT


def cmd_run(args) -> int:
    spec, code = _load_spec(args.spec)
    if spec is None:
        return code
    report = check_spec(spec, _mode(args), reorder=not args.no_reorder)
    if not report.ok:
        for err in report.errors:
            print(f"{args.spec}:{err.span or '?'}: {_label('error')}: {err}", file=sys.stderr)
        return EXIT_TYPE
    trace, code = _load_trace(args.trace, args.format, spec.inputs if args.format == "jsonl" else ())
    if trace is None:
        return code
    missing = [name for name in spec.inputs if name not in trace]
    if missing:
        print(f"{args.trace}: {_label('error')}: missing input column '{missing[0]}'", file=sys.stderr)
        return EXIT_FORMAT
    try:
        result = run(spec, trace, _mode(args), reorder=not args.no_reorder)
    except RuntimeArithmeticError as exc:
        print(f"{_label('runtime error')}: {exc}", file=sys.stderr)
        return EXIT_ARITH
    except EvaluationFailure as exc:
        print(f"{_label('internal error')}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    try:
        _write(args.out, write_trace(result, args.out_format or args.format))
    except OSError as exc:
        print(f"{args.out}: {_label('error')}: cannot write: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_diagram(args) -> int:
    trace, code = _load_trace(args.trace, args.format)
    if trace is None:
        return code
    streams = tuple(s for s in args.streams.split(",") if s) if args.streams else None
    dspec = DiagramSpec(streams, args.start, args.end, args.style)
    try:
        text = render(trace, dspec)
    except UnknownStream as exc:
        print(f"{_label('error')}: unknown stream '{exc.args[0]}'", file=sys.stderr)
        return EXIT_FORMAT
    try:
        _write(args.out, text)
    except OSError as exc:
        print(f"{args.out}: {_label('error')}: cannot write: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_convert(args) -> int:
    trace, code = _load_trace(args.trace, args.format)
    if trace is None:
        return code
    try:
        _write(args.out, write_trace(trace, args.to))
    except OSError as exc:
        print(f"{args.out}: {_label('error')}: cannot write: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="streamcore", description="Pacing type checker and monitor for StreamCore.")
    sub = p.add_subparsers(dest="command", required=True)

    def typing_flags(sp):
        sp.add_argument("--mode", choices=["v1", "v2"], default="v2", help="type system (default v2)")
        sp.add_argument("--no-reorder", action="store_true", help="check equations in source order")

    c = sub.add_parser("check", help="type-check a specification")
    c.add_argument("spec")
    typing_flags(c)
    c.set_defaults(func=cmd_check)

    r = sub.add_parser("run", help="evaluate a specification over an input trace")
    r.add_argument("spec")
    r.add_argument("--trace", required=True)
    r.add_argument("--out", default=None, help="output file (default stdout)")
    r.add_argument("--format", choices=["csv", "jsonl"], default="csv", help="input trace format")
    r.add_argument("--out-format", choices=["csv", "jsonl"], default=None)
    typing_flags(r)
    r.set_defaults(func=cmd_run)

    d = sub.add_parser("diagram", help="render a timing diagram of a trace")
    d.add_argument("trace")
    d.add_argument("--streams", default=None, help="comma-separated stream names")
    d.add_argument("--start", type=int, default=0)
    d.add_argument("--end", type=int, default=None, help="exclusive end time")
    d.add_argument("--style", choices=["ascii", "svg"], default="ascii")
    d.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    d.add_argument("--out", default=None)
    d.set_defaults(func=cmd_diagram)

    v = sub.add_parser("convert", help="convert a trace between csv and jsonl")
    v.add_argument("trace")
    v.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    v.add_argument("--to", choices=["csv", "jsonl"], required=True)
    v.add_argument("--out", default=None)
    v.set_defaults(func=cmd_convert)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
