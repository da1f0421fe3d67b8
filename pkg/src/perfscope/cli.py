"""Command-line driver.

    perfscope run   prog.pc --input n=8:256 [--dot out.dot] [--report out.txt]
                    [--max-iters 2] [--quiet]
    perfscope exact prog.pc --input n=8 [--input m=4]
    perfscope emit  prog.pc

Exit codes: 0 success, 1 diagnostics or runtime errors in the profiled
program, 2 usage errors (missing file, malformed --input, unbound main
parameter).
"""

from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path

from .analysis import analyze_program
from .diagnostics import FrontendError
from .emit import emit_instrumented
from .interp import PerfRuntimeError, RunConfigError, RunOptions, run
from .parser import parse
from .report import to_dot, to_text
from .runtime import ConfigError
from .values import InputConfigError

_INPUT_RE = re.compile(r"^(?P<name>[A-Za-z_][A-Za-z0-9_]*)=(?P<small>\d+):(?P<large>\d+)$")
_INPUT_EXACT_RE = re.compile(
    r"^(?P<name>[A-Za-z_][A-Za-z0-9_]*)=(?P<small>\d+)(:(?P<large>\d+))?$")


def _parse_input(text: str) -> tuple[str, int, int]:
    m = _INPUT_RE.match(text)
    if m is None:
        raise argparse.ArgumentTypeError(
            f"expected name=small:large with integers, got {text!r}")
    small, large = int(m.group("small")), int(m.group("large"))
    if large < small:
        raise argparse.ArgumentTypeError(
            f"large size must be >= small size in {text!r}")
    return m.group("name"), small, large


def _parse_input_exact(text: str) -> tuple[str, int, int]:
    # Exact runs execute at one size; accept name=V (or name=S:L, using S).
    m = _INPUT_EXACT_RE.match(text)
    if m is None:
        raise argparse.ArgumentTypeError(
            f"expected name=size, got {text!r}")
    size = int(m.group("small"))
    return m.group("name"), size, size


def _build_arg_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="perfscope",
        description="Profile a PerfC program once at a small input size and "
                    "report its costs as formulas of the input sizes.")
    sub = ap.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="profile and report symbolic counters")
    run_p.add_argument("source", help="PerfC source file (.pc)")
    run_p.add_argument("--input", action="append", type=_parse_input,
                       default=[], metavar="NAME=SMALL:LARGE",
                       help="small and large size for one input parameter")
    run_p.add_argument("--dot", metavar="PATH", help="write the call tree as DOT")
    run_p.add_argument("--report", metavar="PATH", help="also write the text report here")
    run_p.add_argument("--max-iters", type=int, default=2, metavar="N",
                       help="iterations to materialize per extrapolated loop (default 2)")
    run_p.add_argument("--quiet", action="store_true", help="suppress stdout report")

    exact_p = sub.add_parser("exact", help="full execution; print exact counters")
    exact_p.add_argument("source", help="PerfC source file (.pc)")
    exact_p.add_argument("--input", action="append", type=_parse_input_exact,
                         default=[], metavar="NAME=SIZE",
                         help="execution size for one input parameter")

    emit_p = sub.add_parser("emit", help="print the instrumented source")
    emit_p.add_argument("source", help="PerfC source file (.pc)")
    emit_p.add_argument("--input", action="append", type=_parse_input,
                        default=[], metavar="NAME=SMALL:LARGE",
                        help="accepted for symmetry; emit is static")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = _build_arg_parser().parse_args(argv)
    path = Path(args.source)
    if not path.is_file():
        print(f"perfscope: no such file: {path}", file=sys.stderr)
        return 2
    source = path.read_text(encoding="utf-8")

    try:
        program = parse(source)
    except FrontendError as e:
        print(e.diagnostic.format(str(path)), file=sys.stderr)
        return 1
    analysis = analyze_program(program)
    if analysis.diagnostics:
        for d in analysis.diagnostics:
            print(d.format(str(path)), file=sys.stderr)
        return 1

    if args.command == "emit":
        sys.stdout.write(emit_instrumented(analysis))
        return 0

    mode = "exact" if args.command == "exact" else "profile"
    options = RunOptions(
        inputs=list(args.input),
        mode=mode,
        max_iterations=getattr(args, "max_iters", 2),
    )
    if options.max_iterations < 1:
        print("perfscope: --max-iters must be >= 1", file=sys.stderr)
        return 2
    try:
        result = run(analysis, options)
    except (RunConfigError, ConfigError, InputConfigError) as e:
        print(f"perfscope: {e}", file=sys.stderr)
        return 2
    except PerfRuntimeError as e:
        where = f"{path}:{e.loc}: " if e.loc is not None else f"{path}: "
        print(f"{where}error: {e.message}", file=sys.stderr)
        return 1

    if args.command == "exact":
        env = result.small_env()
        print("exact run: " + (", ".join(f"{n} = {s}" for n, s, _ in result.inputs)
                               or "(no inputs)"))
        print(f"flops: {result.flops.eval(env)}")
        print(f"comm calls: {result.comm_call_count().eval(env)}")
        print(f"comm bytes: {result.comm_byte_count().eval(env)}")
        print(f"alloc bytes: {result.alloc_total.eval(env)}")
        print(f"peak bytes: {result.peak_large}")
        print("calls:")
        for f in result.functions:
            print(f"  {f.name}: {f.calls.eval(env)}")
        return 0

    text = to_text(result)
    if not args.quiet:
        sys.stdout.write(text)
    if args.report:
        Path(args.report).write_text(text, encoding="utf-8")
    if args.dot:
        Path(args.dot).write_text(to_dot(result), encoding="utf-8")
    return 0


if __name__ == "__main__":
    sys.exit(main())
