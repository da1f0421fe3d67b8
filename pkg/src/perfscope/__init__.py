"""perfscope: a single-run complexity profiler for the PerfC mini-language.

Execute a program once at a tiny input size while propagating symbolic
annotations, and get FLOP count, peak memory, communication volume and
per-function call counts as closed-form polynomial formulas (with their
big-O classes) of the named input-size parameters.
"""

from .analysis import (
    AnalysisResult, LoopAnnotation, TrackednessMap, analyze_program,
    analyze_trackedness, annotate_loops, resolve,
)
from .diagnostics import Diagnostic, FrontendError, Loc
from .emit import emit_instrumented
from .interp import (
    BlockHandle, ExactPoint, Interpreter, PerfRuntimeError, RunConfigError,
    RunOptions, run, run_exact_series,
)
from .parser import parse
from .report import to_dot, to_text
from .runtime import Context, ProfileResult, ProfWarning
from .terms import BigO, Monomial, Polynomial, Term
from .values import (
    Num, TrackedFloat, num_binop, num_compare, num_from_literal, num_input,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisResult", "BigO", "BlockHandle", "Context", "Diagnostic",
    "ExactPoint", "FrontendError", "Interpreter", "Loc", "LoopAnnotation",
    "Monomial", "Num", "PerfRuntimeError", "Polynomial", "ProfWarning",
    "ProfileResult", "RunConfigError", "RunOptions", "Term", "TrackedFloat",
    "TrackednessMap", "analyze_program", "analyze_trackedness",
    "annotate_loops", "emit_instrumented", "num_binop", "num_compare",
    "num_from_literal", "num_input", "parse", "resolve", "run",
    "run_exact_series", "to_dot", "to_text",
]
