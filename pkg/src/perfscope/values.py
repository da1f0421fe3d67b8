"""Tracked runtime values.

``Num`` replaces the mini-language's integers: alongside the concrete
value under the small run configuration it carries the value as a
symbolic formula of the input sizes and the interpolated value under a
typical large configuration. ``TrackedFloat`` replaces doubles: its
value is ordinary IEEE arithmetic, but every arithmetic operation on it
charges one FLOP to the active profiling context.

Comparisons between Nums are decided by the large components (symbolic
formulas have no total order; the large problem case is what decides
control flow). Integer division keeps the exact rational-function term
and records a warning when the concrete components truncated; modulo
has no polynomial form and falls back to a constant term plus a warning.
Both situations clear ``Num.exact``, which exempts the value from the
triple-consistency audit.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass
from typing import Callable, Protocol

from .terms import Term

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1

# warn(kind, message) -- the caller curries in the source location.
WarnSink = Callable[[str, str], None]


class InputConfigError(ValueError):
    """Invalid input-size configuration (e.g. large < small)."""


class TrackedOverflow(OverflowError):
    """A small or large component left the 64-bit signed range."""


class TrackedDivisionByZero(ZeroDivisionError):
    """Division or modulo where a concrete component of the divisor is 0."""


@dataclass(frozen=True)
class Num:
    """A tracked integer: (small concrete value, symbolic term, large value).

    ``exact`` is False once truncating division or modulo made the term
    an approximation of the concrete components.
    """

    small: int
    term: Term
    large: int
    exact: bool = True


@dataclass(frozen=True)
class TrackedFloat:
    """A double whose operations are counted, not its value tracked."""

    value: float


def _check64(v: int, what: str) -> int:
    if not INT64_MIN <= v <= INT64_MAX:
        raise TrackedOverflow(f"{what} overflows 64-bit range: {v}")
    return v


def num_from_literal(c: int) -> Num:
    _check64(c, "literal")
    return Num(c, Term.const(c), c)


def num_input(name: str, small: int, large: int) -> Num:
    if small < 0:
        raise InputConfigError(f"input {name}: small size must be >= 0, got {small}")
    if large < small:
        raise InputConfigError(
            f"input {name}: large size {large} must be >= small size {small}"
        )
    _check64(large, f"input {name}")
    return Num(small, Term.var(name), large)


def as_num(v: int | Num) -> Num:
    return v if isinstance(v, Num) else num_from_literal(v)


def _trunc_div(a: int, b: int) -> int:
    # C semantics: quotient rounds toward zero.
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def _trunc_mod(a: int, b: int) -> int:
    # C semantics: remainder takes the sign of the dividend.
    return a - _trunc_div(a, b) * b


def num_binop(op: str, a: Num, b: Num, warn: WarnSink | None = None) -> Num:
    """Componentwise arithmetic; op is one of "+", "-", "*", "/", "%"."""
    exact = a.exact and b.exact
    if op == "+":
        small, large, term = a.small + b.small, a.large + b.large, a.term + b.term
    elif op == "-":
        small, large, term = a.small - b.small, a.large - b.large, a.term - b.term
    elif op == "*":
        small, large, term = a.small * b.small, a.large * b.large, a.term * b.term
    elif op in ("/", "%"):
        if b.small == 0 or b.large == 0:
            raise TrackedDivisionByZero(
                f"{'division' if op == '/' else 'modulo'} by zero "
                f"(divisor small={b.small}, large={b.large})"
            )
        if op == "/":
            small = _trunc_div(a.small, b.small)
            large = _trunc_div(a.large, b.large)
            term = a.term / b.term
            if _trunc_mod(a.small, b.small) != 0 or _trunc_mod(a.large, b.large) != 0:
                exact = False
                if warn is not None:
                    warn(
                        "truncated-division",
                        "integer division truncated; the symbolic term keeps "
                        "the exact quotient",
                    )
        else:
            small = _trunc_mod(a.small, b.small)
            large = _trunc_mod(a.large, b.large)
            term = Term.const(small)
            exact = False
            if warn is not None:
                warn(
                    "lossy-term",
                    f"modulo has no polynomial form; term frozen to constant {small}",
                )
    else:
        raise ValueError(f"unknown arithmetic operator {op!r}")
    _check64(small, "small component")
    _check64(large, "large component")
    return Num(small, term, large, exact)


def num_neg(a: Num) -> Num:
    return Num(_check64(-a.small, "small component"), -a.term,
               _check64(-a.large, "large component"), a.exact)


_CMP = {
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
    "==": operator.eq,
    "!=": operator.ne,
}


def num_compare(op: str, a: Num, b: Num, warn: WarnSink | None = None) -> bool:
    """Compare by the large components (the large problem case decides)."""
    if a.large == b.large and a.small != b.small and warn is not None:
        warn(
            "comparison-ambiguity",
            f"operands share large value {a.large} but differ at the small "
            f"configuration ({a.small} vs {b.small}); large-value outcome stands",
        )
    return _CMP[op](a.large, b.large)


def num_compare_small(op: str, a: Num, b: Num) -> bool:
    """The small-configuration outcome of a comparison (exact-mode rule)."""
    return _CMP[op](a.small, b.small)


class FlopCharger(Protocol):
    def charge_flops(self, amount: int) -> None: ...


def _ieee_div(x: float, y: float) -> float:
    try:
        return x / y
    except ZeroDivisionError:
        if x != x or x == 0.0:
            return math.nan
        return math.copysign(math.inf, x) * math.copysign(1.0, y)


_FLOAT_OPS = {
    "+": operator.add,
    "-": operator.sub,
    "*": operator.mul,
    "/": _ieee_div,
}


def float_binop(op: str, a: TrackedFloat, b: TrackedFloat, ctx: FlopCharger) -> TrackedFloat:
    """IEEE arithmetic on the values; charges exactly one FLOP to ctx."""
    result = _FLOAT_OPS[op](a.value, b.value)
    ctx.charge_flops(1)
    return TrackedFloat(result)


def float_compare(op: str, a: TrackedFloat, b: TrackedFloat) -> bool:
    # Comparisons are free: only add/sub/mul/div count as FLOPs.
    return _CMP[op](a.value, b.value)
