"""Exact symbolic arithmetic for counter formulas.

Every quantity the profiler tracks (iteration counts, byte sizes, FLOP
totals) is a ratio of multivariate polynomials over the named input-size
parameters:

    Term = Polynomial / Polynomial

Coefficients are `fractions.Fraction`, so repeated loop scaling (multiply
by a trip count, divide by the iterations actually run) never loses
precision and never overflows.

Canonical form keeps equality and rendering deterministic without a full
polynomial GCD:

  * polynomials store no zero coefficients (zero is the empty mapping),
  * the denominator is monic under the graded-lexicographic monomial
    order, its leading coefficient absorbed into the numerator,
  * a zero numerator forces denominator 1.

Equality is decided by cross-multiplication (a/b == c/d iff a*d - c*b is
the zero polynomial), so n^2/n compares equal to n even though the two
keep different internal spellings.

Variables inside a monomial are ranked (and printed) in descending name
order, which renders the usual size parameters the conventional way
round: "n*m", "n^2*m".
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping


class TermError(Exception):
    """Base class for errors raised by the symbolic engine."""


class InvalidVariable(TermError):
    """Variable name is empty or not an identifier."""


class TermDivisionByZero(TermError):
    """Division by the zero term (or construction with a zero denominator)."""


class UnboundVariable(TermError):
    """Evaluation met a variable missing from the assignment."""


class EvaluationSingularity(TermError):
    """The denominator evaluates to zero at the given assignment."""


def _check_varname(name: str) -> str:
    if not isinstance(name, str) or not name.isidentifier():
        raise InvalidVariable(f"not a valid variable name: {name!r}")
    return name


@dataclass(frozen=True)
class Monomial:
    """A product of variables with positive integer exponents.

    ``exps`` holds (variable, exponent) pairs with names in descending
    order; exponent-0 entries are never stored, so the unit monomial is
    the empty tuple.
    """

    exps: tuple[tuple[str, int], ...] = ()

    @staticmethod
    def unit() -> "Monomial":
        return _UNIT

    @staticmethod
    def var(name: str) -> "Monomial":
        return Monomial(((_check_varname(name), 1),))

    @staticmethod
    def from_exponents(exps: Mapping[str, int]) -> "Monomial":
        for v, e in exps.items():
            if e < 0:
                raise TermError(f"negative exponent in monomial: {v}^{e}")
        return Monomial(tuple(sorted(((v, e) for v, e in exps.items() if e != 0), reverse=True)))

    @property
    def degree(self) -> int:
        return sum(e for _, e in self.exps)

    @property
    def is_unit(self) -> bool:
        return not self.exps

    def exponent(self, name: str) -> int:
        for v, e in self.exps:
            if v == name:
                return e
        return 0

    def variables(self) -> set[str]:
        return {v for v, _ in self.exps}

    def __mul__(self, other: "Monomial") -> "Monomial":
        merged = dict(self.exps)
        for v, e in other.exps:
            merged[v] = merged.get(v, 0) + e
        return Monomial(tuple(sorted(merged.items(), reverse=True)))

    def format(self) -> str:
        if not self.exps:
            return "1"
        return "*".join(v if e == 1 else f"{v}^{e}" for v, e in self.exps)


_UNIT = Monomial()


def _grlex_key(mono: Monomial, varlist: tuple[str, ...]) -> tuple:
    # Graded-lexicographic: total degree first, then the exponent vector
    # over `varlist` (variables in descending name order).
    return (mono.degree, tuple(mono.exponent(v) for v in varlist))


class Polynomial:
    """Sparse multivariate polynomial with Fraction coefficients.

    ``coeffs`` maps Monomial -> nonzero Fraction; the zero polynomial is
    the empty mapping. Instances are never mutated after construction.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[Monomial, Fraction] | None = None):
        self.coeffs: dict[Monomial, Fraction] = {
            m: c for m, c in (coeffs or {}).items() if c != 0
        }

    @staticmethod
    def zero() -> "Polynomial":
        return Polynomial()

    @staticmethod
    def const(value: int | Fraction) -> "Polynomial":
        return Polynomial({_UNIT: Fraction(value)})

    @staticmethod
    def var(name: str) -> "Polynomial":
        return Polynomial({Monomial.var(name): Fraction(1)})

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_const(self) -> bool:
        return all(m.is_unit for m in self.coeffs)

    @property
    def is_one(self) -> bool:
        return self.coeffs == {_UNIT: Fraction(1)}

    def const_value(self) -> Fraction:
        if not self.is_const:
            raise TermError("polynomial is not constant")
        return self.coeffs.get(_UNIT, Fraction(0))

    def variables(self) -> set[str]:
        out: set[str] = set()
        for m in self.coeffs:
            out |= m.variables()
        return out

    def __add__(self, other: "Polynomial") -> "Polynomial":
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, Fraction(0)) + c
        return Polynomial(out)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, Fraction(0)) - c
        return Polynomial(out)

    def __neg__(self) -> "Polynomial":
        return Polynomial({m: -c for m, c in self.coeffs.items()})

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        out: dict[Monomial, Fraction] = {}
        for ma, ca in self.coeffs.items():
            for mb, cb in other.coeffs.items():
                m = ma * mb
                out[m] = out.get(m, Fraction(0)) + ca * cb
        return Polynomial(out)

    def scale(self, q: Fraction) -> "Polynomial":
        return Polynomial({m: c * q for m, c in self.coeffs.items()})

    def eval(self, env: Mapping[str, int | Fraction]) -> Fraction:
        missing = self.variables() - set(env)
        if missing:
            raise UnboundVariable(f"unbound variable(s): {', '.join(sorted(missing))}")
        total = Fraction(0)
        for m, c in self.coeffs.items():
            v = c
            for name, e in m.exps:
                v *= Fraction(env[name]) ** e
            total += v
        return total

    def leading(self) -> tuple[Monomial, Fraction]:
        if self.is_zero:
            raise TermError("zero polynomial has no leading monomial")
        varlist = tuple(sorted(self.variables(), reverse=True))
        m = max(self.coeffs, key=lambda mono: _grlex_key(mono, varlist))
        return m, self.coeffs[m]

    def ordered_monomials(self) -> list[Monomial]:
        varlist = tuple(sorted(self.variables(), reverse=True))
        return sorted(self.coeffs, key=lambda mono: _grlex_key(mono, varlist), reverse=True)

    def format(self) -> str:
        if self.is_zero:
            return "0"
        parts: list[str] = []
        for m in self.ordered_monomials():
            c = self.coeffs[m]
            mag = _coeff_mono(abs(c), m)
            if not parts:
                parts.append(mag if c > 0 else "-" + mag)
            else:
                parts.append((" + " if c > 0 else " - ") + mag)
        return "".join(parts)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __repr__(self) -> str:
        return f"Polynomial({self.format()})"


def _coeff_mono(c: Fraction, m: Monomial) -> str:
    if m.is_unit:
        return str(c)
    if c == 1:
        return m.format()
    return f"{c}*{m.format()}"


_ONE_POLY = Polynomial.const(1)


@dataclass(frozen=True)
class BigO:
    """An asymptotic class: a signed exponent per variable.

    Exponents may be negative (a quantity that shrinks with an input),
    rendered as a quotient: O(n/m), O(1/n). ``exact_zero`` marks the
    class of the identically-zero quantity, which still prints as O(1).
    """

    exponents: tuple[tuple[str, int], ...] = ()
    exact_zero: bool = False

    def __str__(self) -> str:
        pos = [(v, e) for v, e in self.exponents if e > 0]
        neg = [(v, -e) for v, e in self.exponents if e < 0]

        def part(items: list[tuple[str, int]]) -> str:
            return "*".join(v if e == 1 else f"{v}^{e}" for v, e in items)

        if not pos and not neg:
            return "O(1)"
        if not neg:
            return f"O({part(pos)})"
        denom = part(neg) if len(neg) == 1 else f"({part(neg)})"
        if not pos:
            return f"O(1/{denom})"
        return f"O({part(pos)}/{denom})"

    def as_dict(self) -> dict[str, int]:
        return dict(self.exponents)


class Term:
    """A canonical ratio of two polynomials. Immutable value type.

    Supports +, -, *, / against other Terms, ints and Fractions. Not
    hashable: equal values can keep different internal spellings, so a
    consistent hash does not exist without full normalization.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial | None = None):
        if den is None:
            den = _ONE_POLY
        if den.is_zero:
            raise TermDivisionByZero("term denominator is the zero polynomial")
        if num.is_zero:
            num, den = Polynomial.zero(), _ONE_POLY
        else:
            _, lead = den.leading()
            if lead != 1:
                num = num.scale(Fraction(1) / lead)
                den = den.scale(Fraction(1) / lead)
        self.num = num
        self.den = den

    @staticmethod
    def const(value: int | Fraction) -> "Term":
        return Term(Polynomial.const(value))

    @staticmethod
    def var(name: str) -> "Term":
        return Term(Polynomial.var(name))

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @property
    def is_const(self) -> bool:
        return self.num.is_const and self.den.is_one

    def const_value(self) -> Fraction:
        if not self.is_const:
            raise TermError(f"term is not constant: {self.format()}")
        return self.num.const_value()

    def variables(self) -> set[str]:
        return self.num.variables() | self.den.variables()

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other: object) -> "Term":
        o = _coerce(other)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return Term(self.num + o.num, self.den)
        return Term(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __sub__(self, other: object) -> "Term":
        o = _coerce(other)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return Term(self.num - o.num, self.den)
        return Term(self.num * o.den - o.num * self.den, self.den * o.den)

    def __rsub__(self, other: object) -> "Term":
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other: object) -> "Term":
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return Term(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> "Term":
        o = _coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero:
            raise TermDivisionByZero("division by the zero term")
        return Term(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other: object) -> "Term":
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self) -> "Term":
        return Term(-self.num, self.den)

    def __eq__(self, other: object) -> bool:
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return (self.num * o.den - o.num * self.den).is_zero

    # -- observation ---------------------------------------------------

    def eval(self, env: Mapping[str, int | Fraction]) -> Fraction:
        n = self.num.eval(env)
        d = self.den.eval(env)
        if d == 0:
            raise EvaluationSingularity(
                f"denominator of {self.format()} is zero at the given assignment"
            )
        return n / d

    def big_o(self) -> BigO:
        if self.is_zero:
            return BigO((), exact_zero=True)
        lead_num, _ = self.num.leading()
        lead_den, _ = self.den.leading()
        diff = {
            v: lead_num.exponent(v) - lead_den.exponent(v)
            for v in lead_num.variables() | lead_den.variables()
        }
        exps = tuple(sorted(((v, e) for v, e in diff.items() if e != 0), reverse=True))
        return BigO(exps)

    def format(self) -> str:
        if self.den.is_one:
            return self.num.format()
        return f"({self.num.format()})/({self.den.format()})"

    def __str__(self) -> str:
        return self.format()

    def __repr__(self) -> str:
        return f"Term({self.format()})"


def _coerce(value: object) -> Term | None:
    if isinstance(value, Term):
        return value
    if isinstance(value, (int, Fraction)):
        return Term.const(value)
    return None


TERM_ZERO = Term.const(0)
TERM_ONE = Term.const(1)


def term_sum(terms: Iterable[Term]) -> Term:
    total = TERM_ZERO
    for t in terms:
        total = total + t
    return total
