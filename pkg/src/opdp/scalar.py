"""Exact scalars: rationals and prime fields, plus the integer helpers used for coefficients.

Coefficients are always computed as integers or rationals first and only then reduced into
the working field with :func:`reduce`.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

from sympy import isprime

from opdp.errors import NonInvertibleDenominator, NotAnIndex, OpdpError, ParseError

logger = logging.getLogger(__name__)

Rational = int | Fraction


@dataclass(frozen=True)
class FieldSpec:
    """Either the rationals or a prime field F_p."""

    kind: Literal["q", "fp"] = "q"
    p: int | None = None

    def __post_init__(self) -> None:
        if self.kind == "q":
            if self.p is not None:
                raise OpdpError("the rational field takes no characteristic")
        elif self.kind == "fp":
            if self.p is None or not isprime(self.p):
                raise OpdpError(f"characteristic {self.p} is not a prime")
        else:
            raise OpdpError(f"unknown field kind {self.kind!r}")

    @classmethod
    def rationals(cls) -> FieldSpec:
        return cls("q")

    @classmethod
    def prime(cls, p: int) -> FieldSpec:
        return cls("fp", p)

    @classmethod
    def parse(cls, text: str) -> FieldSpec:
        """Parse ``q`` or ``fp:<prime>``."""
        raw = text.strip().lower()
        if raw == "q":
            return cls.rationals()
        if raw.startswith("fp:"):
            digits = raw[3:]
            if not digits.isdigit():
                raise ParseError(f"bad field {text!r}: expected fp:<prime>")
            try:
                return cls.prime(int(digits))
            except OpdpError as e:
                raise ParseError(f"bad field {text!r}: {e}") from e
        raise ParseError(f"bad field {text!r}: expected q or fp:<prime>")

    @property
    def characteristic(self) -> int:
        return 0 if self.p is None else self.p

    def zero(self) -> Scalar:
        return reduce(0, self)

    def one(self) -> Scalar:
        return reduce(1, self)

    def __str__(self) -> str:
        return "q" if self.kind == "q" else f"fp:{self.p}"


@dataclass(frozen=True)
class Scalar:
    """A field element. Rationals are kept in lowest terms; residues lie in [0, p)."""

    field: FieldSpec
    value: Fraction | int

    def _coerce(self, other: Scalar | Rational) -> Scalar:
        if isinstance(other, Scalar):
            if other.field != self.field:
                raise OpdpError(f"field mismatch: {self.field} vs {other.field}")
            return other
        return reduce(other, self.field)

    def _make(self, value: Fraction | int) -> Scalar:
        if self.field.p is None:
            return Scalar(self.field, Fraction(value))
        return Scalar(self.field, int(value) % self.field.p)

    def __add__(self, other: Scalar | Rational) -> Scalar:
        return self._make(self.value + self._coerce(other).value)

    __radd__ = __add__

    def __sub__(self, other: Scalar | Rational) -> Scalar:
        return self._make(self.value - self._coerce(other).value)

    def __rsub__(self, other: Scalar | Rational) -> Scalar:
        return self._coerce(other) - self

    def __mul__(self, other: Scalar | Rational) -> Scalar:
        return self._make(self.value * self._coerce(other).value)

    __rmul__ = __mul__

    def __neg__(self) -> Scalar:
        return self._make(-self.value)

    def inverse(self) -> Scalar:
        if self.is_zero():
            raise ZeroDivisionError("zero has no inverse")
        if self.field.p is None:
            return Scalar(self.field, 1 / Fraction(self.value))
        return Scalar(self.field, pow(int(self.value), -1, self.field.p))

    def __truediv__(self, other: Scalar | Rational) -> Scalar:
        return self * self._coerce(other).inverse()

    def __pow__(self, k: int) -> Scalar:
        if k < 0:
            return self.inverse() ** -k
        if self.field.p is None:
            return Scalar(self.field, Fraction(self.value) ** k)
        return Scalar(self.field, pow(int(self.value), k, self.field.p))

    def is_zero(self) -> bool:
        return self.value == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    @property
    def numerator(self) -> int:
        return Fraction(self.value).numerator

    @property
    def denominator(self) -> int:
        return Fraction(self.value).denominator

    def __str__(self) -> str:
        return str(self.value)


def reduce(n: Rational, f: FieldSpec) -> Scalar:
    """Image of an integer or rational under the ring morphism into ``f``."""
    q = Fraction(n)
    if f.p is None:
        return Scalar(f, q)
    if q.denominator % f.p == 0:
        logger.error("Coefficient %s has no image in F_%d", q, f.p)
        raise NonInvertibleDenominator(f"{q} has no image in F_{f.p}")
    return Scalar(f, q.numerator * pow(q.denominator, -1, f.p) % f.p)


def binomial(m: int, k: int) -> int:
    """C(m, k), zero when k > m."""
    if m < 0 or k < 0:
        raise ValueError("binomial arguments must be non-negative")
    return math.comb(m, k)


def index_ratio(num_order: int, den_order: int) -> int:
    """Exact quotient of two group orders; must be a subgroup index."""
    if den_order <= 0 or num_order % den_order:
        logger.error("Group order %d is not a multiple of %d", num_order, den_order)
        raise NotAnIndex(f"{den_order} does not divide {num_order}")
    return num_order // den_order


def integral(q: Rational) -> int:
    """Assert that a rational coefficient is an integer and return it."""
    q = Fraction(q)
    if q.denominator != 1:
        raise NotAnIndex(f"coefficient {q} is not integral")
    return q.numerator
