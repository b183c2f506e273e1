"""Tests for exact scalars and field reduction."""

import logging
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opdp.errors import NonInvertibleDenominator, NotAnIndex, OpdpError, ParseError
from opdp.scalar import FieldSpec, binomial, index_ratio, integral, reduce

PRIMES = (2, 3, 5, 7)


def test_field_spec_parse() -> None:
    assert FieldSpec.parse("q") == FieldSpec.rationals()
    assert FieldSpec.parse(" FP:3 ") == FieldSpec.prime(3)
    assert str(FieldSpec.parse("fp:5")) == "fp:5"
    assert FieldSpec.parse("q").characteristic == 0


@pytest.mark.parametrize("text", ["fp:4", "fp:", "fp:x", "r", ""])
def test_field_spec_parse_rejects(text: str) -> None:
    with pytest.raises(ParseError):
        FieldSpec.parse(text)


def test_field_spec_rejects_composite_characteristic() -> None:
    with pytest.raises(OpdpError, match="not a prime"):
        FieldSpec.prime(9)


def test_reduce_rational_into_prime_field() -> None:
    f3 = FieldSpec.prime(3)
    half = reduce(Fraction(1, 2), f3)
    assert half.value == 2
    assert half * 2 == f3.one()


def test_reduce_rejects_denominator_divisible_by_p() -> None:
    with pytest.raises(NonInvertibleDenominator):
        reduce(Fraction(1, 2), FieldSpec.prime(2))


def test_reduce_failure_is_logged(caplog: pytest.LogCaptureFixture) -> None:
    with caplog.at_level(logging.ERROR, logger="opdp.scalar"):
        with pytest.raises(NonInvertibleDenominator):
            reduce(Fraction(3, 4), FieldSpec.prime(2))
    assert "3/4 has no image in F_2" in caplog.text


def test_reduce_integer_vanishes_in_characteristic() -> None:
    assert reduce(6, FieldSpec.prime(2)).is_zero()
    assert reduce(6, FieldSpec.prime(3)).is_zero()
    assert not reduce(6, FieldSpec.prime(5)).is_zero()


def test_rational_arithmetic_stays_exact() -> None:
    q = FieldSpec.rationals()
    total = reduce(Fraction(1, 3), q) + reduce(Fraction(2, 3), q)
    assert total == q.one()
    c = reduce(Fraction(3, 6), q)
    assert (c.numerator, c.denominator) == (1, 2)
    assert str(reduce(Fraction(-4, 6), q)) == "-2/3"


def test_zero_has_no_inverse() -> None:
    with pytest.raises(ZeroDivisionError):
        FieldSpec.prime(5).zero().inverse()


def test_mixing_fields_raises() -> None:
    with pytest.raises(OpdpError, match="field mismatch"):
        _ = FieldSpec.rationals().one() + FieldSpec.prime(2).one()


def test_integer_helpers() -> None:
    assert binomial(5, 2) == 10
    assert binomial(2, 3) == 0
    assert index_ratio(6, 2) == 3
    assert integral(Fraction(4, 2)) == 2
    with pytest.raises(NotAnIndex):
        index_ratio(6, 4)
    with pytest.raises(NotAnIndex):
        integral(Fraction(3, 2))


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(PRIMES), st.integers(-50, 50), st.integers(-50, 50))
def test_reduce_is_a_ring_morphism(p: int, a: int, b: int) -> None:
    f = FieldSpec.prime(p)
    assert reduce(a + b, f) == reduce(a, f) + reduce(b, f)
    assert reduce(a * b, f) == reduce(a, f) * reduce(b, f)
    assert reduce(-a, f) == -reduce(a, f)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(PRIMES), st.integers(1, 200))
def test_nonzero_residues_are_invertible(p: int, a: int) -> None:
    f = FieldSpec.prime(p)
    c = reduce(a, f)
    if c.is_zero():
        return
    assert c * c.inverse() == f.one()
    assert c ** (p - 1) == f.one()


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 30), st.integers(0, 30))
def test_binomial_recurrence(m: int, k: int) -> None:
    assert binomial(m + 1, k + 1) == binomial(m, k) + binomial(m, k + 1)
