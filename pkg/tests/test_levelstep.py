"""Tests for step functions, binary Huffman sequences and the step operations φ."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opdp.errors import NotStep, ParseError, ShapeError
from opdp.freegamma import FreeGammaElement, com_divided_power, com_product
from opdp.levelstep import (
    BhsSequence,
    FreeStepElement,
    StepFunction,
    bhs_from_generator,
    bhs_to_gamma,
    census_of_composite,
    com_pullback,
    composite_step,
    enumerate_bhs,
    enumerate_c_r,
    gamma_to_bhs,
    level_dot,
    phi_eval,
    phi_eval_bhs,
    phi_from_theta,
    s7_prefactor,
    star,
    star_coefficient,
    theta_from_phi,
    theta_step,
)
from opdp.permcomb import Composition
from opdp.scalar import FieldSpec
from opdp.setoperad import COM, LEV, LevElement, lev_orbit_representatives

Q = FieldSpec.rationals()
F2 = FieldSpec.prime(2)
F3 = FieldSpec.prime(3)


def seq(*values: int) -> BhsSequence:
    return BhsSequence(values)


def elem(*values: int, f: FieldSpec = Q, c: int = 1) -> FreeStepElement:
    return FreeStepElement.of(BhsSequence(values), f, c)


def test_bhs_sequences() -> None:
    assert seq(1, 0, 0) == seq(1)
    assert seq(0, 1, 2).n == 3
    assert seq(0, 1, 2).height == 2
    assert seq(0, 1, 2).depth_map() == (1, 2, 2)
    assert BhsSequence.from_depths((2, 1, 2)) == seq(0, 1, 2)
    assert str(BhsSequence.parse("[0, 1, 1, 2]")) == "[0,1,1,2]"
    with pytest.raises(ShapeError):
        seq(0, 1)
    with pytest.raises(ParseError):
        BhsSequence.parse("[0,1]")


def test_enumerate_bhs() -> None:
    assert enumerate_bhs(1) == (seq(1),)
    assert enumerate_bhs(2) == (seq(0, 2),)
    assert enumerate_bhs(4) == (seq(0, 0, 4), seq(0, 1, 1, 2))
    assert enumerate_bhs(0) == ()


@pytest.mark.parametrize("n", range(1, 13))
def test_bhs_count_matches_lev_orbits(n: int) -> None:
    representatives = lev_orbit_representatives(n)
    assert len(enumerate_bhs(n)) == len(representatives)
    assert {BhsSequence.from_depths(h) for h in representatives} == set(enumerate_bhs(n))


def test_enumerate_c_r() -> None:
    assert enumerate_c_r(Composition.of(3)) == ()
    assert [step.h for step in enumerate_c_r(Composition.of(4))] == [(2, 2, 2, 2)]
    assert [step.h for step in enumerate_c_r(Composition.of(1, 1))] == [(1, 1)]
    assert [step.h for step in enumerate_c_r(Composition.of(1, 2))] == [(1, 2, 2)]
    assert all(step.r == Composition.of(2, 0) for step in enumerate_c_r(Composition.of(2, 0)))


def test_singleton_blocks_give_every_level_tree() -> None:
    steps = enumerate_c_r(Composition.of(*[1] * 8))
    assert len(steps) == len(LEV.enumerate(8))
    assert {step.h for step in steps} == set(LEV.enumerate(8))


def test_step_function_validation() -> None:
    step = StepFunction.parse("h=[1,2,2]@r=(1,2)")
    assert step.block_values() == (1, 2)
    assert str(step) == "h=[1,2,2]@r=(1,2)"
    assert StepFunction((1, 1), Composition.of(0, 2)).block_values() == (None, 1)
    with pytest.raises(NotStep):
        StepFunction((1, 2, 2), Composition.of(2, 1))
    with pytest.raises(ParseError):
        StepFunction.parse("h=[1,2]@r=(2)")


def test_phi_closed_form() -> None:
    step = StepFunction.parse("h=[1,1]@r=(2)")
    assert phi_eval_bhs(step, [elem(0, 2)]) == elem(0, 0, 4, c=3)
    assert phi_eval_bhs(step, [elem(0, 2, f=F3)]).is_zero()


@pytest.mark.parametrize("f", [Q, F2, F3])
@pytest.mark.parametrize(
    ("step", "args"),
    [
        ("h=[1,1]@r=(2)", [(0, 2)]),
        ("h=[1,1]@r=(1,1)", [(1,), (0, 2)]),
        ("h=[1,2,2]@r=(1,2)", [(1,), (1,)]),
        ("h=[2,2,2,2]@r=(4)", [(1,)]),
    ],
)
def test_closed_form_matches_monad_multiplication(
    f: FieldSpec, step: str, args: list[tuple[int, ...]]
) -> None:
    parsed = StepFunction.parse(step)
    inputs = [elem(*values, f=f) for values in args]
    assert phi_eval(parsed, inputs) == phi_eval_bhs(parsed, inputs)


def test_phi_on_sums_expands_multilinearly() -> None:
    step = StepFunction.parse("h=[1,1]@r=(2)")
    a, b = elem(1), elem(0, 2)
    expected = (
        phi_eval_bhs(step, [a])
        + phi_eval_bhs(StepFunction.parse("h=[1,1]@r=(1,1)"), [a, b])
        + phi_eval_bhs(step, [b])
    )
    assert phi_eval_bhs(step, [a + b]) == expected


def test_level_products() -> None:
    assert level_dot(seq(1), seq(1)) == seq(0, 2)
    assert star(elem(0, 2), elem(0, 2)) == elem(0, 0, 4, c=6)
    assert star(elem(0, 2, f=F2), elem(0, 2, f=F2)).is_zero()


@settings(max_examples=30, deadline=None)
@given(
    st.sampled_from([u for n in range(1, 5) for u in enumerate_bhs(n)]),
    st.sampled_from([u for n in range(1, 5) for u in enumerate_bhs(n)]),
)
def test_star_is_commutative(u: BhsSequence, v: BhsSequence) -> None:
    assert star(FreeStepElement.of(u, Q), FreeStepElement.of(v, Q)) == star(
        FreeStepElement.of(v, Q), FreeStepElement.of(u, Q)
    )


@pytest.mark.parametrize("n", range(1, 6))
def test_every_sequence_comes_from_the_generator(n: int) -> None:
    for u in enumerate_bhs(n):
        assert bhs_from_generator(u, Q) == FreeStepElement.of(u, Q)


def test_theta_phi_dictionary() -> None:
    step, copies = theta_step(LevElement((1, 2, 2)), Composition.of(3))
    assert step == StepFunction((1, 2, 2), Composition.of(0, 1, 2))
    assert copies == 3
    value = theta_from_phi(LevElement((1, 2, 2)), Composition.of(3), [elem(1)], phi_eval_bhs)
    assert value == elem(0, 1, 2)
    phi = StepFunction.parse("h=[1,1]@r=(2)")
    assert phi_from_theta(phi, [elem(0, 2)], phi_eval_bhs) == phi_eval_bhs(phi, [elem(0, 2)])


def test_gamma_embedding_roundtrip() -> None:
    a = elem(0, 1, 2) + elem(0, 0, 4, c=2)
    assert gamma_to_bhs(bhs_to_gamma(a)) == a


def test_composite_step_and_prefactor() -> None:
    assert s7_prefactor(Composition.of(2), [Composition.of(1, 1)]) == 2
    outer = StepFunction((1, 1), Composition.of(2))
    inner = StepFunction((1, 1), Composition.of(1, 1))
    composite = composite_step(outer, [inner])
    assert composite.r == Composition.of(2, 2)
    assert composite.h == (2, 2, 2, 2)
    assert census_of_composite(outer, [seq(0, 2)]) == seq(0, 0, 4)


def test_com_pullback() -> None:
    a, b = (FreeGammaElement.generator(COM, Q, g) for g in ("a", "b"))
    assert com_pullback(StepFunction((1, 1), Composition.of(2)), [a]) == (
        com_divided_power(2, a)
    )
    assert com_pullback(StepFunction((1, 1), Composition.of(1, 1)), [a, b]) == com_product(a, b)


@settings(max_examples=30, deadline=None)
@given(*[st.sampled_from([u for n in range(1, 4) for u in enumerate_bhs(n)])] * 4)
def test_level_exchange_law(
    a: BhsSequence, b: BhsSequence, c: BhsSequence, d: BhsSequence
) -> None:
    def s(u: BhsSequence, v: BhsSequence) -> FreeStepElement:
        return star(FreeStepElement.of(u, Q), FreeStepElement.of(v, Q))

    assert star(s(a, b), s(c, d)) == star(s(a, c), s(b, d))


@pytest.mark.parametrize("n", range(1, 11))
def test_level_squares_are_even(n: int) -> None:
    for u in enumerate_bhs(n):
        assert star_coefficient(u, u) % 2 == 0
        square = star(FreeStepElement.of(u, Q), FreeStepElement.of(u, Q))
        (c,) = square.terms.values()
        assert c.denominator == 1
        assert c.numerator % 2 == 0
        assert star(FreeStepElement.of(u, F2), FreeStepElement.of(u, F2)).is_zero()
