"""Tests for text formatting."""

from opdp.formatting import (
    format_free_gamma,
    format_free_step,
    format_listing,
    format_report,
    format_term,
    format_value,
    get_status_emoji,
)
from opdp.freegamma import FreeGammaElement, GammaTerm, com_product
from opdp.levelstep import BhsSequence, FreeStepElement
from opdp.permcomb import Composition
from opdp.permrep import GVector
from opdp.scalar import FieldSpec, reduce
from opdp.setoperad import COM
from opdp.symaction import YoungSubgroup
from opdp.verifier import CaseFailure, CheckReport

Q = FieldSpec.rationals()


def test_format_free_step() -> None:
    assert format_free_step(FreeStepElement.of(BhsSequence((0, 0, 4)), Q, 3)) == "3·[0,0,4]"
    assert format_free_step(FreeStepElement.of(BhsSequence((0, 2)), Q)) == "[0,2]"
    assert format_free_step(FreeStepElement.zero(Q)) == "0"
    two_terms = FreeStepElement.of(BhsSequence((1,)), Q, 2) + FreeStepElement.of(
        BhsSequence((0, 2)), Q
    )
    assert format_free_step(two_terms) == "[0,2] + 2·[1]"


def test_format_term() -> None:
    assert format_term(GammaTerm.generator("x")) == "x"
    assert format_term(GammaTerm(Composition.of(2), (0, 0), ("a",))) == "[0,0]@(2)(a)"
    nested = GammaTerm.generator(GammaTerm(Composition.of(2), (1, 1), ("x",)))
    assert format_term(nested) == "{[1,1]@(2)(x)}"


def test_format_free_gamma() -> None:
    a, b = (FreeGammaElement.generator(COM, Q, g) for g in ("a", "b"))
    assert format_free_gamma(com_product(a, b)) == "[0,0]@(1,1)(a,b)"
    assert format_free_gamma(com_product(a, a)) == "2·[0,0]@(2)(a)"
    assert format_free_gamma(FreeGammaElement.zero(COM, Q)) == "0"


def test_format_value_dispatch() -> None:
    assert format_value(reduce(3, FieldSpec.prime(5))) == "3"
    vector = GVector(YoungSubgroup.full(2), Q, "plain", {(1, 1): reduce(2, Q)})
    assert format_value(vector) == "2·[1,1]"
    assert format_value(7) == "7"


def test_format_listing() -> None:
    assert format_listing("bhs 4", ["[0,0,4]", "[0,1,1,2]"]) == "bhs 4: 2\n[0,0,4]\n[0,1,1,2]"
    assert format_listing("c_r (3)", []) == "c_r (3): 0"


def test_format_report() -> None:
    report = CheckReport(
        suite="cartan",
        field="fp:2",
        bounds={"max_index": 3},
        attempted=4,
        passed=3,
        failed=1,
        failures=[CaseFailure(case=2, relation="product", witness={"lhs": "1", "rhs": "0"})],
    )
    text = format_report(report)
    assert text.splitlines()[0] == "❌ cartan over fp:2 (max_index=3): 3/4 passed, 1 failed"
    assert "case 2 [product] lhs=1; rhs=0" in text


def test_get_status_emoji() -> None:
    assert get_status_emoji(0) == "✅"
    assert get_status_emoji(2) == "❌"
