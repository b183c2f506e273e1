"""Tests for the relation suites, fault injection and report serialization."""

import json
from collections.abc import Callable

import pytest
from pydantic import ValidationError

from opdp.errors import ShapeError
from opdp.scalar import FieldSpec
from opdp.setoperad import COM, LEV, SetOperad
from opdp.verifier import (
    CheckReport,
    FaultSpec,
    Instance,
    check_beta_suite,
    check_cartan_suite,
    check_gamma_suite,
    check_oracle,
    check_permrep_diagrams,
    check_roundtrip_suite,
    check_step_suite,
    run_instances,
)

Q = FieldSpec.rationals()
F2 = FieldSpec.prime(2)
F3 = FieldSpec.prime(3)


def assert_clean(report: CheckReport) -> None:
    assert report.attempted > 0
    assert report.failures == [], report.failures
    assert report.ok


@pytest.mark.parametrize("operad", [COM, LEV])
@pytest.mark.parametrize("field", [Q, F2])
def test_gamma_suite(operad: SetOperad, field: FieldSpec) -> None:
    report = check_gamma_suite(operad, field, 3)
    assert_clean(report)
    assert report.suite == "gamma"
    assert report.bounds == {"max_arity": 3}


@pytest.mark.parametrize("operad", [COM, LEV])
def test_beta_suite(operad: SetOperad) -> None:
    assert_clean(check_beta_suite(operad, Q, 3))


@pytest.mark.parametrize("field", [Q, F2, F3])
def test_step_suite_on_sequences(field: FieldSpec) -> None:
    assert_clean(check_step_suite(field, 4))


def test_step_suite_on_com() -> None:
    assert_clean(check_step_suite(Q, 3, model="com"))


@pytest.mark.parametrize("field", [Q, F2, F3])
def test_cartan_suite(field: FieldSpec) -> None:
    assert_clean(check_cartan_suite(field, 4))


def test_oracle() -> None:
    report = check_oracle(4)
    assert_clean(report)
    assert report.field == "q,fp:2,fp:3"


def test_permrep_diagrams() -> None:
    assert_clean(check_permrep_diagrams(3))


def test_roundtrip_suite() -> None:
    assert_clean(check_roundtrip_suite(LEV, Q, 3, samples=4))
    assert_clean(check_roundtrip_suite(COM, F2, 3, samples=4))


def test_same_seed_same_report() -> None:
    first = check_gamma_suite(COM, Q, 3, seed=7)
    second = check_gamma_suite(COM, Q, 3, seed=7, threads=3)
    assert first.model_dump() == second.model_dump()


def test_fault_is_detected() -> None:
    clean = check_cartan_suite(Q, 3)
    report = check_cartan_suite(Q, 3, fault=FaultSpec(case_index=2))
    assert report.attempted == clean.attempted
    assert report.failed == 1
    failure = report.failures[0]
    assert failure.case == 2
    assert "lhs" in failure.witness
    assert "rhs" in failure.witness
    assert not report.ok


@pytest.mark.parametrize("index", [0, 5])
def test_fault_index_is_reported(index: int) -> None:
    report = check_step_suite(F2, 3, fault=FaultSpec(case_index=index))
    assert [failure.case for failure in report.failures] == [index]


def test_report_json_roundtrip() -> None:
    report = check_cartan_suite(F3, 3, fault=FaultSpec(0))
    text = report.model_dump_json()
    assert "wall_time" not in text
    reloaded = CheckReport.model_validate_json(text)
    assert reloaded.model_dump() == report.model_dump()


def test_report_counts_must_add_up() -> None:
    with pytest.raises(ValidationError):
        CheckReport(suite="gamma", field="q", bounds={}, attempted=2, passed=1, failed=0)
    with pytest.raises(ValidationError):
        CheckReport(suite="gamma", field="q", bounds={}, attempted=1, passed=0, failed=1)


def test_errors_are_reported_as_failures() -> None:
    def boom() -> int:
        raise ShapeError("no such term")

    instances = [
        Instance("ok", {"case": "equal"}, lambda: 1, lambda: 1),
        Instance("broken", {"case": "raises"}, boom, lambda: 1),
        Instance("unequal", {"case": "differs"}, lambda: 1, lambda: 2),
    ]
    report = run_instances("cartan", "q", {"max_index": 1}, instances, threads=2)
    assert (report.attempted, report.passed, report.failed) == (3, 1, 2)
    assert report.failures[0].witness["error"] == "ShapeError: no such term"
    assert report.failures[1].witness["lhs"] == "1"
    assert report.failures[1].witness["rhs"] == "2"


SUITES_UNDER_FAULT: dict[str, Callable[[FaultSpec], CheckReport]] = {
    "gamma": lambda fault: check_gamma_suite(COM, Q, 3, fault=fault),
    "beta": lambda fault: check_beta_suite(LEV, Q, 3, fault=fault),
    "oracle": lambda fault: check_oracle(4, fault=fault),
    "permrep": lambda fault: check_permrep_diagrams(3, fault=fault),
    "roundtrip": lambda fault: check_roundtrip_suite(LEV, Q, 3, samples=4, fault=fault),
}


@pytest.mark.parametrize("suite", sorted(SUITES_UNDER_FAULT))
@pytest.mark.parametrize("index", [0, 3, 17])
def test_every_suite_detects_a_single_fault(suite: str, index: int) -> None:
    report = SUITES_UNDER_FAULT[suite](FaultSpec(case_index=index))
    assert report.attempted > index
    assert report.failed >= 1
    assert [failure.case for failure in report.failures] == [index]
    assert not report.ok


def test_report_numbers_are_decimal_strings() -> None:
    payload = json.loads(check_cartan_suite(Q, 2, fault=FaultSpec(1)).model_dump_json())
    assert payload["bounds"] == {"max_index": "2"}
    assert payload["failed"] == "1"
    assert payload["failures"][0]["case"] == "1"
    assert int(payload["attempted"]) == int(payload["passed"]) + 1
