"""Tests for structure-constant tables."""

import json
from typing import Any

from opdp.scalar import FieldSpec
from opdp.tables import StructureTable, build_table, com_table, lev_table

Q = FieldSpec.rationals()


def _row(table: StructureTable, **match: Any) -> Any:
    return next(
        row for row in table.rows if all(getattr(row, k) == v for k, v in match.items())
    )


def test_com_table() -> None:
    table = com_table(Q, 4)
    assert table.operad == "com"
    assert table.bounds == {"max_arity": 4}
    product = _row(table, operation="product", m="2", n="2")
    assert (product.coefficient_num, product.coefficient_den) == ("6", "1")
    assert product.output_key == "[0,0,0,0]@(4)(a)"
    composition = _row(table, operation="composition", m="2", n="2")
    assert composition.coefficient_num == "3"
    assert not any(
        row.operation == "composition" and (row.m, row.n) == ("3", "2") for row in table.rows
    )


def test_com_table_in_characteristic_two() -> None:
    table = com_table(FieldSpec.prime(2), 3)
    row = _row(table, operation="product", m="1", n="1")
    assert row.coefficient_num == "0"
    assert row.output_key == "[0,0]@(2)(a)"
    assert row.field == "fp:2"


def test_lev_table() -> None:
    table = lev_table(Q, 4)
    assert table.operad == "lev"
    row = _row(table, h="[1,1]", r="(2)", inputs=["[0,2]"])
    assert row.output_key == "[0,0,4]"
    assert (row.coefficient_num, row.coefficient_den) == ("3", "1")
    assert all(row.field == "q" for row in table.rows)


def test_table_json_roundtrip() -> None:
    table = build_table("com", Q, 3)
    reloaded = StructureTable.model_validate_json(table.model_dump_json())
    assert reloaded.model_dump() == table.model_dump()
    assert build_table("lev", Q, 2).operad == "lev"


def test_zero_bound_gives_an_empty_table() -> None:
    for operad in ("com", "lev"):
        table = build_table(operad, Q, 0)
        assert table.rows == []
        reloaded = StructureTable.model_validate_json(table.model_dump_json())
        assert reloaded.model_dump() == table.model_dump()


def test_table_bounds_are_decimal_strings() -> None:
    payload = json.loads(com_table(Q, 2).model_dump_json())
    assert payload["bounds"] == {"max_arity": "2"}
