"""Structure-constant tables, exported as JSON with every number written as a decimal string."""

from __future__ import annotations

import logging

from pydantic import BaseModel, Field, field_serializer

from opdp.formatting import format_term
from opdp.freegamma import FreeGammaElement, com_divided_power, com_product
from opdp.levelstep import (
    BhsSequence,
    FreeStepElement,
    census_of_composite,
    enumerate_bhs,
    enumerate_c_r,
    phi_eval_bhs,
)
from opdp.permcomb import Composition, enumerate_compositions
from opdp.scalar import FieldSpec, Scalar
from opdp.setoperad import COM

logger = logging.getLogger(__name__)


class LevRow(BaseModel):
    """φ_{h,r}(u_1, …, u_p) = coefficient · output_key on basis sequences."""

    h: str
    r: str
    inputs: list[str]
    output_key: str
    coefficient_num: str
    coefficient_den: str
    field: str


class ComRow(BaseModel):
    """γ_m(a)γ_n(a) or γ_m(γ_n(a)) as a multiple of one divided power."""

    operation: str
    m: str
    n: str
    output_key: str
    coefficient_num: str
    coefficient_den: str
    field: str


class StructureTable(BaseModel):
    operad: str
    field: str
    bounds: dict[str, int]
    rows: list[LevRow] | list[ComRow] = Field(default_factory=list)

    @field_serializer("bounds", when_used="json")
    def _bounds_as_decimal(self, bounds: dict[str, int]) -> dict[str, str]:
        return {name: str(value) for name, value in bounds.items()}


def _fraction_strings(c: Scalar) -> tuple[str, str]:
    return str(c.numerator), str(c.denominator)


def _basis_inputs(r: Composition, budget: int) -> list[tuple[BhsSequence, ...]]:
    if r.p == 0:
        return [()]
    found = []
    for m in range(1, budget // r[0] + 1):
        for u in enumerate_bhs(m):
            rest = Composition(r.parts[1:])
            for tail in _basis_inputs(rest, budget - r[0] * m):
                found.append((u, *tail))
    return found


def lev_table(field: FieldSpec, max_degree: int, max_parts: int = 3) -> StructureTable:
    """Every φ_{h,r} on basis sequences with Σ r_i |u_i| ≤ max_degree, in a fixed order."""
    rows: list[LevRow] = []
    for n in range(1, max_degree + 1):
        for p in range(1, min(n, max_parts) + 1):
            for r in enumerate_compositions(n, p):
                if 0 in r.parts:
                    continue
                for step in enumerate_c_r(r):
                    for us in _basis_inputs(r, max_degree):
                        value = phi_eval_bhs(step, [FreeStepElement.of(u, field) for u in us])
                        key = census_of_composite(step, us)
                        num, den = _fraction_strings(value.terms.get(key, field.zero()))
                        rows.append(
                            LevRow(
                                h="[" + ",".join(map(str, step.h)) + "]",
                                r=str(r),
                                inputs=[str(u) for u in us],
                                output_key=str(key),
                                coefficient_num=num,
                                coefficient_den=den,
                                field=str(field),
                            )
                        )
    logger.info("Built lev table over %s: %d rows", field, len(rows))
    return StructureTable(
        operad="lev", field=str(field), bounds={"max_degree": max_degree}, rows=rows
    )


def _single_term_row(operation: str, m: int, n: int, value: FreeGammaElement) -> ComRow:
    (term, c), = value.sorted_terms()
    num, den = _fraction_strings(c)
    return ComRow(
        operation=operation,
        m=str(m),
        n=str(n),
        output_key=format_term(term),
        coefficient_num=num,
        coefficient_den=den,
        field=str(value.field),
    )


def com_table(field: FieldSpec, max_arity: int) -> StructureTable:
    """Cartan products γ_mγ_n with m + n ≤ max_arity and compositions γ_m∘γ_n with mn ≤ max_arity.

    Coefficients that vanish in the field are reported as zero against γ_{m+n} or γ_{mn}.
    """
    a = FreeGammaElement.generator(COM, field, "a")
    rows: list[ComRow] = []
    for m in range(1, max_arity + 1):
        for n in range(1, max_arity + 1):
            if m + n <= max_arity:
                value = com_product(com_divided_power(m, a), com_divided_power(n, a))
                rows.append(_com_row("product", m, n, m + n, value, a))
            if m * n <= max_arity:
                value = com_divided_power(m, com_divided_power(n, a))
                rows.append(_com_row("composition", m, n, m * n, value, a))
    logger.info("Built com table over %s: %d rows", field, len(rows))
    return StructureTable(
        operad="com", field=str(field), bounds={"max_arity": max_arity}, rows=rows
    )


def _com_row(
    operation: str, m: int, n: int, k: int, value: FreeGammaElement, a: FreeGammaElement
) -> ComRow:
    if value.is_zero():
        (term, _), = com_divided_power(k, a).sorted_terms()
        return ComRow(
            operation=operation,
            m=str(m),
            n=str(n),
            output_key=format_term(term),
            coefficient_num="0",
            coefficient_den="1",
            field=str(value.field),
        )
    return _single_term_row(operation, m, n, value)


def build_table(operad: str, field: FieldSpec, bound: int) -> StructureTable:
    if operad == "com":
        return com_table(field, bound)
    return lev_table(field, bound)
