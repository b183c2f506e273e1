"""Relation suites: every defining identity instantiated on free-algebra inputs and checked exactly.

A suite is a list of :class:`Instance` objects (a relation name, a text description of the
inputs, and two deferred sides). :func:`run_instances` evaluates them, optionally corrupting one
coefficient of a chosen case, and folds the outcomes into a :class:`CheckReport`.
"""

from __future__ import annotations

import itertools
import logging
import math
import random
import time
from collections.abc import Callable, Iterator, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Literal

from pydantic import BaseModel, Field, field_serializer, model_validator

from opdp.cache import memoized
from opdp.errors import OpdpError
from opdp.formatting import format_value
from opdp.freegamma import (
    FreeGammaElement,
    GammaTerm,
    SchurElement,
    beta_eval,
    com_divided_power,
    com_power,
    com_product,
    eta,
    gamma_eval,
    map_generators,
    terms_in_arity,
    tilde_mu_element,
    trace_map,
)
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
    phi_eval,
    phi_eval_bhs,
    phi_from_theta,
    s7_prefactor,
    star,
    theta_from_phi,
)
from opdp.permcomb import (
    Composition,
    Labels,
    Permutation,
    diamond,
    enumerate_compositions,
    enumerate_partitions,
    find_transporter,
    iota,
    triangle,
)
from opdp.permrep import (
    GVector,
    coset_sum,
    compose_tensor,
    ind,
    mu_prime,
    o_inverse,
    o_map,
    orbit_representatives,
    res,
    wreath_of,
)
from opdp.scalar import FieldSpec, Scalar, binomial, index_ratio, reduce
from opdp.setoperad import COM, LEV, LevElement, SetOperad, lev_orbit_representatives
from opdp.symaction import (
    WreathShape,
    YoungSubgroup,
    block_permutation,
    label_orbit,
    permuted_composition,
)

logger = logging.getLogger(__name__)

SuiteId = Literal["beta", "gamma", "step", "cartan", "permrep-diagrams", "oracle", "roundtrip"]
SUITES: tuple[str, ...] = (
    "beta",
    "gamma",
    "step",
    "cartan",
    "permrep-diagrams",
    "oracle",
    "roundtrip",
)
ORACLE_FIELDS = (FieldSpec.rationals(), FieldSpec.prime(2), FieldSpec.prime(3))
MAX_PARTS = 3


class CaseFailure(BaseModel):
    case: int
    relation: str
    witness: dict[str, str]

    @field_serializer("case", when_used="json")
    def _case_as_decimal(self, case: int) -> str:
        return str(case)


class CheckCase(BaseModel):
    """Outcome of one relation instance."""

    suite: SuiteId
    index: int
    relation: str
    instance: dict[str, str]
    passed: bool
    witness: dict[str, str] | None = None


class CheckReport(BaseModel):
    """Counts and failures of one suite run.

    JSON carries every number as a decimal string. Wall time is logged, never serialized.
    """

    suite: SuiteId
    field: str
    bounds: dict[str, int]
    attempted: int = 0
    passed: int = 0
    failed: int = 0
    failures: list[CaseFailure] = Field(default_factory=list)
    wall_time: float = Field(default=0.0, exclude=True)

    @field_serializer("attempted", "passed", "failed", when_used="json")
    def _count_as_decimal(self, count: int) -> str:
        return str(count)

    @field_serializer("bounds", when_used="json")
    def _bounds_as_decimal(self, bounds: dict[str, int]) -> dict[str, str]:
        return {name: str(value) for name, value in bounds.items()}

    @model_validator(mode="after")
    def _counts_add_up(self) -> CheckReport:
        if self.attempted != self.passed + self.failed:
            raise ValueError(
                f"attempted={self.attempted} but passed={self.passed}, failed={self.failed}"
            )
        if len(self.failures) != self.failed:
            raise ValueError(f"{self.failed} failed cases but {len(self.failures)} witnesses")
        return self

    @property
    def ok(self) -> bool:
        return self.failed == 0


@dataclass
class Instance:
    relation: str
    describe: dict[str, str]
    lhs: Callable[[], Any]
    rhs: Callable[[], Any]


@dataclass(frozen=True)
class FaultSpec:
    """Add ``delta`` to the smallest coefficient of the left-hand side of case ``case_index``."""

    case_index: int
    delta: int = 1


def _perturb(value: Any, delta: int) -> Any:
    if isinstance(value, FreeGammaElement):
        out = value.copy()
        term = min(out.terms) if out.terms else GammaTerm.generator("x")
        out.add_term(term, reduce(delta, value.field))
        return out
    if isinstance(value, FreeStepElement):
        out_step = value.copy()
        u = min(out_step.terms) if out_step.terms else BhsSequence.unit()
        out_step.add_term(u, reduce(delta, value.field))
        return out_step
    if isinstance(value, GVector):
        key = min(value.terms) if value.terms else (0,) * value.group.degree
        out_vector = GVector(value.group, value.field, value.mode, dict(value.terms))
        out_vector.add_term(key, reduce(delta, value.field))
        return out_vector
    return value + delta


def run_instances(
    suite: SuiteId,
    field: str,
    bounds: dict[str, int],
    instances: Sequence[Instance],
    *,
    threads: int = 1,
    fault: FaultSpec | None = None,
) -> CheckReport:
    """Evaluate every instance, in parallel when ``threads`` > 1, and build the report."""
    start = time.perf_counter()
    logger.info(
        "Running %s suite: %d cases over %s, bounds %s", suite, len(instances), field, bounds
    )

    def evaluate(item: tuple[int, Instance]) -> CheckCase:
        index, instance = item
        witness = None
        try:
            lhs = instance.lhs()
            rhs = instance.rhs()
            if fault is not None and fault.case_index == index:
                lhs = _perturb(lhs, fault.delta)
            passed = lhs == rhs
            if not passed:
                witness = {**instance.describe, "lhs": format_value(lhs), "rhs": format_value(rhs)}
        except OpdpError as e:
            passed = False
            witness = {**instance.describe, "error": f"{type(e).__name__}: {e}"}
        return CheckCase(
            suite=suite,
            index=index,
            relation=instance.relation,
            instance=instance.describe,
            passed=passed,
            witness=witness,
        )

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        cases = sorted(pool.map(evaluate, enumerate(instances)), key=lambda c: c.index)

    failures = [
        CaseFailure(case=c.index, relation=c.relation, witness=c.witness or {})
        for c in cases
        if not c.passed
    ]
    for failure in failures:
        logger.warning("Case %d (%s) failed: %s", failure.case, failure.relation, failure.witness)
    report = CheckReport(
        suite=suite,
        field=field,
        bounds=bounds,
        attempted=len(cases),
        passed=len(cases) - len(failures),
        failed=len(failures),
        failures=failures,
        wall_time=time.perf_counter() - start,
    )
    logger.info(
        "Suite %s finished: %d attempted, %d passed, %d failed in %.2fs",
        suite,
        report.attempted,
        report.passed,
        report.failed,
        report.wall_time,
    )
    return report


def _later(
    func: Callable[..., Any], *args: Any, factor: Scalar | int | None = None
) -> Callable[[], Any]:
    def run() -> Any:
        value = func(*args)
        return value if factor is None else value.scale(factor)

    return run


def _total(thunks: Sequence[Callable[[], Any]], zero: Any) -> Callable[[], Any]:
    def run() -> Any:
        out = zero
        for thunk in thunks:
            out = out + thunk()
        return out

    return run


def _positive_compositions(n: int, max_parts: int = MAX_PARTS) -> list[Composition]:
    return [
        r
        for p in range(1, min(n, max_parts) + 1)
        for r in enumerate_compositions(n, p)
        if 0 not in r.parts
    ]


def _classes(operad: SetOperad, r: Composition) -> tuple[Labels, ...]:
    return orbit_representatives(operad.enumerate(r.n), YoungSubgroup.of(r))


def _non_identity(p: int) -> Iterator[Permutation]:
    for images in itertools.permutations(range(1, p + 1)):
        rho = Permutation(images)
        if not rho.is_identity():
            yield rho


def _split_first(r: Composition) -> Iterator[tuple[int, Composition]]:
    """(l, r ∘_1 (l, r_1 − l)) for every l, zero parts included."""
    for l in range(r[0] + 1):  # noqa: E741
        yield l, r.compose_at(1, Composition((l, r[0] - l)))


@memoized("inner_options")
def _inner_options(
    operad: SetOperad, max_arity: int
) -> tuple[tuple[Composition, Labels], ...]:
    return tuple(
        (q, y)
        for m in range(1, max_arity + 1)
        for q in _positive_compositions(m, 2)
        for y in _classes(operad, q)
    )


def _inner_choices(
    operad: SetOperad, r: Composition, budget: int
) -> Iterator[tuple[tuple[Composition, Labels], ...]]:
    """Inner (q_i, x_i) for every block of r with Σ r_i |q_i| ≤ budget."""
    options = _inner_options(operad, budget)
    for choice in itertools.product(options, repeat=r.p):
        if sum(r_i * q.n for r_i, (q, _) in zip(r, choice)) <= budget:
            yield choice


def _gamma_composition_rhs(
    operad: SetOperad,
    x: Labels,
    r: Composition,
    inner: Sequence[tuple[Composition, Labels]],
    flat: Sequence[FreeGammaElement],
) -> FreeGammaElement:
    slots = [y for (_, y), r_i in zip(inner, r) for _ in range(r_i)]
    composite = operad.full_compose(x, slots)
    partition = diamond(r, [iota(q) for q, _ in inner])
    sizes = partition.sizes()
    denominator = YoungSubgroup.of(r).label_stabilizer_order(x)
    for (q, y), r_i in zip(inner, r):
        denominator *= YoungSubgroup.of(q).label_stabilizer_order(y) ** r_i
    coefficient = index_ratio(
        YoungSubgroup(partition).label_stabilizer_order(composite), denominator
    )
    tau = find_transporter(partition, iota(sizes))
    target = YoungSubgroup.of(sizes).canonical_labels(tau.act_labels(composite))
    return gamma_eval(operad, target, sizes, flat).scale(coefficient)


def _sum_of_generators(operad: SetOperad, f: FieldSpec, names: Sequence[str]) -> FreeGammaElement:
    out = FreeGammaElement.zero(operad, f)
    for g in names:
        out = out + FreeGammaElement.generator(operad, f, g)
    return out


def _random_combination(
    rng: random.Random, operad: SetOperad, f: FieldSpec, names: Sequence[str]
) -> FreeGammaElement:
    out = FreeGammaElement.zero(operad, f)
    for g in names:
        out = out + FreeGammaElement.generator(operad, f, g).scale(rng.randint(1, 4))
    return out


def _sample_elements(
    rng: random.Random, operad: SetOperad, f: FieldSpec, max_arity: int, count: int = 4
) -> list[FreeGammaElement]:
    """Basis terms on two generators, plus a few seeded random combinations of them."""
    basis = [
        FreeGammaElement.of_term(operad, f, t)
        for n in range(1, max_arity + 1)
        for t in terms_in_arity(operad, ["a", "b"], n)
    ]
    mixed = []
    for _ in range(count):
        out = FreeGammaElement.zero(operad, f)
        for element in rng.sample(basis, min(3, len(basis))):
            out = out + element.scale(rng.randint(1, 5))
        mixed.append(out)
    return basis + mixed


def _gamma_instances(
    operad: SetOperad, f: FieldSpec, max_arity: int, rng: random.Random
) -> Iterator[Instance]:
    def gen(g: str) -> FreeGammaElement:
        return FreeGammaElement.generator(operad, f, g)

    for a in _sample_elements(rng, operad, f, max_arity):
        yield Instance(
            "unit",
            {"operad": operad.name, "args": format_value(a)},
            _later(gamma_eval, operad, operad.unit(), Composition((1,)), [a]),
            _later(lambda a=a: a),
        )

    for n in range(1, max_arity + 1):
        for r in _positive_compositions(n):
            names = [f"a{i}" for i in range(1, r.p + 1)]
            args = [gen(g) for g in names]
            for x in _classes(operad, r):
                describe = {
                    "operad": operad.name,
                    "x": operad.render(x),
                    "r": str(r),
                    "args": ",".join(names),
                }
                base = _later(gamma_eval, operad, x, r, args)

                for rho in _non_identity(r.p):
                    moved = permuted_composition(rho, r)
                    y = YoungSubgroup.of(moved).canonical_labels(
                        block_permutation(rho, r).act_labels(x)
                    )
                    yield Instance(
                        "permutation",
                        {**describe, "rho": str(rho)},
                        _later(gamma_eval, operad, y, moved, list(rho.permute(args))),
                        base,
                    )

                yield Instance(
                    "zero_part",
                    describe,
                    _later(
                        gamma_eval, operad, x, Composition((0, *r.parts)), [gen("a0"), *args]
                    ),
                    base,
                )

                lam = rng.randint(2, 6)
                mixed = _random_combination(rng, operad, f, ["b1", "b2"])
                rest = args[1:]
                yield Instance(
                    "homogeneity",
                    {**describe, "lambda": str(lam), "a1": format_value(mixed)},
                    _later(gamma_eval, operad, x, r, [mixed.scale(lam), *rest]),
                    _later(gamma_eval, operad, x, r, [mixed, *rest], factor=lam ** r[0]),
                )

                for s in range(1, r.p):
                    for q in _positive_compositions(r.p, s):
                        merged = triangle(iota(q), iota(r)).sizes()
                        coarse = YoungSubgroup.of(merged)
                        ratio = index_ratio(
                            coarse.label_stabilizer_order(x),
                            YoungSubgroup.of(r).label_stabilizer_order(x),
                        )
                        repeated = [args[j] for j, part in enumerate(q) for _ in range(part)]
                        adjacent = q.parts == (2,) + (1,) * (r.p - 2)
                        yield Instance(
                            "repetition_adjacent" if adjacent else "repetition",
                            {**describe, "q": str(q)},
                            _later(gamma_eval, operad, x, r, repeated),
                            _later(
                                gamma_eval,
                                operad,
                                coarse.canonical_labels(x),
                                merged,
                                args[: q.p],
                                factor=ratio,
                            ),
                        )

                pieces = [gen("b1"), gen("b2")]
                orbit = label_orbit(x, YoungSubgroup.of(r))
                split_terms = []
                for _, finer in _split_first(r):
                    young = YoungSubgroup.of(finer)
                    for y in sorted({young.canonical_labels(z) for z in orbit}):
                        split_terms.append(_later(gamma_eval, operad, y, finer, [*pieces, *rest]))
                yield Instance(
                    "additivity",
                    {**describe, "a1": "b1+b2"},
                    _later(gamma_eval, operad, x, r, [pieces[0] + pieces[1], *rest]),
                    _total(split_terms, FreeGammaElement.zero(operad, f)),
                )

                if r.p > 2:
                    continue
                for inner in _inner_choices(operad, r, max_arity):
                    inner_names = [
                        [f"c{i}{j}" for j in range(1, q.p + 1)]
                        for i, (q, _) in enumerate(inner, start=1)
                    ]
                    inner_args = [[gen(g) for g in group] for group in inner_names]
                    flat = [a for group in inner_args for a in group]
                    yield Instance(
                        "composition",
                        {
                            **describe,
                            "inner": "; ".join(
                                f"{operad.render(y)}@{q}" for q, y in inner
                            ),
                        },
                        _later(
                            lambda x=x, r=r, inner=inner, inner_args=inner_args: gamma_eval(
                                operad,
                                x,
                                r,
                                [
                                    gamma_eval(operad, y, q, group)
                                    for (q, y), group in zip(inner, inner_args)
                                ],
                            )
                        ),
                        _later(_gamma_composition_rhs, operad, x, r, inner, flat),
                    )


def check_gamma_suite(
    operad: SetOperad,
    field: FieldSpec,
    max_arity: int,
    *,
    seed: int = 0,
    threads: int = 1,
    fault: FaultSpec | None = None,
) -> CheckReport:
    """Permutation, zero part, homogeneity, repetition, additivity, unit and composition
    relations of the γ operations on a free Γ(P)-algebra."""
    instances = list(_gamma_instances(operad, field, max_arity, random.Random(seed)))
    return run_instances(
        "gamma",
        str(field),
        {"max_arity": max_arity},
        instances,
        threads=threads,
        fault=fault,
    )


def orbit_vector(x: Labels, r: Composition, f: FieldSpec) -> GVector:
    """𝒪_{Σ_r}([x]): the invariant orbit sum."""
    return o_map(GVector.basis(x, YoungSubgroup.of(r), f))


def _regroup(w: GVector, r: Composition) -> GVector:
    return GVector(YoungSubgroup.of(r), w.field, "invariant", dict(w.terms))


def _beta_composition_rhs(
    operad: SetOperad,
    w: GVector,
    r: Composition,
    inner: Sequence[tuple[Composition, GVector]],
    flat: Sequence[FreeGammaElement],
) -> FreeGammaElement:
    slots = [v.terms for (_, v), r_i in zip(inner, r) for _ in range(r_i)]
    wreath = WreathShape(r, tuple(q for q, _ in inner))
    composed = GVector(wreath, w.field, "invariant", compose_tensor(operad, w.terms, slots))
    partition = wreath.coarse_partition()
    summed = coset_sum(composed, YoungSubgroup(partition))
    sizes = partition.sizes()
    tau = find_transporter(partition, iota(sizes))
    moved = GVector(
        YoungSubgroup.of(sizes),
        w.field,
        "invariant",
        {tau.act_labels(y): c for y, c in summed.terms.items()},
    )
    return beta_eval(operad, moved, sizes, flat)


def _beta_instances(
    operad: SetOperad, f: FieldSpec, max_arity: int, rng: random.Random
) -> Iterator[Instance]:
    def gen(g: str) -> FreeGammaElement:
        return FreeGammaElement.generator(operad, f, g)

    unit = orbit_vector(operad.unit(), Composition((1,)), f)
    for a in _sample_elements(rng, operad, f, max_arity):
        yield Instance(
            "unit",
            {"operad": operad.name, "args": format_value(a)},
            _later(beta_eval, operad, unit, Composition((1,)), [a]),
            _later(lambda a=a: a),
        )

    for n in range(1, max_arity + 1):
        for r in _positive_compositions(n):
            names = [f"a{i}" for i in range(1, r.p + 1)]
            args = [gen(g) for g in names]
            rest = args[1:]
            classes = _classes(operad, r)
            if len(classes) >= 2:
                lam = rng.randint(2, 6)
                first, second = (orbit_vector(x, r, f) for x in classes[:2])
                yield Instance(
                    "linearity",
                    {"operad": operad.name, "r": str(r), "lambda": str(lam)},
                    _later(beta_eval, operad, first.scale(lam) + second, r, args),
                    _later(
                        lambda first=first, second=second, r=r, args=args, lam=lam: beta_eval(
                            operad, first, r, args
                        ).scale(lam)
                        + beta_eval(operad, second, r, args)
                    ),
                )
            for x in classes:
                w = orbit_vector(x, r, f)
                describe = {
                    "operad": operad.name,
                    "w": f"O({operad.render(x)})",
                    "r": str(r),
                    "args": ",".join(names),
                }
                base = _later(beta_eval, operad, w, r, args)

                yield Instance(
                    "translation", describe, base, _later(gamma_eval, operad, x, r, args)
                )

                for rho in _non_identity(r.p):
                    moved = permuted_composition(rho, r)
                    star_rho = block_permutation(rho, r)
                    w_moved = GVector(
                        YoungSubgroup.of(moved),
                        f,
                        "invariant",
                        {star_rho.act_labels(y): c for y, c in w.terms.items()},
                    )
                    yield Instance(
                        "permutation",
                        {**describe, "rho": str(rho)},
                        _later(beta_eval, operad, w_moved, moved, list(rho.permute(args))),
                        base,
                    )

                padded = Composition((0, *r.parts))
                yield Instance(
                    "zero_part",
                    describe,
                    _later(beta_eval, operad, _regroup(w, padded), padded, [gen("a0"), *args]),
                    base,
                )

                lam = rng.randint(2, 6)
                mixed = _random_combination(rng, operad, f, ["b1", "b2"])
                yield Instance(
                    "homogeneity",
                    {**describe, "lambda": str(lam), "a1": format_value(mixed)},
                    _later(beta_eval, operad, w, r, [mixed.scale(lam), *rest]),
                    _later(beta_eval, operad, w, r, [mixed, *rest], factor=lam ** r[0]),
                )

                for s in range(1, r.p):
                    for q in _positive_compositions(r.p, s):
                        merged = triangle(iota(q), iota(r)).sizes()
                        repeated = [args[j] for j, part in enumerate(q) for _ in range(part)]
                        yield Instance(
                            "repetition",
                            {**describe, "q": str(q)},
                            _later(beta_eval, operad, w, r, repeated),
                            _later(
                                beta_eval,
                                operad,
                                coset_sum(w, YoungSubgroup.of(merged)),
                                merged,
                                args[: q.p],
                            ),
                        )

                pieces = [gen("b1"), gen("b2")]
                yield Instance(
                    "additivity",
                    {**describe, "a1": "b1+b2"},
                    _later(beta_eval, operad, w, r, [pieces[0] + pieces[1], *rest]),
                    _total(
                        [
                            _later(beta_eval, operad, _regroup(w, finer), finer, [*pieces, *rest])
                            for _, finer in _split_first(r)
                        ],
                        FreeGammaElement.zero(operad, f),
                    ),
                )

                if r.p <= 2:
                    sums = [[f"b{i}1", f"b{i}2"] for i in range(1, r.p + 1)]
                    split_terms = [
                        _later(
                            beta_eval,
                            operad,
                            _regroup(w, finer),
                            finer,
                            [gen(g) for group in sums for g in group],
                        )
                        for finer in _multi_splits(r)
                    ]
                    yield Instance(
                        "multi_additivity",
                        {**describe, "args": " ; ".join("+".join(group) for group in sums)},
                        _later(
                            beta_eval,
                            operad,
                            w,
                            r,
                            [_sum_of_generators(operad, f, group) for group in sums],
                        ),
                        _total(split_terms, FreeGammaElement.zero(operad, f)),
                    )

                if r.p > 2:
                    continue
                for inner in _inner_choices(operad, r, max_arity):
                    inner_vectors = [(q, orbit_vector(y, q, f)) for q, y in inner]
                    inner_args = [
                        [gen(f"c{i}{j}") for j in range(1, q.p + 1)]
                        for i, (q, _) in enumerate(inner, start=1)
                    ]
                    flat = [a for group in inner_args for a in group]
                    yield Instance(
                        "composition",
                        {
                            **describe,
                            "inner": "; ".join(f"O({operad.render(y)})@{q}" for q, y in inner),
                        },
                        _later(
                            lambda w=w, r=r, vectors=inner_vectors, groups=inner_args: beta_eval(
                                operad,
                                w,
                                r,
                                [
                                    beta_eval(operad, v, q, group)
                                    for (q, v), group in zip(vectors, groups)
                                ],
                            )
                        ),
                        _later(_beta_composition_rhs, operad, w, r, inner_vectors, flat),
                    )


def _multi_splits(r: Composition) -> list[Composition]:
    """r ∘ (k_1, …, k_p) for every k_i ∈ Comp_2(r_i)."""
    per_part = [enumerate_compositions(part, 2) for part in r]
    return [
        Composition(tuple(v for k in choice for v in k.parts))
        for choice in itertools.product(*per_part)
    ]


def check_beta_suite(
    operad: SetOperad,
    field: FieldSpec,
    max_arity: int,
    *,
    seed: int = 0,
    threads: int = 1,
    fault: FaultSpec | None = None,
) -> CheckReport:
    """Relations of the β operations, indexed by invariant vectors, plus β_{𝒪[x]} = γ_{[x]}."""
    instances = list(_beta_instances(operad, field, max_arity, random.Random(seed)))
    return run_instances(
        "beta",
        str(field),
        {"max_arity": max_arity},
        instances,
        threads=threads,
        fault=fault,
    )


StepArg = FreeStepElement | FreeGammaElement
Pool = list[tuple[StepArg, int]]


def _bhs_pool(f: FieldSpec, max_degree: int) -> Pool:
    return [
        (FreeStepElement.of(u, f), m)
        for m in range(1, max_degree + 1)
        for u in enumerate_bhs(m)
    ]


def _com_pool(f: FieldSpec) -> Pool:
    a, b = (FreeGammaElement.generator(COM, f, g) for g in ("a", "b"))
    return [(a, 1), (b, 1), (com_product(a, b), 2)]


def _arg_tuples(
    pool: Pool, r: Composition, budget: int
) -> Iterator[tuple[tuple[StepArg, int], ...]]:
    def extend(i: int, left: int) -> Iterator[tuple[tuple[StepArg, int], ...]]:
        if i == r.p:
            yield ()
            return
        for item in pool:
            cost = r[i] * item[1]
            if cost <= left:
                for tail in extend(i + 1, left - cost):
                    yield (item, *tail)

    return extend(0, budget)


def _unit_step() -> StepFunction:
    return StepFunction((0,), Composition((1,)))


def _step_instances(
    phi: Callable[[StepFunction, Sequence[Any]], Any],
    pool: Pool,
    small_pool: Pool,
    zero: Any,
    max_degree: int,
    rng: random.Random,
) -> Iterator[Instance]:
    for a, _ in pool:
        yield Instance(
            "unit",
            {"args": format_value(a)},
            _later(phi, _unit_step(), [a]),
            _later(lambda a=a: a),
        )

    for n in range(1, max_degree + 1):
        for r in _positive_compositions(n):
            steps = enumerate_c_r(r)
            if not steps:
                continue
            for chosen in _arg_tuples(pool, r, max_degree):
                args = [a for a, _ in chosen]
                rest = args[1:]
                text = " ; ".join(format_value(a) for a in args)
                for step in steps:
                    describe = {"step": str(step), "args": text}
                    base = _later(phi, step, args)

                    for rho in _non_identity(r.p):
                        moved = StepFunction(
                            block_permutation(rho, r).act_labels(step.h),
                            permuted_composition(rho, r),
                        )
                        yield Instance(
                            "permutation",
                            {**describe, "rho": str(rho)},
                            _later(phi, moved, list(rho.permute(args))),
                            base,
                        )

                    padded = StepFunction(step.h, Composition((0, *r.parts)))
                    yield Instance(
                        "zero_part", describe, _later(phi, padded, [pool[0][0], *args]), base
                    )

                    lam = rng.randint(2, 6)
                    yield Instance(
                        "homogeneity",
                        {**describe, "lambda": str(lam)},
                        _later(phi, step, [args[0].scale(lam), *rest]),
                        _later(phi, step, args, factor=lam ** r[0]),
                    )

                    for l, finer in _split_first(r):  # noqa: E741
                        if 0 < l < r[0]:
                            yield Instance(
                                "repetition",
                                {**describe, "split": str(finer)},
                                _later(phi, step, args, factor=binomial(r[0], l)),
                                _later(phi, step.refine(finer), [args[0], *args]),
                            )

                    same = [b for b, m in pool if m == chosen[0][1]]
                    other = rng.choice(same)
                    yield Instance(
                        "additivity",
                        {**describe, "b": format_value(other)},
                        _later(phi, step, [args[0] + other, *rest]),
                        _total(
                            [
                                _later(phi, step.refine(finer), [args[0], other, *rest])
                                for _, finer in _split_first(r)
                            ],
                            zero,
                        ),
                    )

    options = _inner_step_options(small_pool, max_degree)
    for n in range(1, max_degree + 1):
        for r in _positive_compositions(n, 2):
            for step in enumerate_c_r(r):
                yield from _composition_instances(phi, step, options, max_degree)


def _inner_step_options(
    pool: Pool, budget: int
) -> list[tuple[StepFunction, list[StepArg], int]]:
    found = []
    for m in range(1, budget + 1):
        for q in _positive_compositions(m, 2):
            for inner in enumerate_c_r(q):
                for chosen in _arg_tuples(pool, q, budget):
                    degree = sum(q_j * d for q_j, (_, d) in zip(q, chosen))
                    found.append((inner, [a for a, _ in chosen], degree))
    return found


def _composition_instances(
    phi: Callable[[StepFunction, Sequence[Any]], Any],
    step: StepFunction,
    options: Sequence[tuple[StepFunction, list[StepArg], int]],
    max_degree: int,
) -> Iterator[Instance]:
    for choice in itertools.product(options, repeat=step.r.p):
        if sum(r_i * degree for r_i, (_, _, degree) in zip(step.r, choice)) > max_degree:
            continue
        inner = [g for g, _, _ in choice]
        groups = [args for _, args, _ in choice]
        flat = [a for group in groups for a in group]
        prefactor = s7_prefactor(step.r, [g.r for g in inner])
        yield Instance(
            "composition",
            {
                "step": str(step),
                "inner": " ; ".join(str(g) for g in inner),
                "args": " | ".join(" ; ".join(format_value(a) for a in group) for group in groups),
            },
            _later(
                lambda inner=inner, groups=groups: phi(
                    step, [phi(g, group) for g, group in zip(inner, groups)]
                )
            ),
            _later(phi, composite_step(step, inner), flat, factor=prefactor),
        )


def _dictionary_instances(
    f: FieldSpec, pool: Pool, small_pool: Pool, max_degree: int
) -> Iterator[Instance]:
    for u in (u for m in range(1, max_degree + 1) for u in enumerate_bhs(m)):
        yield Instance(
            "generator_lemma",
            {"u": str(u)},
            _later(bhs_from_generator, u, f),
            _later(FreeStepElement.of, u, f),
        )

    unary = StepFunction((1, 1), Composition((2,)))
    binary = StepFunction((1, 1), Composition((1, 1)))
    for (a, m), (b, k) in itertools.product(pool, repeat=2):
        if m + k > max_degree:
            continue
        describe = {"a": format_value(a), "b": format_value(b)}
        yield Instance(
            "star_as_phi", describe, _later(star, a, b), _later(phi_eval_bhs, binary, [a, b])
        )
        yield Instance("star_commutes", describe, _later(star, a, b), _later(star, b, a))
        if a == b and 2 * m <= max_degree:
            yield Instance(
                "divided_square",
                describe,
                _later(star, a, a),
                _later(phi_eval_bhs, unary, [a], factor=2),
            )
    for chosen in itertools.product(small_pool, repeat=4):
        if sum(d for _, d in chosen) > max_degree:
            continue
        a, b, c, d = (e for e, _ in chosen)
        yield Instance(
            "exchange",
            {"args": " ; ".join(format_value(e) for e, _ in chosen)},
            _later(lambda a=a, b=b, c=c, d=d: star(star(a, b), star(c, d))),
            _later(lambda a=a, b=b, c=c, d=d: star(star(a, c), star(b, d))),
        )

    for n in range(1, max_degree + 1):
        for r in _positive_compositions(n, 2):
            for chosen in _arg_tuples(small_pool, r, max_degree):
                args = [a for a, _ in chosen]
                text = " ; ".join(format_value(a) for a in args)
                for step in enumerate_c_r(r):
                    yield Instance(
                        "phi_from_theta",
                        {"step": str(step), "args": text},
                        _later(phi_from_theta, step, args, phi_eval_bhs),
                        _later(phi_eval_bhs, step, args),
                    )
                for x in _classes(LEV, r):
                    yield Instance(
                        "theta_from_phi",
                        {"element": LEV.render(x), "r": str(r), "args": text},
                        _later(theta_from_phi, LevElement(x), r, args, phi_eval_bhs),
                        _later(
                            lambda x=x, r=r, args=args: gamma_to_bhs(
                                gamma_eval(LEV, x, r, [bhs_to_gamma(a) for a in args])
                            )
                        ),
                    )


def check_step_suite(
    field: FieldSpec,
    max_degree: int,
    *,
    model: Literal["bhs", "com"] = "bhs",
    seed: int = 0,
    threads: int = 1,
    fault: FaultSpec | None = None,
) -> CheckReport:
    """The step-operation relations on 𝔽[BHS] (closed form) or on a free Γ(Com)-algebra
    (pullback along Lev → Com), plus the θ/φ dictionary and level-product identities on 𝔽[BHS]."""
    rng = random.Random(seed)
    if model == "bhs":
        pool = _bhs_pool(field, max_degree)
        small = _bhs_pool(field, min(2, max_degree))
        instances = list(
            _step_instances(
                phi_eval_bhs, pool, small, FreeStepElement.zero(field), max_degree, rng
            )
        )
        instances.extend(_dictionary_instances(field, pool, small, max_degree))
    else:
        pool = _com_pool(field)
        instances = list(
            _step_instances(
                com_pullback, pool, pool[:2], FreeGammaElement.zero(COM, field), max_degree, rng
            )
        )
    return run_instances(
        "step",
        str(field),
        {"max_degree": max_degree},
        instances,
        threads=threads,
        fault=fault,
    )


def _cartan_instances(f: FieldSpec, max_index: int, rng: random.Random) -> Iterator[Instance]:
    a, b = (FreeGammaElement.generator(COM, f, g) for g in ("a", "b"))
    ab = com_product(a, b)

    def divided(n: int, element: FreeGammaElement) -> Callable[[], FreeGammaElement]:
        return _later(com_divided_power, n, element)

    yield Instance(
        "commutativity",
        {"args": "a ; b"},
        _later(com_product, a, b),
        _later(com_product, b, a),
    )
    yield Instance(
        "associativity",
        {"args": "a ; a ; b"},
        _later(com_product, com_product(a, a), b),
        _later(com_product, a, ab),
    )
    for element in (a, a + b, ab):
        yield Instance(
            "unit", {"a": format_value(element)}, divided(1, element), _later(lambda e=element: e)
        )

    for n in range(1, max_index + 1):
        lam = rng.randint(2, 6)
        yield Instance(
            "homogeneity",
            {"n": str(n), "lambda": str(lam)},
            divided(n, a.scale(lam)),
            _later(com_divided_power, n, a, factor=lam**n),
        )

        def split_sum(n: int = n) -> FreeGammaElement:
            out = com_divided_power(n, a) + com_divided_power(n, b)
            for l in range(1, n):  # noqa: E741
                out = out + com_product(com_divided_power(l, a), com_divided_power(n - l, b))
            return out

        yield Instance("additivity", {"n": str(n), "a": "a+b"}, divided(n, a + b), split_sum)

        yield Instance(
            "product_of_divided_powers",
            {"n": str(n), "a": "ab"},
            divided(n, ab),
            _later(
                lambda n=n: com_product(com_divided_power(n, a), com_divided_power(n, b)),
                factor=math.factorial(n),
            ),
        )
        yield Instance(
            "power_times_divided_power",
            {"n": str(n), "a": "ab"},
            divided(n, ab),
            _later(lambda n=n: com_product(com_power(a, n), com_divided_power(n, b))),
        )
        yield Instance(
            "divided_power_times_power",
            {"n": str(n), "a": "ab"},
            divided(n, ab),
            _later(lambda n=n: com_product(com_divided_power(n, a), com_power(b, n))),
        )

        for m in range(1, n):
            r = Composition((m, n - m))
            yield Instance(
                "product_form",
                {"r": str(r), "args": "a ; b"},
                _later(gamma_eval, COM, (0,) * n, r, [a, b]),
                _later(
                    lambda m=m, n=n: com_product(
                        com_divided_power(m, a), com_divided_power(n - m, b)
                    )
                ),
            )
            yield Instance(
                "product",
                {"m": str(m), "n": str(n - m)},
                _later(
                    lambda m=m, n=n: com_product(
                        com_divided_power(m, a), com_divided_power(n - m, a)
                    )
                ),
                _later(com_divided_power, n, a, factor=binomial(n, m)),
            )

    for m in range(1, max_index + 1):
        for n in range(1, max_index + 1):
            if m * n > 2 * max_index:
                continue
            coefficient = index_ratio(
                math.factorial(m * n), math.factorial(m) * math.factorial(n) ** m
            )
            yield Instance(
                "composition",
                {"m": str(m), "n": str(n)},
                _later(lambda m=m, n=n: com_divided_power(m, com_divided_power(n, a))),
                _later(com_divided_power, m * n, a, factor=coefficient),
            )


def check_cartan_suite(
    field: FieldSpec,
    max_index: int,
    *,
    seed: int = 0,
    threads: int = 1,
    fault: FaultSpec | None = None,
) -> CheckReport:
    """Divided power algebra identities in the free Γ(Com)-algebra on a and b."""
    instances = list(_cartan_instances(field, max_index, random.Random(seed)))
    return run_instances(
        "cartan",
        str(field),
        {"max_index": max_index},
        instances,
        threads=threads,
        fault=fault,
    )


def _census_support(step: StepFunction, args: Sequence[FreeStepElement]) -> FreeStepElement:
    value = phi_eval_bhs(step, args)
    return FreeStepElement(value.field, {u: value.field.one() for u in value.terms})


def _oracle_instances(
    max_total_degree: int, fields: Sequence[FieldSpec], max_parts: int
) -> Iterator[Instance]:
    for n in range(1, max_total_degree + 1):
        yield Instance(
            "census_count",
            {"n": str(n)},
            _later(lambda n=n: len(lev_orbit_representatives(n))),
            _later(lambda n=n: len(enumerate_bhs(n))),
        )

    q = FieldSpec.rationals()
    for f in fields:
        pool = _bhs_pool(f, max_total_degree)
        for n in range(1, max_total_degree + 1):
            for r in _positive_compositions(n, max_parts):
                for step in enumerate_c_r(r):
                    for chosen in _arg_tuples(pool, r, max_total_degree):
                        args = [a for a, _ in chosen]
                        describe = {
                            "field": str(f),
                            "step": str(step),
                            "args": " ; ".join(format_value(a) for a in args),
                        }
                        yield Instance(
                            "closed_form",
                            describe,
                            _later(phi_eval_bhs, step, args),
                            _later(phi_eval, step, args),
                        )
                        if f == q:
                            us = [next(iter(a.terms)) for a in args]
                            yield Instance(
                                "census",
                                describe,
                                _later(
                                    lambda step=step, us=us: FreeStepElement.of(
                                        census_of_composite(step, us), q
                                    )
                                ),
                                _later(_census_support, step, args),
                            )


def check_oracle(
    max_total_degree: int,
    fields: Sequence[FieldSpec] = ORACLE_FIELDS,
    *,
    max_parts: int = MAX_PARTS,
    threads: int = 1,
    fault: FaultSpec | None = None,
) -> CheckReport:
    """Closed-form φ on 𝔽[BHS] against the monad multiplication of the free Γ(Lev)-algebra."""
    instances = list(_oracle_instances(max_total_degree, fields, max_parts))
    return run_instances(
        "oracle",
        ",".join(str(f) for f in fields),
        {"max_total_degree": max_total_degree, "max_parts": max_parts},
        instances,
        threads=threads,
        fault=fault,
    )


def _label_sets(n: int) -> Iterator[tuple[str, tuple[Labels, ...]]]:
    yield "lev", LEV.enumerate(n)
    for s in _positive_compositions(n):
        yield f"pi{s}", tuple(partition.function() for partition in enumerate_partitions(s))


def _single_splits(r: Composition) -> Iterator[Composition]:
    for i, part in enumerate(r, start=1):
        for l in range(1, part):  # noqa: E741
            yield r.compose_at(i, Composition((l, part - l)))


def _permrep_instances(n_max: int, f: FieldSpec) -> Iterator[Instance]:
    for n in range(1, n_max + 1):
        for name, points in _label_sets(n):
            for r in (c for p in range(1, n + 1) for c in enumerate_compositions(n, p)):
                if 0 in r.parts:
                    continue
                big = YoungSubgroup.of(r)
                for x in orbit_representatives(points, big):
                    v = GVector.basis(x, big, f)
                    describe = {"set": name, "G": str(r), "x": str(list(x))}
                    yield Instance(
                        "orbit_roundtrip",
                        describe,
                        _later(lambda v=v: o_inverse(o_map(v))),
                        _later(lambda v=v: v),
                    )
                for finer in _single_splits(r):
                    small = YoungSubgroup.of(finer)
                    for x in orbit_representatives(points, small):
                        v = GVector.basis(x, small, f)
                        yield Instance(
                            "induction",
                            {"set": name, "G": str(r), "H": str(finer), "x": str(list(x))},
                            _later(lambda v=v, big=big: o_map(ind(v, big))),
                            _later(lambda v=v, big=big: coset_sum(o_map(v), big)),
                        )
                    for x in orbit_representatives(points, big):
                        v = GVector.basis(x, big, f)
                        yield Instance(
                            "restriction",
                            {"set": name, "G": str(r), "H": str(finer), "x": str(list(x))},
                            _later(lambda v=v, small=small: o_map(res(v, small))),
                            _later(o_map, v),
                        )

    for operad in (COM, LEV):
        for n in range(1, n_max + 1):
            for r in _positive_compositions(n, 2):
                for x in _classes(operad, r):
                    outer = orbit_vector(x, r, f)
                    for inner in _inner_choices(operad, r, n_max):
                        qs = [q for q, _ in inner]
                        ys = [y for _, y in inner]
                        yield Instance(
                            "induced_multiplication",
                            {
                                "operad": operad.name,
                                "x": operad.render(x),
                                "r": str(r),
                                "inner": "; ".join(f"{operad.render(y)}@{q}" for q, y in inner),
                            },
                            _later(_mu_prime_vector, operad, x, r, ys, qs, f),
                            _later(_compose_orbit_sums, operad, outer, r, inner, f),
                        )


def _mu_prime_vector(
    operad: SetOperad,
    x: Labels,
    r: Composition,
    ys: Sequence[Labels],
    qs: Sequence[Composition],
    f: FieldSpec,
) -> GVector:
    label, coefficient = mu_prime(operad, x, r, ys, qs)
    return o_map(GVector.basis(label, wreath_of(r, qs), f).scale(coefficient))


def _compose_orbit_sums(
    operad: SetOperad,
    outer: GVector,
    r: Composition,
    inner: Sequence[tuple[Composition, Labels]],
    f: FieldSpec,
) -> GVector:
    slots = [orbit_vector(y, q, f).terms for (q, y), r_i in zip(inner, r) for _ in range(r_i)]
    wreath = wreath_of(r, [q for q, _ in inner])
    return GVector(wreath, f, "invariant", compose_tensor(operad, outer.terms, slots))


def check_permrep_diagrams(
    n_max: int,
    field: FieldSpec | None = None,
    *,
    threads: int = 1,
    fault: FaultSpec | None = None,
) -> CheckReport:
    """𝒪 round trips, induction and restriction squares, and the induced multiplication, on
    ℒ(n) and Π(r; n) for Young subgroups of Σ_n, n ≤ n_max."""
    f = field or FieldSpec.rationals()
    instances = list(_permrep_instances(n_max, f))
    return run_instances(
        "permrep-diagrams",
        str(f),
        {"n_max": n_max},
        instances,
        threads=threads,
        fault=fault,
    )


def _weight(g: Any) -> int:
    if isinstance(g, GammaTerm):
        return sum(part * _weight(b) for part, b in zip(g.r, g.gens))
    return 1


def _nested_terms(operad: SetOperad, gens: Sequence[Any], max_weight: int) -> list[GammaTerm]:
    return [
        t
        for n in (1, 2)
        for t in terms_in_arity(operad, gens, n)
        if _weight(t) <= max_weight
    ]


def _roundtrip_instances(
    operad: SetOperad, f: FieldSpec, max_arity: int, rng: random.Random, samples: int
) -> Iterator[Instance]:
    for n in range(1, max_arity + 1):
        for t in terms_in_arity(operad, ["a", "b"], n):
            a = FreeGammaElement.of_term(operad, f, t)
            describe = {"operad": operad.name, "a": format_value(a)}
            yield Instance(
                "monad_unit_left",
                describe,
                _later(lambda a=a: tilde_mu_element(eta(a))),
                _later(lambda a=a: a),
            )
            yield Instance(
                "monad_unit_right",
                describe,
                _later(
                    lambda a=a, t=t: tilde_mu_element(
                        map_generators(a, {g: GammaTerm.generator(g) for g in t.gens})
                    )
                ),
                _later(lambda a=a: a),
            )
            if n <= 5:
                yield Instance(
                    "trace_roundtrip",
                    describe,
                    _later(lambda t=t: trace_map(SchurElement(operad, f, {t: f.one()}))),
                    _later(lambda a=a: a),
                )

    bound = min(max_arity, 6)
    first = _nested_terms(operad, ["a", "b"], bound)
    second = _nested_terms(operad, first, bound)
    third = [t for t in _nested_terms(operad, second, bound) if not t.is_generator()]
    for t in rng.sample(third, min(samples, len(third))):
        nested = FreeGammaElement.of_term(operad, f, t)
        yield Instance(
            "monad_associativity",
            {"operad": operad.name, "term": format_value(nested)},
            _later(lambda nested=nested: tilde_mu_element(tilde_mu_element(nested))),
            _later(
                lambda t=t: gamma_eval(
                    operad,
                    t.x,
                    t.r,
                    [tilde_mu_element(FreeGammaElement.of_term(operad, f, m)) for m in t.gens],
                )
            ),
        )


def check_roundtrip_suite(
    operad: SetOperad,
    field: FieldSpec,
    max_arity: int,
    *,
    seed: int = 0,
    samples: int = 12,
    threads: int = 1,
    fault: FaultSpec | None = None,
) -> CheckReport:
    """Monad unit and associativity laws and the trace round trip on free Γ(P)-algebras."""
    instances = list(_roundtrip_instances(operad, field, max_arity, random.Random(seed), samples))
    return run_instances(
        "roundtrip",
        str(field),
        {"max_arity": max_arity},
        instances,
        threads=threads,
        fault=fault,
    )
