"""Step operations φ_{h,r}, their dictionaries with the γ operations of Γ(Lev), and the free
level algebra on one generator spanned by binary Huffman sequences (BHS).

A BHS u is the depth census of an element of ℒ(n): u(l) points sit at depth l. The free
Γ(Lev)-algebra on one generator ``x`` has one normal-form term per census, (r=(n),
x = the non-decreasing depth map, gens=(x,)), which is how the closed forms here are compared
with the monad multiplication in :mod:`opdp.freegamma`.
"""

from __future__ import annotations

import itertools
import logging
import math
import re
from collections import Counter
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import TypeVar

from opdp.cache import memoized
from opdp.errors import ArityMismatch, NotStep, OpdpError, ParseError, ShapeError
from opdp.freegamma import (
    FreeGammaElement,
    GammaTerm,
    com_divided_power,
    com_product,
    gamma_eval,
)
from opdp.permcomb import (
    Composition,
    Labels,
    OrderedPartition,
    diamond,
    enumerate_compositions,
    find_transporter,
    iota,
    wedge,
    wedge_is_composition,
)
from opdp.scalar import FieldSpec, Scalar, index_ratio, reduce
from opdp.setoperad import COM, LEV, LevElement, is_dyadic
from opdp.symaction import YoungSubgroup

logger = logging.getLogger(__name__)

GENERATOR = "x"


@dataclass(frozen=True)
class StepFunction:
    """h ∈ 𝒞_r: a dyadic depth map constant on every interval block of ι(r)."""

    h: Labels
    r: Composition

    def __post_init__(self) -> None:
        if len(self.h) != self.r.n:
            raise NotStep(f"depth map of arity {len(self.h)} against {self.r}")
        for block in iota(self.r).blocks:
            if len({self.h[x - 1] for x in block}) > 1:
                raise NotStep(f"h={list(self.h)} is not constant on block {block} of {self.r}")
        if not is_dyadic(self.h):
            raise NotStep(f"h={list(self.h)} does not satisfy Σ 2^-h = 1")

    @classmethod
    def parse(cls, text: str) -> StepFunction:
        raw = text.strip().replace(" ", "")
        match = re.fullmatch(r"h=\[(\d+(?:,\d+)*)\]@r=(\(.*\))", raw)
        if not match:
            raise ParseError(f"bad step function {text!r}: expected e.g. h=[1,2,2]@r=(1,2)")
        h = tuple(int(x) for x in match.group(1).split(","))
        try:
            return cls(h, Composition.parse(match.group(2)))
        except NotStep as e:
            raise ParseError(str(e)) from e

    def block_values(self) -> tuple[int | None, ...]:
        """The constant value k_i of h on block i, None on empty blocks."""
        return tuple(self.h[block[0] - 1] if block else None for block in iota(self.r).blocks)

    def refine(self, r: Composition) -> StepFunction:
        """ω: the same map seen in 𝒞 of a refinement."""
        return StepFunction(self.h, r)

    def without_zeros(self) -> StepFunction:
        return StepFunction(self.h, self.r.without_zeros())

    def __str__(self) -> str:
        return "h=[" + ",".join(map(str, self.h)) + f"]@r={self.r}"


@memoized("block_depths")
def _block_depths(
    sizes: tuple[int, ...], budget: Fraction, bound: int
) -> tuple[tuple[int, ...], ...]:
    if not sizes:
        return ((),) if budget == 0 else ()
    total = sum(sizes)
    # every block weighs between size / 2^bound and size
    if budget > total or budget < Fraction(total, 2**bound):
        return ()
    size, rest = sizes[0], sizes[1:]
    found: list[tuple[int, ...]] = []
    for d in range(bound + 1):
        weight = Fraction(size, 2**d)
        if weight > budget:
            continue
        for tail in _block_depths(rest, budget - weight, bound):
            found.append((d, *tail))
    return tuple(found)


@memoized("enumerate_c_r")
def enumerate_c_r(r: Composition) -> tuple[StepFunction, ...]:
    """𝒞_r, sorted by depth map. Depths never exceed n − 1."""
    sizes = tuple(part for part in r if part)
    if not sizes:
        return ()
    bound = max(r.n - 1, 0)
    found = []
    for depths in _block_depths(sizes, Fraction(1), bound):
        values = iter(depths)
        per_block = [next(values) if part else 0 for part in r]
        h = tuple(d for d, part in zip(per_block, r) for _ in range(part))
        found.append(StepFunction(h, r))
    return tuple(sorted(found, key=lambda step: step.h))


@dataclass(frozen=True, order=True)
class BhsSequence:
    """A binary Huffman sequence, stored with trailing zeros trimmed."""

    values: tuple[int, ...]

    def __post_init__(self) -> None:
        trimmed = list(self.values)
        while trimmed and trimmed[-1] == 0:
            trimmed.pop()
        object.__setattr__(self, "values", tuple(trimmed))
        if any(v < 0 for v in self.values):
            raise ShapeError(f"negative entry in {list(self.values)}")
        if sum(Fraction(v, 2**i) for i, v in enumerate(self.values)) != 1:
            raise ShapeError(f"{list(self.values)} does not satisfy Σ u(i)/2^i = 1")

    @classmethod
    def unit(cls) -> BhsSequence:
        """The census (1) of the operad unit."""
        return cls((1,))

    @classmethod
    def from_depths(cls, depths: Sequence[int]) -> BhsSequence:
        counts = Counter(depths)
        return cls(tuple(counts.get(i, 0) for i in range(max(depths, default=-1) + 1)))

    @property
    def n(self) -> int:
        return sum(self.values)

    @property
    def height(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, i: int) -> int:
        return self.values[i] if 0 <= i < len(self.values) else 0

    def depth_map(self) -> Labels:
        """u̲: the non-decreasing depth map whose census is u."""
        return tuple(i for i, v in enumerate(self.values) for _ in range(v))

    def as_composition(self) -> Composition:
        return Composition(self.values)

    @classmethod
    def parse(cls, text: str) -> BhsSequence:
        raw = text.strip().replace(" ", "")
        if not re.fullmatch(r"\[\d+(,\d+)*\]", raw):
            raise ParseError(f"bad sequence {text!r}: expected e.g. [0,1,1,2]")
        try:
            return cls(tuple(int(v) for v in raw[1:-1].split(",")))
        except ShapeError as e:
            raise ParseError(str(e)) from e

    def __str__(self) -> str:
        return "[" + ",".join(map(str, self.values)) + "]"


@dataclass
class FreeStepElement:
    """A finite combination of binary Huffman sequences: an element of 𝔽[BHS]."""

    field: FieldSpec
    terms: dict[BhsSequence, Scalar]

    def __post_init__(self) -> None:
        self.terms = {u: c for u, c in self.terms.items() if not c.is_zero()}

    @classmethod
    def zero(cls, f: FieldSpec) -> FreeStepElement:
        return cls(f, {})

    @classmethod
    def of(cls, u: BhsSequence, f: FieldSpec, c: Scalar | int = 1) -> FreeStepElement:
        return cls(f, {u: reduce(c, f) if isinstance(c, int) else c})

    def add_term(self, u: BhsSequence, c: Scalar) -> None:
        total = self.terms.get(u, self.field.zero()) + c
        if total.is_zero():
            self.terms.pop(u, None)
        else:
            self.terms[u] = total

    def copy(self) -> FreeStepElement:
        return FreeStepElement(self.field, dict(self.terms))

    def __add__(self, other: FreeStepElement) -> FreeStepElement:
        if other.field != self.field:
            raise OpdpError(f"field mismatch: {self.field} vs {other.field}")
        out = self.copy()
        for u, c in other.terms.items():
            out.add_term(u, c)
        return out

    def __neg__(self) -> FreeStepElement:
        return self.scale(-1)

    def __sub__(self, other: FreeStepElement) -> FreeStepElement:
        return self + (-other)

    def scale(self, c: Scalar | int) -> FreeStepElement:
        return FreeStepElement(self.field, {u: v * c for u, v in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def sorted_terms(self) -> list[tuple[BhsSequence, Scalar]]:
        return sorted(self.terms.items(), key=lambda item: item[0])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FreeStepElement):
            return NotImplemented
        return self.field == other.field and self.terms == other.terms


E = TypeVar("E", FreeStepElement, FreeGammaElement)
Phi = Callable[[StepFunction, Sequence[E]], E]


def _level_search(n: int, slots: int, prefix: tuple[int, ...]) -> list[tuple[int, ...]]:
    if slots == 0:
        return [prefix] if n == 0 else []
    if slots > n:
        return []
    found = []
    for leaves in range(slots + 1):
        found.extend(_level_search(n - leaves, 2 * (slots - leaves), (*prefix, leaves)))
    return found


@memoized("enumerate_bhs")
def enumerate_bhs(n: int) -> tuple[BhsSequence, ...]:
    """BHS(n) by a level recursion: a_0 = 1 open slot, u(l) ≤ a_l leaves, a_{l+1} = 2(a_l − u(l)).

    This never consults ℒ(n), so it serves as an independent count of Σ_n-orbits of ℒ(n).
    """
    if n < 1:
        return ()
    found = tuple(sorted(BhsSequence(values) for values in _level_search(n, 1, ())))
    logger.debug("Enumerated |BHS(%d)| = %d", n, len(found))
    return found


def level_dot(u: BhsSequence, v: BhsSequence) -> BhsSequence:
    """u·v = (0, u(0)+v(0), u(1)+v(1), …)."""
    length = max(len(u.values), len(v.values))
    return BhsSequence((0, *(u[i] + v[i] for i in range(length))))


def star_coefficient(u: BhsSequence, v: BhsSequence) -> int:
    length = max(len(u.values), len(v.values))
    return math.prod(math.comb(u[j] + v[j], u[j]) for j in range(length))


def level_star(u: BhsSequence, v: BhsSequence, f: FieldSpec) -> FreeStepElement:
    """u*v = ∏_j C(u(j)+v(j), u(j)) · u·v."""
    return FreeStepElement.of(level_dot(u, v), f, star_coefficient(u, v))


def star(a: FreeStepElement, b: FreeStepElement) -> FreeStepElement:
    """Bilinear extension of :func:`level_star`."""
    out = FreeStepElement.zero(a.field)
    for u, cu in a.terms.items():
        for v, cv in b.terms.items():
            out = out + level_star(u, v, a.field).scale(cu * cv)
    return out


def _phi_basis(
    shifts: Sequence[int], r: Sequence[int], us: Sequence[BhsSequence]
) -> tuple[BhsSequence, int]:
    length = max(k + len(u.values) for k, u in zip(shifts, us))
    census = tuple(
        sum(r_j * u_j[l - k_j] for k_j, r_j, u_j in zip(shifts, r, us)) for l in range(length)
    )
    numerator = math.prod(math.factorial(c) for c in census)
    denominator = math.prod(
        math.factorial(r_i) * math.prod(math.factorial(v) for v in u_i.values) ** r_i
        for r_i, u_i in zip(r, us)
    )
    return BhsSequence(census), index_ratio(numerator, denominator)


def phi_eval_bhs(step: StepFunction, args: Sequence[FreeStepElement]) -> FreeStepElement:
    """Closed form of φ_{h,r} on 𝔽[BHS].

    Arguments are expanded multilinearly: r_i copies of a sum are distributed among its terms,
    which refines r without changing h. On basis arguments
    φ_{h,r}(u_1, …, u_p) = ∏_l u(l)! / (∏_i r_i! ∏_k u_i(k)!^{r_i}) · u with
    u(l) = Σ_j r_j u_j(l − k_j), the integer computed before reduction.
    """
    if len(args) != step.r.p:
        raise ArityMismatch(f"{step.r} needs {step.r.p} arguments, got {len(args)}")
    if not args:
        raise ArityMismatch("φ needs at least one argument")
    f = args[0].field
    out = FreeStepElement.zero(f)
    values = step.block_values()
    expansions = [a.sorted_terms() for a in args]
    if any(not terms and part for terms, part in zip(expansions, step.r)):
        return out
    per_block = [
        [comp.parts for comp in enumerate_compositions(part, len(terms))] if terms else [()]
        for part, terms in zip(step.r, expansions)
    ]
    for split in itertools.product(*per_block):
        coefficient = f.one()
        shifts: list[int] = []
        parts: list[int] = []
        inputs: list[BhsSequence] = []
        for k_i, terms, counts in zip(values, expansions, split):
            for (u, c), k in zip(terms, counts):
                if not k:
                    continue
                assert k_i is not None
                coefficient = coefficient * c**k
                shifts.append(k_i)
                parts.append(k)
                inputs.append(u)
        key, count = _phi_basis(shifts, parts, inputs)
        out.add_term(key, coefficient * count)
    return out


def bhs_to_gamma(a: FreeStepElement) -> FreeGammaElement:
    """𝔽[BHS] → Γ(Lev, 𝔽x): u ↦ 𝒪_{Σ_n}(u̲) ⊗ x^{⊗n}."""
    return FreeGammaElement(
        LEV,
        a.field,
        {
            GammaTerm(Composition((u.n,)), u.depth_map(), (GENERATOR,)): c
            for u, c in a.terms.items()
        },
    )


def gamma_to_bhs(a: FreeGammaElement) -> FreeStepElement:
    """Inverse of :func:`bhs_to_gamma` on the one-generator free Γ(Lev)-algebra."""
    if a.operad.name != LEV.name:
        raise ShapeError(f"expected a free Γ(lev)-algebra element, got {a.operad.name}")
    out = FreeStepElement.zero(a.field)
    for term, c in a.terms.items():
        if term.gens != (GENERATOR,):
            raise ShapeError(f"term on generators {term.gens} is not in the one-generator algebra")
        out.add_term(BhsSequence.from_depths(term.x), c)
    return out


def phi_eval(step: StepFunction, args: Sequence[E]) -> E:
    """φ_{h,r} := γ_{[h]_r, r} in Γ(Lev), evaluated through the monad multiplication.

    Arguments in 𝔽[BHS] are moved into the free Γ(Lev)-algebra and the result moved back.
    """
    if args and all(isinstance(a, FreeStepElement) for a in args):
        lifted = [bhs_to_gamma(a) for a in args]  # type: ignore[arg-type]
        return gamma_to_bhs(gamma_eval(LEV, step.h, step.r, lifted))  # type: ignore[return-value]
    return gamma_eval(LEV, step.h, step.r, args)  # type: ignore[arg-type, return-value]


def com_pullback(step: StepFunction, args: Sequence[FreeGammaElement]) -> FreeGammaElement:
    """φ_{h,r}(a_1, …, a_p) = ∏ γ_{r_i}(a_i) on a free divided power algebra; zero parts omitted."""
    if len(args) != step.r.p:
        raise ArityMismatch(f"{step.r} needs {step.r.p} arguments, got {len(args)}")
    factors = [com_divided_power(part, a) for part, a in zip(step.r, args) if part]
    result = factors[0]
    for factor in factors[1:]:
        result = com_product(result, factor)
    return result


def com_step_table(
    field: FieldSpec, max_degree: int
) -> list[tuple[StepFunction, tuple[str, ...], FreeGammaElement]]:
    """φ_{h,r} on distinct generators of the free Γ(Com)-algebra, for every h ∈ 𝒞_r, n ≤ bound."""
    rows = []
    for n in range(1, max_degree + 1):
        for p in range(1, n + 1):
            for r in enumerate_compositions(n, p):
                if 0 in r.parts:
                    continue
                gens = tuple(f"a{i}" for i in range(1, p + 1))
                args = [FreeGammaElement.generator(COM, field, g) for g in gens]
                for step in enumerate_c_r(r):
                    rows.append((step, gens, com_pullback(step, args)))
    return rows


def canonical_lev_representative(element: LevElement, r: Composition) -> Labels:
    """I^f: the representative of [I]_r that is non-decreasing on each block of r."""
    if element.arity != r.n:
        raise ArityMismatch(f"element of arity {element.arity} against {r}")
    return YoungSubgroup.of(r).canonical_labels(element.depths)


def theta_step(element: LevElement, r: Composition) -> tuple[StepFunction, int]:
    """(I^f as a step function for r ∧ I^f, o(I) + 1)."""
    flat = canonical_lev_representative(element, r)
    height = max(flat)
    levels = OrderedPartition.from_function([d + 1 for d in flat], height + 1)
    assert wedge_is_composition(r, levels)
    refined = wedge(iota(r), levels).sizes()
    return StepFunction(flat, refined), height + 1


def theta_from_phi(
    element: LevElement, r: Composition, args: Sequence[E], phi: Phi[E] = phi_eval
) -> E:
    """θ_{[I]_r, r}(a_1, …, a_p) = φ_{I^f, r∧I^f}(a_1 repeated o(I)+1 times, …)."""
    if len(args) != r.p:
        raise ArityMismatch(f"{r} needs {r.p} arguments, got {len(args)}")
    step, copies = theta_step(element, r)
    return phi(step, [a for a in args for _ in range(copies)])


def phi_from_theta(step: StepFunction, args: Sequence[E], phi: Phi[E] = phi_eval) -> E:
    """φ rebuilt from θ: φ'_{h,r} := θ_{[h]_r, r}."""
    return theta_from_phi(LevElement(step.h), step.r, args, phi)


def bhs_from_generator(u: BhsSequence, f: FieldSpec) -> FreeStepElement:
    """u = φ_{u̲, u}(1, …, 1) with o(u) + 1 copies of the unit sequence."""
    step = StepFunction(u.depth_map(), u.as_composition())
    one = FreeStepElement.of(BhsSequence.unit(), f)
    return phi_eval_bhs(step, [one] * len(u.values))


def s7_prefactor(r: Composition, qs: Sequence[Composition]) -> int:
    """|Σ_{r◇q}| / (|Σ_r| · ∏ |Σ_{q_i}|^{r_i}), asserted integral."""
    if len(qs) != r.p:
        raise ArityMismatch(f"{r} needs {r.p} inner compositions, got {len(qs)}")
    big = YoungSubgroup(diamond(r, [iota(q) for q in qs])).order
    small = YoungSubgroup.of(r).order
    for r_i, q_i in zip(r, qs):
        small *= YoungSubgroup.of(q_i).order ** r_i
    return index_ratio(big, small)


def composite_step(
    step: StepFunction, inner: Sequence[StepFunction]
) -> StepFunction:
    """μ(h ⊗ ⨂ g_i^{⊗r_i}) on r ◇ (q_i), transported to the composition pr(r ◇ (q_i))."""
    if len(inner) != step.r.p:
        raise ArityMismatch(f"{step.r} needs {step.r.p} inner step functions, got {len(inner)}")
    slots = [g.h for g, r_i in zip(inner, step.r) for _ in range(r_i)]
    depths = LEV.full_compose(step.h, slots)
    partition = diamond(step.r, [iota(g.r) for g in inner])
    tau = find_transporter(partition, iota(partition.sizes()))
    return StepFunction(tau.act_labels(depths), partition.sizes())


def census_of_composite(step: StepFunction, us: Sequence[BhsSequence]) -> BhsSequence:
    """Depth census of μ(h ⊗ u̲_1^{⊗r_1} ⊗ …) computed on depth maps."""
    slots = [u.depth_map() for u, r_i in zip(us, step.r) for _ in range(r_i)]
    return BhsSequence.from_depths(LEV.full_compose(step.h, slots))
