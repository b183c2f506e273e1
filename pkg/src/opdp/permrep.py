"""Permutation representations F[X] of Young and wreath subgroups acting on label maps.

X is any Σ_n-stable set of maps [n] → ℕ: Lev depth maps, the Com element, or the ∂
encodings of ordered partitions in Π(r; n).
"""

from __future__ import annotations

import dataclasses
import logging
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from typing import Literal

from opdp.errors import ArityMismatch, NotContained, NotInvariant
from opdp.permcomb import Composition, Labels
from opdp.scalar import FieldSpec, Scalar, index_ratio, reduce
from opdp.setoperad import SetOperad
from opdp.symaction import (
    Subgroup,
    WreathShape,
    YoungSubgroup,
    label_orbit,
    relative_cosets,
)

logger = logging.getLogger(__name__)

Mode = Literal["plain", "invariant", "coinvariant"]


@dataclass
class GVector:
    """A finite combination of label maps, tagged with the acting group and a mode."""

    group: Subgroup
    field: FieldSpec
    mode: Mode = "plain"
    terms: dict[Labels, Scalar] = dataclasses.field(default_factory=dict)

    def __post_init__(self) -> None:
        self.terms = {x: c for x, c in self.terms.items() if not c.is_zero()}
        if self.mode == "coinvariant":
            for x in self.terms:
                if self.group.canonical_labels(x) != x:
                    raise ValueError(f"{x} is not a canonical orbit representative")

    @classmethod
    def basis(
        cls, x: Labels, group: Subgroup, f: FieldSpec, mode: Mode = "coinvariant"
    ) -> GVector:
        return cls(group, f, mode, {x: f.one()})

    def add_term(self, x: Labels, c: Scalar) -> None:
        total = self.terms.get(x, self.field.zero()) + c
        if total.is_zero():
            self.terms.pop(x, None)
        else:
            self.terms[x] = total

    def __add__(self, other: GVector) -> GVector:
        out = GVector(self.group, self.field, self.mode, dict(self.terms))
        for x, c in other.terms.items():
            out.add_term(x, c)
        return out

    def scale(self, c: Scalar | int) -> GVector:
        return GVector(self.group, self.field, self.mode, {x: v * c for x, v in self.terms.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GVector):
            return NotImplemented
        return self.field == other.field and self.terms == other.terms

    def __len__(self) -> int:
        return len(self.terms)


def orbit_representatives(points: Iterable[Labels], group: Subgroup) -> tuple[Labels, ...]:
    """G\\X as sorted canonical representatives."""
    return tuple(sorted({group.canonical_labels(x) for x in points}))


def _blocks(subgroup: Subgroup) -> Iterable[tuple[int, ...]]:
    if isinstance(subgroup, WreathShape):
        return subgroup.coarse_partition().blocks
    return subgroup.shape.blocks


def check_contained(small: Subgroup, big: Subgroup) -> None:
    """Raise NotContained unless small ≤ big (shape-level check)."""
    if small.degree != big.degree:
        raise NotContained("subgroups of different symmetric groups")
    if isinstance(big, WreathShape):
        if isinstance(small, WreathShape):
            if small != big:
                raise NotContained(f"{small} is not contained in {big}")
            return
        ambient = big.fine_blocks
    else:
        ambient = big.shape.blocks
    owner = {x: b for b, block in enumerate(ambient) for x in block}
    for block in _blocks(small):
        if len({owner[x] for x in block}) > 1:
            raise NotContained(f"block {block} is not inside a block of {big}")


def is_invariant(w: GVector, group: Subgroup) -> bool:
    zero = w.field.zero()
    return all(
        w.terms.get(g.act_labels(y), zero) == c
        for g in group.generators()
        for y, c in w.terms.items()
    )


def o_map(v: GVector, group: Subgroup | None = None) -> GVector:
    """𝒪_G: send each orbit class to its orbit sum."""
    group = v.group if group is None else group
    out = GVector(group, v.field, "invariant")
    for x, c in v.terms.items():
        for y in label_orbit(x, group):
            out.add_term(y, c)
    return out


def o_inverse(w: GVector, group: Subgroup | None = None) -> GVector:
    """Inverse of 𝒪_G: read off the coefficients at canonical orbit representatives."""
    group = w.group if group is None else group
    if not is_invariant(w, group):
        raise NotInvariant("vector is not fixed by the group")
    return GVector(
        group,
        w.field,
        "coinvariant",
        {x: c for x, c in w.terms.items() if group.canonical_labels(x) == x},
    )


def ind(v: GVector, big: Subgroup) -> GVector:
    """Ind_H^G([x]_H) = (|Stab_G x| / |Stab_H x|) [x]_G."""
    small = v.group
    check_contained(small, big)
    out = GVector(big, v.field, "coinvariant")
    for x, c in v.terms.items():
        ratio = index_ratio(big.label_stabilizer_order(x), small.label_stabilizer_order(x))
        out.add_term(big.canonical_labels(x), c * reduce(ratio, v.field))
    return out


def res(v: GVector, small: Subgroup) -> GVector:
    """Res_H^G([x]_G) = Σ of the H-classes inside the G-orbit of x."""
    big = v.group
    check_contained(small, big)
    out = GVector(small, v.field, "coinvariant")
    for x, c in v.terms.items():
        for y in sorted({small.canonical_labels(z) for z in label_orbit(x, big)}):
            out.add_term(y, c)
    return out


def coset_sum(w: GVector, big: YoungSubgroup) -> GVector:
    """Σ_{g ∈ G/H} g·w for an H-invariant w."""
    out = GVector(big, w.field, "invariant")
    for g in relative_cosets(big, w.group):
        for y, c in w.terms.items():
            out.add_term(g.act_labels(y), c)
    return out


def compose_tensor(
    operad: SetOperad,
    outer: Mapping[Labels, Scalar],
    slots: Sequence[Mapping[Labels, Scalar]],
) -> dict[Labels, Scalar]:
    """μ(X ⊗ Y_1 ⊗ … ⊗ Y_n), expanded multilinearly."""
    if not outer:
        return {}
    partial: dict[tuple[Labels, ...], Scalar] = {(): _one(outer, slots)}
    for slot in slots:
        partial = {
            prefix + (y,): c * cy for prefix, c in partial.items() for y, cy in slot.items()
        }
    out: dict[Labels, Scalar] = {}
    for x, cx in outer.items():
        if len(x) != len(slots):
            raise ArityMismatch(f"arity {len(x)} element given {len(slots)} inputs")
        for ys, c in partial.items():
            key = operad.full_compose(x, ys)
            total = out.get(key)
            value = cx * c if total is None else total + cx * c
            if value.is_zero():
                out.pop(key, None)
            else:
                out[key] = value
    return out


def _one(outer: Mapping[Labels, Scalar], slots: Sequence[Mapping[Labels, Scalar]]) -> Scalar:
    for mapping in (outer, *slots):
        for c in mapping.values():
            return c.field.one()
    raise ArityMismatch("cannot compose empty vectors")


def wreath_of(r: Composition, qs: Sequence[Composition]) -> WreathShape:
    return WreathShape(r, tuple(qs))


def mu_prime(
    operad: SetOperad,
    x: Labels,
    r: Composition,
    xs: Sequence[Labels],
    qs: Sequence[Composition],
) -> tuple[Labels, int]:
    """μ′: the W-class of μ(x ⊗ x_1^{⊗r_1} ⊗ …) and its integer coefficient.

    W = ∏ Σ_{r_i} ≀ Σ_{q_i}; the coefficient is
    |Stab_W(μ)| / (|Stab_{Σ_r}(x)| · ∏ |Stab_{Σ_{q_i}}(x_i)|^{r_i}).
    """
    if len(x) != r.n or len(xs) != r.p or len(qs) != r.p:
        raise ArityMismatch(f"x of arity {len(x)} with {r} and {len(xs)} inputs")
    for x_i, q_i in zip(xs, qs):
        if len(x_i) != q_i.n:
            raise ArityMismatch(f"input of arity {len(x_i)} for Σ_{q_i}")
    slots = [x_i for x_i, r_i in zip(xs, r) for _ in range(r_i)]
    composite = operad.full_compose(x, slots)
    wreath = wreath_of(r, qs)
    denominator = YoungSubgroup.of(r).label_stabilizer_order(x)
    for x_i, q_i, r_i in zip(xs, qs, r):
        denominator *= YoungSubgroup.of(q_i).label_stabilizer_order(x_i) ** r_i
    coefficient = index_ratio(wreath.label_stabilizer_order(composite), denominator)
    logger.debug("mu_prime(%s; %s) = %d * [%s]", x, list(xs), coefficient, composite)
    return wreath.canonical_labels(composite), coefficient
