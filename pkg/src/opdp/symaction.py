"""Young and wreath subgroups of Σ_n: cosets, stabilizers, orbits, shuffles, block permutations.

Subgroups are shape descriptors. Elements are only listed when an operation enumerates.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections import Counter
from collections.abc import Callable, Hashable, Iterator, Sequence
from dataclasses import dataclass
from typing import TypeVar

from sympy.utilities.iterables import multiset_permutations

from opdp.cache import memoized
from opdp.errors import DegreeMismatch, NotASubgroup, NotContained
from opdp.permcomb import (
    Composition,
    Labels,
    OrderedPartition,
    Permutation,
    diamond,
    iota,
)

logger = logging.getLogger(__name__)

X = TypeVar("X", bound=Hashable)
Action = Callable[[Permutation, X], X]


def label_action(sigma: Permutation, labels: Labels) -> Labels:
    """Σ_n acting on maps [n] → ℕ by precomposition with σ⁻¹."""
    return sigma.act_labels(labels)


def _young_elements(blocks: Sequence[Sequence[int]], n: int) -> Iterator[Permutation]:
    choices = [itertools.permutations(block) for block in blocks]
    for images in itertools.product(*choices):
        perm = list(range(1, n + 1))
        for block, image in zip(blocks, images):
            for x, y in zip(block, image):
                perm[x - 1] = y
        yield Permutation(tuple(perm))


def _sorted_within(labels: Sequence[int], blocks: Sequence[Sequence[int]]) -> list[int]:
    out = list(labels)
    for block in blocks:
        for x, value in zip(block, sorted(labels[y - 1] for y in block)):
            out[x - 1] = value
    return out


def _multiplicity_product(values: Sequence[int]) -> int:
    return math.prod(math.factorial(c) for c in Counter(values).values())


@dataclass(frozen=True)
class YoungSubgroup:
    """Σ_R = ∏_i Σ_{R_i} ⊆ Σ_n."""

    shape: OrderedPartition

    @classmethod
    def of(cls, r: Composition) -> YoungSubgroup:
        return cls(iota(r))

    @classmethod
    def full(cls, n: int) -> YoungSubgroup:
        return cls(OrderedPartition.coarse(n))

    @classmethod
    def trivial(cls, n: int) -> YoungSubgroup:
        return cls(iota(Composition((1,) * n)))

    @property
    def degree(self) -> int:
        return self.shape.n

    @property
    def order(self) -> int:
        return math.prod(math.factorial(len(block)) for block in self.shape.blocks)

    @property
    def fine_blocks(self) -> tuple[tuple[int, ...], ...]:
        return tuple(block for block in self.shape.blocks if block)

    def elements(self) -> Iterator[Permutation]:
        return _young_elements(self.shape.blocks, self.degree)

    def contains(self, sigma: Permutation) -> bool:
        return all(set(map(sigma, block)) == set(block) for block in self.shape.blocks)

    def generators(self) -> list[Permutation]:
        """Adjacent transpositions inside each block."""
        return [
            Permutation.transposition(self.degree, a, b)
            for block in self.shape.blocks
            for a, b in zip(block, block[1:])
        ]

    def canonical_labels(self, labels: Sequence[int]) -> Labels:
        """Lexicographically least element of the orbit of a label map."""
        return tuple(_sorted_within(labels, self.shape.blocks))

    def label_stabilizer_order(self, labels: Sequence[int]) -> int:
        return math.prod(
            _multiplicity_product([labels[x - 1] for x in block]) for block in self.shape.blocks
        )


@dataclass(frozen=True)
class WreathShape:
    """∏_i Σ_{r_i} ≀ Σ_{q_i} inside Σ_M: r_i consecutive copies of a block of size |q_i|."""

    outer: Composition
    inner: tuple[Composition, ...]

    def __post_init__(self) -> None:
        if len(self.inner) != self.outer.p:
            raise NotASubgroup(f"{self.outer} needs {self.outer.p} inner compositions")
        for r_i, q_i in zip(self.outer, self.inner):
            if r_i and not q_i.n:
                raise NotASubgroup("copies of an empty block do not act faithfully")

    @property
    def degree(self) -> int:
        return sum(r_i * q_i.n for r_i, q_i in zip(self.outer, self.inner))

    @property
    def order(self) -> int:
        return math.prod(
            math.factorial(r_i) * math.prod(math.factorial(q) for q in q_i) ** r_i
            for r_i, q_i in zip(self.outer, self.inner)
        )

    def copies(self) -> list[tuple[int, tuple[int, ...]]]:
        """(type index, positions) for every copy, in layout order."""
        found = []
        start = 1
        for i, (r_i, q_i) in enumerate(zip(self.outer, self.inner)):
            for _ in range(r_i):
                found.append((i, tuple(range(start, start + q_i.n))))
                start += q_i.n
        return found

    def fine_partition(self) -> OrderedPartition:
        blocks: list[tuple[int, ...]] = []
        for i, positions in self.copies():
            local = iota(self.inner[i]).blocks
            blocks.extend(tuple(positions[x - 1] for x in block) for block in local)
        return OrderedPartition(tuple(blocks), self.degree)

    def coarse_partition(self) -> OrderedPartition:
        """r ◇ (q_i): the Young subgroup containing this wreath product."""
        return diamond(self.outer, [iota(q_i) for q_i in self.inner])

    @property
    def fine_blocks(self) -> tuple[tuple[int, ...], ...]:
        return tuple(block for block in self.fine_partition().blocks if block)

    def elements(self) -> Iterator[Permutation]:
        copies = self.copies()
        by_type: dict[int, list[tuple[int, ...]]] = {}
        for i, positions in copies:
            by_type.setdefault(i, []).append(positions)
        types = sorted(by_type)
        arrangements = [itertools.permutations(range(len(by_type[i]))) for i in types]
        inner = [
            tuple(
                tuple(_young_elements(iota(self.inner[i]).blocks, self.inner[i].n))
                for _ in by_type[i]
            )
            for i in types
        ]
        for moves in itertools.product(*arrangements):
            for local in itertools.product(*(itertools.product(*per_type) for per_type in inner)):
                images = list(range(1, self.degree + 1))
                for t, i in enumerate(types):
                    for c, positions in enumerate(by_type[i]):
                        target = by_type[i][moves[t][c]]
                        tau = local[t][c]
                        for k, x in enumerate(positions, start=1):
                            images[x - 1] = target[tau(k) - 1]
                yield Permutation(tuple(images))

    def contains(self, sigma: Permutation) -> bool:
        copies = self.copies()
        starts = {positions[0]: (i, positions) for i, positions in copies}
        for i, positions in copies:
            image = [sigma(x) for x in positions]
            target = starts.get(min(image))
            if target is None or target[0] != i or sorted(image) != list(target[1]):
                return False
            local = Permutation(tuple(y - target[1][0] + 1 for y in image))
            if not YoungSubgroup.of(self.inner[i]).contains(local):
                return False
        return True

    def generators(self) -> list[Permutation]:
        """Young generators of the fine blocks plus swaps of neighbouring copies of one type."""
        gens = YoungSubgroup(self.fine_partition()).generators()
        copies = self.copies()
        for (i, left), (j, right) in zip(copies, copies[1:]):
            if i != j:
                continue
            images = list(range(1, self.degree + 1))
            for a, b in zip(left, right):
                images[a - 1], images[b - 1] = b, a
            gens.append(Permutation(tuple(images)))
        return gens

    def canonical_labels(self, labels: Sequence[int]) -> Labels:
        """Sort within fine blocks, then order same-type copies lexicographically."""
        fine = _sorted_within(labels, self.fine_partition().blocks)
        out = list(fine)
        copies = self.copies()
        for i in range(self.outer.p):
            slots = [positions for t, positions in copies if t == i]
            chunks = sorted(tuple(fine[x - 1] for x in positions) for positions in slots)
            for positions, chunk in zip(slots, chunks):
                for x, value in zip(positions, chunk):
                    out[x - 1] = value
        return tuple(out)

    def label_stabilizer_order(self, labels: Sequence[int]) -> int:
        order = 1
        for i in range(self.outer.p):
            young = YoungSubgroup.of(self.inner[i])
            chunks = [
                tuple(labels[x - 1] for x in positions) for t, positions in self.copies() if t == i
            ]
            classes = Counter(young.canonical_labels(chunk) for chunk in chunks)
            for representative, count in classes.items():
                local = young.label_stabilizer_order(representative)
                order *= math.factorial(count) * local**count
        return order


Subgroup = YoungSubgroup | WreathShape


def _fine_young_cosets(
    ground_blocks: Sequence[Sequence[int]], fine: Sequence[Sequence[int]], n: int
) -> Iterator[Permutation]:
    """σ preserving each ground block and increasing on each fine block (fine refines ground)."""
    owner = {x: b for b, block in enumerate(ground_blocks) for x in block}
    per_ground: list[list[int]] = [[] for _ in ground_blocks]
    for f, block in enumerate(fine):
        if block:
            homes = {owner[x] for x in block}
            if len(homes) != 1:
                raise NotContained(f"block {block} straddles the ambient blocks")
            per_ground[homes.pop()].append(f)
    choices = []
    for b, block in enumerate(ground_blocks):
        labels = [f for f in per_ground[b] for _ in fine[f]]
        choices.append([(block, perm) for perm in multiset_permutations(labels)] if labels else [])
    for assignment in itertools.product(*(c for c in choices if c)):
        images = list(range(1, n + 1))
        for block, labels in assignment:
            targets: dict[int, list[int]] = {}
            for y, f in zip(block, labels):
                targets.setdefault(f, []).append(y)
            for f, ys in targets.items():
                for x, y in zip(fine[f], ys):
                    images[x - 1] = y
        yield Permutation(tuple(images))


def _copies_in_order(sigma: Permutation, shape: WreathShape) -> bool:
    last: dict[int, int] = {}
    for i, positions in shape.copies():
        first = sigma(positions[0])
        if i in last and first < last[i]:
            return False
        last[i] = first
    return True


def _check_degree(n: int, subgroup: Subgroup) -> None:
    if subgroup.degree != n:
        raise NotASubgroup(f"subgroup of Σ_{subgroup.degree} is not inside Σ_{n}")


@memoized("relative_cosets")
def relative_cosets(ambient: YoungSubgroup, subgroup: Subgroup) -> tuple[Permutation, ...]:
    """Canonical representatives of G/H, sorted by image sequence."""
    if ambient.degree != subgroup.degree:
        raise NotContained("subgroups of different symmetric groups")
    if isinstance(subgroup, WreathShape):
        fine = subgroup.fine_partition().blocks
    else:
        fine = subgroup.shape.blocks
    reps = _fine_young_cosets(ambient.shape.blocks, fine, ambient.degree)
    if isinstance(subgroup, WreathShape):
        reps = (sigma for sigma in reps if _copies_in_order(sigma, subgroup))
    found = tuple(sorted(reps, key=lambda sigma: sigma.images))
    if len(found) * subgroup.order != ambient.order:
        raise NotContained(f"{subgroup} is not contained in {ambient}")
    logger.debug("Listed %d coset representatives of %s in %s", len(found), subgroup, ambient)
    return found


def cosets(n: int, subgroup: Subgroup) -> tuple[Permutation, ...]:
    """One canonical representative (least image sequence) of each left coset σH in Σ_n."""
    _check_degree(n, subgroup)
    return relative_cosets(YoungSubgroup.full(n), subgroup)


def shuffles(l: int, m: int) -> tuple[Permutation, ...]:  # noqa: E741
    """The (l, m)-shuffles: increasing on [l] and on l + [m]."""
    n = l + m
    found = []
    for head in itertools.combinations(range(1, n + 1), l):
        tail = [y for y in range(1, n + 1) if y not in head]
        found.append(Permutation(tuple(head) + tuple(tail)))
    return tuple(sorted(found, key=lambda sigma: sigma.images))


def split_first_block_representatives(
    r: Composition, l: int, m: int  # noqa: E741
) -> tuple[Permutation, ...]:
    """Right coset representatives of Σ_{r∘₁(l,m)} in Σ_r (inverse shuffles on block one)."""
    if r.p == 0 or l + m != r[0]:
        raise DegreeMismatch(f"cannot split the first part of {r} as ({l},{m})")
    n = r.n
    found = []
    for sigma in shuffles(l, m):
        images = list(sigma.inverse().images) + list(range(r[0] + 1, n + 1))
        found.append(Permutation(tuple(images)))
    return tuple(found)


def stabilizer_order(x: X, subgroup: Subgroup, action: Action[X] = label_action) -> int:
    """|Stab_H(x)| by enumerating H."""
    return sum(1 for h in subgroup.elements() if action(h, x) == x)


def orbit(x: X, subgroup: Subgroup, action: Action[X] = label_action) -> frozenset[X]:
    """Ω_H(x), with the orbit-stabilizer count asserted."""
    seen: Counter[X] = Counter(action(h, x) for h in subgroup.elements())
    points = frozenset(seen)
    assert len(points) * seen[x] == subgroup.order
    return points


def label_orbit(labels: Labels, subgroup: Subgroup) -> tuple[Labels, ...]:
    """Orbit of a label map, listed without enumerating the group for Young shapes."""
    if isinstance(subgroup, WreathShape):
        return tuple(sorted(orbit(labels, subgroup)))
    per_block = [
        (block, list(multiset_permutations([labels[x - 1] for x in block])))
        for block in subgroup.shape.blocks
        if block
    ]
    found = []
    for choice in itertools.product(*(values for _, values in per_block)):
        out = list(labels)
        for (block, _), values in zip(per_block, choice):
            for x, value in zip(block, values):
                out[x - 1] = value
        found.append(tuple(out))
    return tuple(sorted(found))


def permuted_composition(rho: Permutation, r: Composition) -> Composition:
    """r^ρ: the part r_i moves to position ρ(i)."""
    if rho.degree != r.p:
        raise DegreeMismatch(f"permutation of degree {rho.degree} on {r.p} parts")
    inverse = rho.inverse()
    return Composition(tuple(r[inverse(k) - 1] for k in range(1, r.p + 1)))


def block_permutation(rho: Permutation, r: Composition) -> Permutation:
    """ρ*: moves the i-th interval block of ι(r) to position ρ(i), keeping internal order."""
    target = iota(permuted_composition(rho, r))
    images = [0] * r.n
    for i, block in enumerate(iota(r).blocks, start=1):
        for x, y in zip(block, target.blocks[rho(i) - 1]):
            images[x - 1] = y
    return Permutation(tuple(images))
