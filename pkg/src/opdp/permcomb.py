"""Compositions, ordered set partitions of [n], permutations and the partition operations.

Points of [n] are 1-based throughout so that the text forms match the usual notation.
Empty blocks and zero parts are legal everywhere: positions carry meaning.
"""

from __future__ import annotations

import itertools
import logging
import re
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from typing import TypeVar

from sympy.utilities.iterables import multiset_permutations

from opdp.errors import ArityMismatch, DegreeMismatch, ParseError, ShapeMismatch

logger = logging.getLogger(__name__)

Labels = tuple[int, ...]
T = TypeVar("T")


@dataclass(frozen=True)
class Permutation:
    """σ ∈ Σ_n stored by its image sequence (σ(1), …, σ(n))."""

    images: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.images) != list(range(1, len(self.images) + 1)):
            raise ValueError(f"{self.images} is not a permutation")

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def transposition(cls, n: int, i: int, j: int) -> Permutation:
        images = list(range(1, n + 1))
        images[i - 1], images[j - 1] = j, i
        return cls(tuple(images))

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, k: int) -> int:
        return self.images[k - 1]

    def __mul__(self, other: Permutation) -> Permutation:
        """Composition ``self ∘ other``."""
        if other.degree != self.degree:
            raise DegreeMismatch(f"cannot compose degrees {self.degree} and {other.degree}")
        return Permutation(tuple(self.images[k - 1] for k in other.images))

    def inverse(self) -> Permutation:
        inv = [0] * self.degree
        for k, image in enumerate(self.images, start=1):
            inv[image - 1] = k
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return self.images == tuple(range(1, self.degree + 1))

    def act_labels(self, labels: Sequence[int]) -> Labels:
        """(σ·h)(x) = h(σ⁻¹(x)) for a map h: [n] → ℕ stored as a sequence."""
        return self.permute(labels)

    def permute(self, items: Sequence[T]) -> tuple[T, ...]:
        """Move the entry at position k to position σ(k)."""
        if len(items) != self.degree:
            raise DegreeMismatch(f"degree {self.degree} acting on arity {len(items)}")
        out: list[T] = list(items)
        for k, image in enumerate(self.images):
            out[image - 1] = items[k]
        return tuple(out)

    def __str__(self) -> str:
        return "[" + ",".join(map(str, self.images)) + "]"


@dataclass(frozen=True, order=True)
class Composition:
    """(r_1, …, r_p) with non-negative parts."""

    parts: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(part < 0 for part in self.parts):
            raise ValueError(f"negative part in {self.parts}")

    @classmethod
    def of(cls, *parts: int) -> Composition:
        return cls(tuple(parts))

    @property
    def n(self) -> int:
        return sum(self.parts)

    @property
    def p(self) -> int:
        return len(self.parts)

    def __getitem__(self, i: int) -> int:
        return self.parts[i]

    def __iter__(self) -> Iterator[int]:
        return iter(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def compose_at(self, i: int, q: Composition) -> Composition:
        """r ∘_i q: replace the 1-based part i by the parts of q."""
        if not 1 <= i <= self.p:
            raise ArityMismatch(f"index {i} outside 1..{self.p}")
        if q.n != self.parts[i - 1]:
            raise ArityMismatch(f"cannot refine part {self.parts[i - 1]} by {q}")
        return Composition(self.parts[: i - 1] + q.parts + self.parts[i:])

    def without_zeros(self) -> Composition:
        return Composition(tuple(part for part in self.parts if part))

    @classmethod
    def parse(cls, text: str) -> Composition:
        raw = text.strip().replace(" ", "")
        if not re.fullmatch(r"\((\d+(,\d+)*)?\)", raw):
            raise ParseError(f"bad composition {text!r}: expected e.g. (3,2)")
        inner = raw[1:-1]
        return cls(tuple(int(x) for x in inner.split(","))) if inner else cls(())

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.parts)) + ")"


@dataclass(frozen=True)
class OrderedPartition:
    """(R_1, …, R_p): disjoint sorted blocks covering [n]; empty blocks allowed."""

    blocks: tuple[tuple[int, ...], ...]
    n: int

    def __post_init__(self) -> None:
        points = [x for block in self.blocks for x in block]
        if sorted(points) != list(range(1, self.n + 1)):
            raise ValueError(f"{self.blocks} is not an ordered partition of [{self.n}]")
        if any(list(block) != sorted(block) for block in self.blocks):
            raise ValueError("blocks must be stored sorted")

    @classmethod
    def of(cls, blocks: Sequence[Sequence[int]], n: int | None = None) -> OrderedPartition:
        normalized = tuple(tuple(sorted(block)) for block in blocks)
        if n is None:
            n = sum(len(block) for block in normalized)
        return cls(normalized, n)

    @classmethod
    def coarse(cls, n: int) -> OrderedPartition:
        """c_n, the one-block partition."""
        return cls((tuple(range(1, n + 1)),), n)

    @classmethod
    def from_function(cls, labels: Sequence[int], p: int | None = None) -> OrderedPartition:
        """Partition with ∂(x) = labels[x-1], block indices 1-based."""
        if p is None:
            p = max(labels, default=0)
        if any(not 1 <= label <= p for label in labels):
            raise ValueError(f"labels {labels} outside 1..{p}")
        blocks: list[list[int]] = [[] for _ in range(p)]
        for x, label in enumerate(labels, start=1):
            blocks[label - 1].append(x)
        return cls(tuple(tuple(block) for block in blocks), len(labels))

    @property
    def p(self) -> int:
        return len(self.blocks)

    def sizes(self) -> Composition:
        """pr(R) = (|R_1|, …, |R_p|)."""
        return Composition(tuple(len(block) for block in self.blocks))

    def function(self) -> Labels:
        """∂_R as the sequence (∂(1), …, ∂(n))."""
        labels = [0] * self.n
        for i, block in enumerate(self.blocks, start=1):
            for x in block:
                labels[x - 1] = i
        return tuple(labels)

    def is_interval(self) -> bool:
        return self == iota(self.sizes())

    @classmethod
    def parse(cls, text: str) -> OrderedPartition:
        raw = text.strip().replace(" ", "")
        if not (raw.startswith("(") and raw.endswith(")")):
            raise ParseError(f"bad partition {text!r}: expected e.g. ({{1,2,4}},{{3}})")
        inner = raw[1:-1]
        tokens = re.findall(r"\{[\d,]*\}|∅", inner)
        if ",".join(tokens) != inner:
            raise ParseError(f"bad partition {text!r}")
        blocks = []
        for token in tokens:
            body = "" if token == "∅" else token[1:-1]
            if body and not re.fullmatch(r"\d+(,\d+)*", body):
                raise ParseError(f"bad block {token!r} in {text!r}")
            blocks.append(tuple(int(x) for x in body.split(",")) if body else ())
        try:
            return cls.of(blocks)
        except ValueError as e:
            raise ParseError(f"bad partition {text!r}: {e}") from e

    def __str__(self) -> str:
        rendered = [
            "{" + ",".join(map(str, block)) + "}" if block else "∅" for block in self.blocks
        ]
        return "(" + ",".join(rendered) + ")"


def iota(r: Composition) -> OrderedPartition:
    """ι(r): consecutive interval blocks of sizes r_1, …, r_p."""
    blocks = []
    start = 1
    for part in r:
        blocks.append(tuple(range(start, start + part)))
        start += part
    return OrderedPartition(tuple(blocks), r.n)


def pr(partition: OrderedPartition) -> Composition:
    return partition.sizes()


def partition_compose(
    r_part: OrderedPartition, q_part: OrderedPartition, i: int
) -> OrderedPartition:
    """R ∘_i Q: refine block R_i through the increasing bijection [r_i] → R_i."""
    if not 1 <= i <= r_part.p:
        raise ArityMismatch(f"index {i} outside 1..{r_part.p}")
    target = r_part.blocks[i - 1]
    if len(target) != q_part.n:
        raise ArityMismatch(f"block {i} has {len(target)} points, Q has ground set {q_part.n}")
    refined = tuple(tuple(target[x - 1] for x in block) for block in q_part.blocks)
    return OrderedPartition(r_part.blocks[: i - 1] + refined + r_part.blocks[i:], r_part.n)


def act(sigma: Permutation, partition: OrderedPartition) -> OrderedPartition:
    """σ·R = (σ(R_1), …, σ(R_p))."""
    if sigma.degree != partition.n:
        raise DegreeMismatch(f"degree {sigma.degree} acting on a partition of [{partition.n}]")
    blocks = [[sigma(x) for x in block] for block in partition.blocks]
    return OrderedPartition.of(blocks, partition.n)


def triangle(q_part: OrderedPartition, r_part: OrderedPartition) -> OrderedPartition:
    """Q ▷ R: block i is the union of the R_j with j ∈ Q_i, so ∂_{Q▷R} = ∂_Q ∘ ∂_R."""
    if q_part.n != r_part.p:
        raise ArityMismatch(f"Q partitions [{q_part.n}] but R has {r_part.p} blocks")
    return OrderedPartition.of(
        [[x for j in block for x in r_part.blocks[j - 1]] for block in q_part.blocks], r_part.n
    )


def tensor(r_part: OrderedPartition, q_part: OrderedPartition) -> OrderedPartition:
    """R ⊗ Q = (R_1, …, R_p, Q_1 + n, …, Q_s + n)."""
    shifted = tuple(tuple(x + r_part.n for x in block) for block in q_part.blocks)
    return OrderedPartition(r_part.blocks + shifted, r_part.n + q_part.n)


def gamma_k(k: int, partition: OrderedPartition) -> OrderedPartition:
    """γ_k(R): block i gathers the k translates R_i + jn, 0 ≤ j < k."""
    if k < 0:
        raise ValueError("k must be non-negative")
    n = partition.n
    return OrderedPartition.of(
        [[x + j * n for j in range(k) for x in block] for block in partition.blocks], k * n
    )


def diamond(r: Composition, qs: Sequence[OrderedPartition]) -> OrderedPartition:
    """r ◇ (Q_1, …, Q_p) = γ_{r_1}(Q_1) ⊗ … ⊗ γ_{r_p}(Q_p)."""
    if len(qs) != r.p:
        raise ArityMismatch(f"{r} needs {r.p} partitions, got {len(qs)}")
    result = OrderedPartition((), 0)
    for part, q_part in zip(r, qs):
        result = tensor(result, gamma_k(part, q_part))
    return result


def diamond_block(
    r: Composition, qs: Sequence[OrderedPartition], i: int, j: int
) -> tuple[int, ...]:
    """The block indexed (i, j) of r ◇ (Q_k), both indices 1-based."""
    if not 1 <= i <= r.p or not 1 <= j <= qs[i - 1].p:
        raise ArityMismatch(f"no block ({i},{j})")
    offset = sum(q_part.p for q_part in qs[: i - 1])
    return diamond(r, qs).blocks[offset + j - 1]


def wedge(r_part: OrderedPartition, q_part: OrderedPartition) -> OrderedPartition:
    """R ∧ Q: block (i, j), row-major, is R_i ∩ Q_j."""
    if r_part.n != q_part.n:
        raise DegreeMismatch(f"partitions of [{r_part.n}] and [{q_part.n}]")
    return OrderedPartition(
        tuple(
            tuple(sorted(set(r_block) & set(q_block)))
            for r_block in r_part.blocks
            for q_block in q_part.blocks
        ),
        r_part.n,
    )


def wedge_is_composition(r: Composition, partition: OrderedPartition) -> bool:
    """True iff ∂_R is non-decreasing on every interval block of ι(r)."""
    if r.n != partition.n:
        raise DegreeMismatch(f"composition of {r.n} against a partition of [{partition.n}]")
    labels = partition.function()
    return all(
        all(labels[x - 1] <= labels[x] for x in block[:-1]) for block in iota(r).blocks
    )


def find_transporter(source: OrderedPartition, target: OrderedPartition) -> Permutation:
    """The blockwise order-preserving σ with σ(source) = target."""
    if source.sizes() != target.sizes() or source.n != target.n:
        raise ShapeMismatch(f"{source} and {target} have different shapes")
    images = [0] * source.n
    for block, image_block in zip(source.blocks, target.blocks):
        for x, y in zip(block, image_block):
            images[x - 1] = y
    return Permutation(tuple(images))


def enumerate_compositions(n: int, p: int) -> list[Composition]:
    """Comp_p(n), zero parts included, in lexicographic order."""
    if p == 0:
        return [Composition(())] if n == 0 else []
    found = []
    for bars in itertools.combinations_with_replacement(range(n + 1), p - 1):
        cuts = (0, *bars, n)
        found.append(Composition(tuple(b - a for a, b in zip(cuts, cuts[1:]))))
    return sorted(found, key=lambda c: c.parts)


def enumerate_partitions(r: Composition) -> list[OrderedPartition]:
    """Π(r; n), ordered by the ∂ encoding."""
    labels = [i for i, part in enumerate(r, start=1) for _ in range(part)]
    if not labels:
        return [OrderedPartition(tuple(() for _ in r), 0)]
    found = [OrderedPartition.from_function(perm, r.p) for perm in multiset_permutations(labels)]
    logger.debug("Enumerated |Π(%s)| = %d", r, len(found))
    return found
