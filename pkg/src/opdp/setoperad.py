"""Set operads: the commutative operad Com and the level operad Lev.

Basis elements of both are stored as maps [n] → ℕ (tuples): Com uses the zero map of the
right arity, Lev the depth map h with Σ 2^{-h(i)} = 1. Σ_n acts by σ·h = h ∘ σ⁻¹ in both
cases, so orbit and stabilizer computations are shared.
"""

from __future__ import annotations

import logging
import re
from abc import ABC, abstractmethod
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

from sympy.utilities.iterables import multiset_permutations

from opdp.cache import memoized
from opdp.errors import ArityMismatch, IndexOutOfRange, ParseError, ShapeError
from opdp.permcomb import Labels, OrderedPartition, Permutation

logger = logging.getLogger(__name__)


def is_dyadic(depths: Sequence[int]) -> bool:
    """Σ 2^{-h(i)} = 1 in exact arithmetic."""
    return bool(depths) and sum(Fraction(1, 2**d) for d in depths) == 1


class SetOperad(ABC):
    """A reduced one-coloured set operad whose elements are label tuples."""

    name: str

    def unit(self) -> Labels:
        return (0,)

    @abstractmethod
    def compose(self, x: Labels, i: int, y: Labels) -> Labels:
        """x ∘_i y."""

    @abstractmethod
    def is_element(self, x: Labels) -> bool: ...

    @abstractmethod
    def enumerate(self, n: int) -> tuple[Labels, ...]:
        """All basis elements of arity n, sorted."""

    def act(self, sigma: Permutation, x: Labels) -> Labels:
        return sigma.act_labels(x)

    def full_compose(self, x: Labels, ys: Sequence[Labels]) -> Labels:
        """μ(x; y_1, …, y_p) = (…(x ∘_p y_p) ∘_{p-1} …) ∘_1 y_1."""
        if len(ys) != len(x):
            raise ArityMismatch(f"arity {len(x)} element given {len(ys)} inputs")
        result = x
        for i in range(len(ys), 0, -1):
            result = self.compose(result, i, ys[i - 1])
        return result

    def _check_index(self, x: Labels, i: int) -> None:
        if not 1 <= i <= len(x):
            raise IndexOutOfRange(f"cannot compose at {i} into arity {len(x)}")

    def render(self, x: Labels) -> str:
        return "h=[" + ",".join(map(str, x)) + "]"

    def __repr__(self) -> str:
        return f"{type(self).__name__}()"


class Com(SetOperad):
    """Com: one operation in every positive arity."""

    name = "com"

    def compose(self, x: Labels, i: int, y: Labels) -> Labels:
        self._check_index(x, i)
        return (0,) * (len(x) + len(y) - 1)

    def is_element(self, x: Labels) -> bool:
        return bool(x) and not any(x)

    def enumerate(self, n: int) -> tuple[Labels, ...]:
        return ((0,) * n,) if n >= 1 else ()

    def render(self, x: Labels) -> str:
        return f"com({len(x)})"


class Lev(SetOperad):
    """The level operad: depth maps with Σ 2^{-h(i)} = 1."""

    name = "lev"

    def compose(self, x: Labels, i: int, y: Labels) -> Labels:
        self._check_index(x, i)
        d = x[i - 1]
        result = x[: i - 1] + tuple(d + g for g in y) + x[i:]
        assert is_dyadic(result), result
        return result

    def is_element(self, x: Labels) -> bool:
        return is_dyadic(x)

    def enumerate(self, n: int) -> tuple[Labels, ...]:
        return _enumerate_depth_maps(n)


COM = Com()
LEV = Lev()
OPERADS: dict[str, SetOperad] = {"com": COM, "lev": LEV}


def get_operad(name: str) -> SetOperad:
    try:
        return OPERADS[name.strip().lower()]
    except KeyError:
        raise ParseError(f"unknown operad {name!r}: expected com or lev") from None


def _sorted_kraft(n: int, budget: Fraction, floor: int, bound: int) -> list[tuple[int, ...]]:
    if n == 0:
        return [()] if budget == 0 else []
    found = []
    for d in range(floor, bound + 1):
        weight = Fraction(1, 2**d)
        if weight * n < budget:
            break
        if weight > budget:
            continue
        for rest in _sorted_kraft(n - 1, budget - weight, d, bound):
            found.append((d, *rest))
    return found


@memoized("lev_orbit_representatives")
def lev_orbit_representatives(n: int) -> tuple[Labels, ...]:
    """Non-decreasing depth maps of arity n, one per Σ_n-orbit of ℒ(n).

    Depths never exceed n − 1: with n positive terms summing to 1, the smallest term
    2^{-h} is at least 2^{-(n-1)}.
    """
    if n < 1:
        return ()
    return tuple(_sorted_kraft(n, Fraction(1), 0, max(n - 1, 0)))


@memoized("enumerate_depth_maps")
def _enumerate_depth_maps(n: int) -> tuple[Labels, ...]:
    found = [
        tuple(perm)
        for representative in lev_orbit_representatives(n)
        for perm in multiset_permutations(list(representative))
    ]
    logger.debug("Enumerated |L(%d)| = %d", n, len(found))
    return tuple(sorted(found))


@dataclass(frozen=True)
class LevElement:
    """An element of ℒ(n) in map form h: [n] → ℕ."""

    depths: Labels

    def __post_init__(self) -> None:
        if not is_dyadic(self.depths):
            raise ShapeError(f"{list(self.depths)} does not satisfy Σ 2^-h = 1")

    @classmethod
    def unit(cls) -> LevElement:
        return cls((0,))

    @property
    def arity(self) -> int:
        return len(self.depths)

    @property
    def height(self) -> int:
        """o(I): the largest depth in use."""
        return max(self.depths)

    def partition_form(self) -> OrderedPartition:
        """I = (h⁻¹(0), h⁻¹(1), …, h⁻¹(o))."""
        return OrderedPartition.from_function([d + 1 for d in self.depths], self.height + 1)

    @classmethod
    def parse(cls, text: str) -> LevElement:
        raw = text.strip().replace(" ", "")
        match = re.fullmatch(r"(?:h=)?\[(\d+(?:,\d+)*)\]", raw)
        if not match:
            raise ParseError(f"bad level element {text!r}: expected e.g. h=[1,2,2]")
        try:
            return cls(tuple(int(x) for x in match.group(1).split(",")))
        except ShapeError as e:
            raise ParseError(str(e)) from e

    def __str__(self) -> str:
        return LEV.render(self.depths)


def lev_compose(left: LevElement, right: LevElement, i: int) -> LevElement:
    return LevElement(LEV.compose(left.depths, i, right.depths))


def enumerate_lev(n: int) -> tuple[LevElement, ...]:
    return tuple(LevElement(h) for h in LEV.enumerate(n))


def sigma_act(sigma: Permutation, x: LevElement) -> LevElement:
    return LevElement(LEV.act(sigma, x.depths))


def pr_to_com(x: LevElement) -> Labels:
    """The operad morphism Lev → Com: keep the arity, forget the depths."""
    return (0,) * x.arity
