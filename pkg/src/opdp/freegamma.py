"""Free Γ(P)-algebras on a set of generators, in orbit normal form.

A :class:`GammaTerm` (r, x, b_1 < … < b_p) stands for the invariant tensor
Σ_{σ ∈ Σ_n/Σ_r} σ·𝒪_{Σ_r}([x]) ⊗ σ·(b_1^{⊗r_1} ⊗ … ⊗ b_p^{⊗r_p}), which is the orbit sum of
the pair sequence ((b, x(1)), …, (b, x(n))) under Σ_n. The canonical representative of that
orbit is the sorted pair sequence, so normal forms are computed by sorting.

Generators may be any totally ordered hashable values: strings at the command line, and
GammaTerms themselves when elements are nested for the monad multiplication.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections import Counter
from collections.abc import Hashable, Iterable, Mapping, Sequence
from dataclasses import dataclass
from typing import Any

from sympy.utilities.iterables import multiset_permutations

from opdp.cache import memoized
from opdp.errors import ArityMismatch, NotInvariant, OpdpError, ShapeError
from opdp.permcomb import Composition, Labels, OrderedPartition, enumerate_compositions
from opdp.permrep import GVector, o_inverse
from opdp.scalar import FieldSpec, Scalar, index_ratio, reduce
from opdp.setoperad import COM, SetOperad
from opdp.symaction import WreathShape, YoungSubgroup, cosets, label_orbit

logger = logging.getLogger(__name__)

Generator = Any
Pair = tuple[Generator, int]


@dataclass(frozen=True, order=True)
class GammaTerm:
    """A basis element of Γ(P, V) in normal form."""

    r: Composition
    x: Labels
    gens: tuple[Generator, ...]

    def __post_init__(self) -> None:
        if any(part <= 0 for part in self.r):
            raise ShapeError(f"normal form needs positive parts, got {self.r}")
        if len(self.gens) != self.r.p or len(self.x) != self.r.n:
            raise ShapeError(f"{self.r} does not match x={self.x} and gens={self.gens}")
        if any(not a < b for a, b in zip(self.gens, self.gens[1:])):
            raise ShapeError(f"generators {self.gens} are not strictly increasing")
        if YoungSubgroup.of(self.r).canonical_labels(self.x) != self.x:
            raise ShapeError(f"{self.x} is not the canonical representative for Σ_{self.r}")

    @classmethod
    def generator(cls, g: Generator) -> GammaTerm:
        """The term of a bare generator: r = (1), x = the operad unit."""
        return cls(Composition((1,)), (0,), (g,))

    @classmethod
    def from_pairs(cls, pairs: Sequence[Pair]) -> GammaTerm:
        """Build the term of a sorted pair sequence ((generator, label), …)."""
        gens: list[Generator] = []
        parts: list[int] = []
        for g, _ in pairs:
            if gens and gens[-1] == g:
                parts[-1] += 1
            else:
                gens.append(g)
                parts.append(1)
        return cls(Composition(tuple(parts)), tuple(label for _, label in pairs), tuple(gens))

    @property
    def arity(self) -> int:
        return self.r.n

    def is_generator(self) -> bool:
        return self.r.parts == (1,) and self.x == (0,)

    def word(self) -> tuple[Generator, ...]:
        return tuple(g for g, part in zip(self.gens, self.r) for _ in range(part))

    def pairs(self) -> tuple[Pair, ...]:
        return tuple(zip(self.word(), self.x))


@dataclass
class FreeGammaElement:
    """A finite F-linear combination of GammaTerms."""

    operad: SetOperad
    field: FieldSpec
    terms: dict[GammaTerm, Scalar]

    def __post_init__(self) -> None:
        self.terms = {t: c for t, c in self.terms.items() if not c.is_zero()}

    @classmethod
    def zero(cls, operad: SetOperad, f: FieldSpec) -> FreeGammaElement:
        return cls(operad, f, {})

    @classmethod
    def of_term(
        cls, operad: SetOperad, f: FieldSpec, term: GammaTerm, c: Scalar | int = 1
    ) -> FreeGammaElement:
        return cls(operad, f, {term: reduce(c, f) if isinstance(c, int) else c})

    @classmethod
    def generator(cls, operad: SetOperad, f: FieldSpec, g: Generator) -> FreeGammaElement:
        return cls.of_term(operad, f, GammaTerm.generator(g))

    def add_term(self, term: GammaTerm, c: Scalar) -> None:
        total = self.terms.get(term, self.field.zero()) + c
        if total.is_zero():
            self.terms.pop(term, None)
        else:
            self.terms[term] = total

    def copy(self) -> FreeGammaElement:
        return FreeGammaElement(self.operad, self.field, dict(self.terms))

    def _check(self, other: FreeGammaElement) -> None:
        if other.operad.name != self.operad.name or other.field != self.field:
            raise OpdpError("elements of different free algebras")

    def __add__(self, other: FreeGammaElement) -> FreeGammaElement:
        self._check(other)
        out = self.copy()
        for t, c in other.terms.items():
            out.add_term(t, c)
        return out

    def __neg__(self) -> FreeGammaElement:
        return self.scale(-1)

    def __sub__(self, other: FreeGammaElement) -> FreeGammaElement:
        return self + (-other)

    def scale(self, c: Scalar | int) -> FreeGammaElement:
        return FreeGammaElement(self.operad, self.field, {t: v * c for t, v in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def sorted_terms(self) -> list[tuple[GammaTerm, Scalar]]:
        return sorted(self.terms.items(), key=lambda item: item[0])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FreeGammaElement):
            return NotImplemented
        return (
            self.operad.name == other.operad.name
            and self.field == other.field
            and self.terms == other.terms
        )


def _fiber_subgroup(word: Sequence[Generator]) -> YoungSubgroup:
    fibers: dict[Generator, list[int]] = {}
    for k, g in enumerate(word, start=1):
        fibers.setdefault(g, []).append(k)
    return YoungSubgroup(OrderedPartition.of(list(fibers.values()), len(word)))


def normalize_int(
    r: Composition, x: Labels, gens: Sequence[Generator]
) -> tuple[GammaTerm, int]:
    """Normal form of Σ_{σ∈Σ_n/Σ_r} σ·𝒪_{Σ_r}(x) ⊗ σ·⨂ b_i^{⊗r_i} and its integer factor.

    Zero parts vanish, the generators are sorted by a block permutation, and equal generators
    merge with factor |Stab_{Σ_W}(x)| / |Stab_{Σ_r}(x)|, Σ_W being the stabilizer of the word.
    """
    if len(gens) != r.p:
        raise ArityMismatch(f"{r} needs {r.p} generators, got {len(gens)}")
    if len(x) != r.n:
        raise ArityMismatch(f"{r} needs an element of arity {r.n}, got {len(x)}")
    word = tuple(g for g, part in zip(gens, r) for _ in range(part))
    factor = index_ratio(
        _fiber_subgroup(word).label_stabilizer_order(x),
        YoungSubgroup.of(r).label_stabilizer_order(x),
    )
    return GammaTerm.from_pairs(sorted(zip(word, x))), factor


def normalize(
    r: Composition, x: Labels, gens: Sequence[Generator], f: FieldSpec | None = None
) -> tuple[GammaTerm, Scalar]:
    term, factor = normalize_int(r, x, gens)
    return term, reduce(factor, f or FieldSpec.rationals())


def expand_to_invariant(term: GammaTerm) -> dict[tuple[Labels, tuple[Generator, ...]], int]:
    """The invariant tensor of a term as {(x, word): 1}; for cross-checks at small arity."""
    out = {}
    for perm in multiset_permutations(list(term.pairs())):
        word = tuple(g for g, _ in perm)
        labels = tuple(label for _, label in perm)
        out[(labels, word)] = 1
    return out


def invariant_to_terms(
    tensor: Mapping[tuple[Labels, tuple[Generator, ...]], Scalar],
) -> dict[GammaTerm, Scalar]:
    """Read an invariant tensor back into normal form; raise NotInvariant otherwise."""
    zero = None
    for (labels, word), c in tensor.items():
        zero = c.field.zero()
        for k in range(len(labels) - 1):
            swapped = (
                labels[:k] + (labels[k + 1], labels[k]) + labels[k + 2 :],
                word[:k] + (word[k + 1], word[k]) + word[k + 2 :],
            )
            if tensor.get(swapped, zero) != c:
                raise NotInvariant(f"tensor is not symmetric at {labels}, {word}")
    out: dict[GammaTerm, Scalar] = {}
    for (labels, word), c in tensor.items():
        pairs = tuple(zip(word, labels))
        if list(pairs) == sorted(pairs) and not c.is_zero():
            out[GammaTerm.from_pairs(pairs)] = c
    return out


def _is_sorted(items: Sequence[Any]) -> bool:
    return all(not b < a for a, b in zip(items, items[1:]))


def tilde_mu_counts(
    operad: SetOperad, r: Composition, x: Labels, inner: Sequence[GammaTerm]
) -> Counter[GammaTerm]:
    """Monad multiplication on one nested term, with integer coefficients.

    Results are memoized per (operad, r, x, inner); γ evaluations of related arguments
    revisit the same nested terms many times.
    """
    return Counter(dict(_tilde_mu_table(operad, r, tuple(x), tuple(inner))))


@memoized("tilde_mu")
def _tilde_mu_table(
    operad: SetOperad, r: Composition, x: Labels, inner: tuple[GammaTerm, ...]
) -> tuple[tuple[GammaTerm, int], ...]:
    """μ̃ on one nested term as (term, count) pairs.

    μ̃ = Σ_{τ ∈ Σ_M/W} τ·Z with W = ∏ Σ_{r_i} ≀ Σ_{q_i} and
    Z = Σ μ(x' ; y'_copies) ⊗ (v_1^{⊗r_1} ⊗ …), x' over the Σ_r-orbit of x and each copy
    y' independently over the Σ_{q_i}-orbit of the inner representative. The result is
    Σ_M-invariant, so only canonical pair sequences are kept.
    """
    if len(inner) != r.p:
        raise ShapeError(f"{r} needs {r.p} inner terms, got {len(inner)}")
    if len(x) != r.n:
        raise ArityMismatch(f"{r} needs an element of arity {r.n}, got {len(x)}")
    kept = [(part, term) for part, term in zip(r, inner) if part]
    r = Composition(tuple(part for part, _ in kept))
    blocks = [term for _, term in kept]
    if not blocks:
        return ()
    for term in blocks:
        if not isinstance(term, GammaTerm):
            raise ShapeError(f"inner entry {term!r} is not a normal-form term")

    wreath = WreathShape(r, tuple(term.r for term in blocks))
    copy_types = [i for i, part in enumerate(r) for _ in range(part)]
    word = tuple(g for i in copy_types for g in blocks[i].word())
    inner_orbits = [label_orbit(term.x, YoungSubgroup.of(term.r)) for term in blocks]

    z: Counter[Labels] = Counter()
    for outer in label_orbit(x, YoungSubgroup.of(r)):
        for ys in itertools.product(*(inner_orbits[i] for i in copy_types)):
            z[operad.full_compose(outer, ys)] += 1

    out: Counter[GammaTerm] = Counter()
    for tau in cosets(wreath.degree, wreath):
        moved_word = tau.permute(word)
        if not _is_sorted(moved_word):
            continue
        for labels, count in z.items():
            pairs = tuple(zip(moved_word, tau.act_labels(labels)))
            if _is_sorted(pairs):
                out[GammaTerm.from_pairs(pairs)] += count
    return tuple(out.items())


def tilde_mu(
    operad: SetOperad, f: FieldSpec, r: Composition, x: Labels, inner: Sequence[GammaTerm]
) -> FreeGammaElement:
    counts = tilde_mu_counts(operad, r, x, inner)
    return FreeGammaElement(operad, f, {t: reduce(c, f) for t, c in counts.items()})


def tilde_mu_element(nested: FreeGammaElement) -> FreeGammaElement:
    """μ̃ on an element of Γ(P, Γ(P, V)): generators of ``nested`` are GammaTerms."""
    out = FreeGammaElement.zero(nested.operad, nested.field)
    for term, c in nested.sorted_terms():
        out = out + tilde_mu(nested.operad, nested.field, term.r, term.x, term.gens).scale(c)
    return out


def eta(a: FreeGammaElement) -> FreeGammaElement:
    """η̃: a ↦ a viewed as a one-letter word in Γ(P, Γ(P, V))."""
    return FreeGammaElement(
        a.operad, a.field, {GammaTerm.generator(t): c for t, c in a.terms.items()}
    )


def map_generators(a: FreeGammaElement, mapping: Mapping[Generator, Generator]) -> FreeGammaElement:
    """Γ(P, g) for a map g sending generators to generators."""
    out = FreeGammaElement.zero(a.operad, a.field)
    for term, c in a.terms.items():
        image, factor = normalize(term.r, term.x, [mapping[g] for g in term.gens], a.field)
        out.add_term(image, c * factor)
    return out


def _weak_compositions(total: int, length: int) -> list[tuple[int, ...]]:
    return [comp.parts for comp in enumerate_compositions(total, length)]


def gamma_eval(
    operad: SetOperad,
    x: Labels,
    r: Composition,
    args: Sequence[FreeGammaElement],
) -> FreeGammaElement:
    """γ_{[x]_r, r}(a_1, …, a_p) in the free algebra.

    Each a_i is split into basis terms; distributing the r_i copies of a_i among its terms
    restricts 𝒪_{Σ_r}(x) to the finer Young subgroup, and every resulting nested term goes
    through μ̃.
    """
    if len(args) != r.p:
        raise ArityMismatch(f"{r} needs {r.p} arguments, got {len(args)}")
    if len(x) != r.n:
        raise ArityMismatch(f"{r} needs an element of arity {r.n}, got {len(x)}")
    if not operad.is_element(x):
        raise ShapeError(f"{x} is not an element of {operad.name}")
    if not args:
        raise ArityMismatch("a reduced operad has no nullary operations")
    f = args[0].field
    for a in args:
        args[0]._check(a)
    out = FreeGammaElement.zero(operad, f)
    young = YoungSubgroup.of(r)
    orbit = label_orbit(x, young)
    expansions = [a.sorted_terms() for a in args]
    if any(not terms and part for terms, part in zip(expansions, r)):
        return out

    per_block = [
        _weak_compositions(part, len(terms)) if terms else [()]
        for part, terms in zip(r, expansions)
    ]
    for split in itertools.product(*per_block):
        coefficient = f.one()
        refined: list[int] = []
        inner: list[GammaTerm] = []
        for terms, counts in zip(expansions, split):
            for (term, c), k in zip(terms, counts):
                coefficient = coefficient * c**k
                refined.append(k)
                inner.append(term)
        finer = YoungSubgroup.of(Composition(tuple(refined)))
        for y in sorted({finer.canonical_labels(z) for z in orbit}):
            counts = tilde_mu_counts(operad, Composition(tuple(refined)), y, inner)
            for term, count in counts.items():
                out.add_term(term, coefficient * count)
    return out


def beta_eval(
    operad: SetOperad,
    x: GVector | Mapping[Labels, Scalar],
    r: Composition,
    args: Sequence[FreeGammaElement],
) -> FreeGammaElement:
    """β_{x, r} for x ∈ P(n)^{Σ_r}: linear in x, with β_{𝒪([y]), r} = γ_{[y], r}."""
    young = YoungSubgroup.of(r)
    if isinstance(x, GVector):
        classes = x.terms if x.mode == "coinvariant" else o_inverse(x, young).terms
    else:
        classes = dict(x)
        if not all(young.canonical_labels(y) == y for y in classes):
            raise NotInvariant("β needs Σ_r-classes given by canonical representatives")
    f = args[0].field if args else FieldSpec.rationals()
    out = FreeGammaElement.zero(operad, f)
    for y, c in sorted(classes.items()):
        out = out + gamma_eval(operad, y, r, args).scale(c)
    return out


@dataclass
class SchurElement:
    """An element of S(P, V): coinvariant classes, indexed like the Γ normal form."""

    operad: SetOperad
    field: FieldSpec
    terms: dict[GammaTerm, Scalar]


def trace_map(s: SchurElement) -> FreeGammaElement:
    """Orbit-sum image of coinvariant classes, through the explicit invariant tensor."""
    tensor: dict[tuple[Labels, tuple[Generator, ...]], Scalar] = {}
    for term, c in s.terms.items():
        for key in expand_to_invariant(term):
            tensor[key] = tensor.get(key, s.field.zero()) + c
    return FreeGammaElement(s.operad, s.field, invariant_to_terms(tensor))


def trace_inverse(a: FreeGammaElement) -> SchurElement:
    return SchurElement(a.operad, a.field, dict(a.terms))


def pair_stabilizer_order(term: GammaTerm) -> int:
    """|Stab_{Σ_n}| of the pair sequence of a term."""
    return math.prod(math.factorial(c) for c in Counter(term.pairs()).values())


def norm_map(s: SchurElement) -> FreeGammaElement:
    """The norm Σ_{g ∈ Σ_n} g·t: |Stab(t)| times the orbit sum; bijective only in char 0."""
    return FreeGammaElement(
        s.operad,
        s.field,
        {t: c * reduce(pair_stabilizer_order(t), s.field) for t, c in s.terms.items()},
    )


def com_product(a: FreeGammaElement, b: FreeGammaElement) -> FreeGammaElement:
    """ab = γ_{X_2, (1,1)}(a, b) in a free Γ(Com)-algebra."""
    return gamma_eval(COM, (0, 0), Composition((1, 1)), [a, b])


def com_divided_power(n: int, a: FreeGammaElement) -> FreeGammaElement:
    """γ_n(a) = γ_{X_n, (n)}(a); γ_0(a) is not an element of the reduced free algebra."""
    if n < 1:
        raise ArityMismatch("divided powers of a reduced free algebra start at γ_1")
    return gamma_eval(COM, (0,) * n, Composition((n,)), [a])


def com_power(a: FreeGammaElement, n: int) -> FreeGammaElement:
    result = a
    for _ in range(n - 1):
        result = com_product(result, a)
    return result


def com_monomial(
    f: FieldSpec, exponents: Mapping[Hashable, int]
) -> FreeGammaElement:
    """∏ γ_{k_i}(b_i): the normal-form basis element of the free Γ(Com)-algebra."""
    gens = tuple(sorted(g for g, k in exponents.items() if k))
    r = Composition(tuple(exponents[g] for g in gens))
    return FreeGammaElement.of_term(COM, f, GammaTerm(r, (0,) * r.n, gens))


def terms_in_arity(operad: SetOperad, gens: Iterable[Generator], n: int) -> list[GammaTerm]:
    """All normal-form terms of arity n on the given generators."""
    ordered = sorted(gens)
    found = []
    for p in range(1, min(n, len(ordered)) + 1):
        for chosen in itertools.combinations(ordered, p):
            for comp in enumerate_compositions(n, p):
                if 0 in comp.parts:
                    continue
                young = YoungSubgroup.of(comp)
                reps = {young.canonical_labels(x) for x in operad.enumerate(n)}
                found.extend(GammaTerm(comp, x, chosen) for x in sorted(reps))
    return sorted(found)
