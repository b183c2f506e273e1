"""Tests for compositions, ordered partitions and the partition operations."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opdp.errors import ArityMismatch, DegreeMismatch, ParseError, ShapeMismatch
from opdp.permcomb import (
    Composition,
    OrderedPartition,
    Permutation,
    act,
    diamond,
    diamond_block,
    enumerate_compositions,
    enumerate_partitions,
    find_transporter,
    gamma_k,
    iota,
    partition_compose,
    tensor,
    triangle,
    wedge,
    wedge_is_composition,
)


def permutations_of(n: int) -> st.SearchStrategy[Permutation]:
    return st.permutations(list(range(1, n + 1))).map(lambda images: Permutation(tuple(images)))


def test_gamma_k_gathers_translates() -> None:
    partition = OrderedPartition.of([[1, 3], [2]])
    assert gamma_k(3, partition) == OrderedPartition.of([[1, 3, 4, 6, 7, 9], [2, 5, 8]])


def test_diamond_block() -> None:
    r = Composition.of(3, 2)
    qs = [iota(Composition.of(2, 1)), iota(Composition.of(1, 2))]
    assert diamond_block(r, qs, 2, 1) == (10, 13)
    assert diamond(r, qs).n == 15
    assert diamond(r, qs).p == 4


def test_diamond_needs_one_partition_per_part() -> None:
    with pytest.raises(ArityMismatch):
        diamond(Composition.of(1, 1), [iota(Composition.of(1))])


def test_permute_moves_entries() -> None:
    sigma = Permutation((2, 3, 1))
    assert sigma.permute("abc") == ("c", "a", "b")
    assert sigma.inverse() * sigma == Permutation.identity(3)
    assert Permutation.transposition(3, 1, 3).images == (3, 2, 1)


def test_degrees_must_agree() -> None:
    sigma = Permutation((2, 1))
    with pytest.raises(DegreeMismatch):
        _ = sigma * Permutation.identity(3)
    with pytest.raises(DegreeMismatch):
        sigma.permute("abc")
    with pytest.raises(DegreeMismatch):
        act(sigma, OrderedPartition.of([[1, 3], [2]]))


@settings(max_examples=40, deadline=None)
@given(permutations_of(4), permutations_of(4), st.tuples(*[st.integers(0, 3)] * 4))
def test_label_action_is_a_left_action(
    sigma: Permutation, tau: Permutation, labels: tuple[int, ...]
) -> None:
    assert sigma.act_labels(tau.act_labels(labels)) == (sigma * tau).act_labels(labels)


def test_composition_parse_and_compose_at() -> None:
    r = Composition.parse("(3, 2)")
    assert r == Composition.of(3, 2)
    assert Composition.parse("()") == Composition(())
    assert r.compose_at(1, Composition.of(1, 2)) == Composition.of(1, 2, 2)
    assert Composition.of(2, 0, 1).without_zeros() == Composition.of(2, 1)
    with pytest.raises(ArityMismatch):
        r.compose_at(1, Composition.of(1, 1))
    with pytest.raises(ParseError):
        Composition.parse("3,2")


def test_partition_parse_roundtrip() -> None:
    partition = OrderedPartition.parse("({1,3},∅,{2})")
    assert partition.blocks == ((1, 3), (), (2,))
    assert partition.n == 3
    assert str(partition) == "({1,3},∅,{2})"
    assert partition.function() == (1, 3, 1)
    with pytest.raises(ParseError):
        OrderedPartition.parse("({1,1})")


def test_iota_keeps_empty_blocks() -> None:
    partition = iota(Composition.of(2, 0, 1))
    assert partition.blocks == ((1, 2), (), (3,))
    assert partition.is_interval()
    assert not OrderedPartition.of([[2], [1]]).is_interval()


def test_partition_compose_refines_a_block() -> None:
    r_part = OrderedPartition.of([[1, 3], [2]])
    q_part = OrderedPartition.of([[2], [1]])
    assert partition_compose(r_part, q_part, 1) == OrderedPartition.of([[3], [1], [2]])


def test_triangle_composes_block_functions() -> None:
    r_part = OrderedPartition.of([[1], [2, 3], [4]])
    q_part = OrderedPartition.of([[1, 3], [2]])
    result = triangle(q_part, r_part)
    assert result == OrderedPartition.of([[1, 4], [2, 3]])
    assert result.function() == tuple(q_part.function()[d - 1] for d in r_part.function())


def test_tensor_and_wedge() -> None:
    assert tensor(OrderedPartition.of([[1], [2]]), OrderedPartition.coarse(2)) == (
        OrderedPartition.of([[1], [2], [3, 4]])
    )
    r_part = OrderedPartition.of([[1, 2], [3]])
    q_part = OrderedPartition.of([[1, 3], [2]])
    assert wedge(r_part, q_part).blocks == ((1,), (2,), (3,), ())


def test_wedge_is_composition() -> None:
    r = Composition.of(2, 1)
    assert wedge_is_composition(r, OrderedPartition.from_function([1, 2, 1]))
    assert not wedge_is_composition(r, OrderedPartition.from_function([2, 1, 1]))


def test_find_transporter() -> None:
    source = OrderedPartition.of([[2, 3], [1]])
    target = iota(source.sizes())
    sigma = find_transporter(source, target)
    assert act(sigma, source) == target
    with pytest.raises(ShapeMismatch):
        find_transporter(source, iota(Composition.of(1, 2)))


def test_enumerate_compositions() -> None:
    assert enumerate_compositions(2, 2) == [
        Composition.of(0, 2),
        Composition.of(1, 1),
        Composition.of(2, 0),
    ]
    assert enumerate_compositions(0, 0) == [Composition(())]
    assert enumerate_compositions(3, 0) == []


@pytest.mark.parametrize(("n", "p"), [(0, 1), (3, 2), (4, 3), (5, 1)])
def test_enumerate_compositions_count(n: int, p: int) -> None:
    assert len(enumerate_compositions(n, p)) == math.comb(n + p - 1, p - 1)


@pytest.mark.parametrize("parts", [(2, 1), (1, 1, 1), (0, 2), (2, 2)])
def test_enumerate_partitions(parts: tuple[int, ...]) -> None:
    r = Composition(parts)
    found = enumerate_partitions(r)
    expected = math.factorial(r.n) // math.prod(math.factorial(part) for part in parts)
    assert len(found) == expected
    assert len(set(found)) == expected
    assert all(partition.sizes() == r for partition in found)


def _partitions_of(n: int, max_blocks: int = 3) -> list[OrderedPartition]:
    return [
        partition
        for p in range(1, max_blocks + 1)
        for r in enumerate_compositions(n, p)
        if 0 not in r.parts
        for partition in enumerate_partitions(r)
    ]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_partition_compose_unit(n: int) -> None:
    for r_part in _partitions_of(n):
        assert partition_compose(OrderedPartition.coarse(n), r_part, 1) == r_part
        for i, block in enumerate(r_part.blocks, start=1):
            assert partition_compose(r_part, OrderedPartition.coarse(len(block)), i) == r_part


def test_partition_compose_associativity() -> None:
    for r_part in _partitions_of(3):
        for i, block in enumerate(r_part.blocks, start=1):
            for q_part in _partitions_of(len(block)):
                for j, inner in enumerate(q_part.blocks, start=1):
                    for s_part in _partitions_of(len(inner)):
                        left = partition_compose(
                            partition_compose(r_part, q_part, i), s_part, i + j - 1
                        )
                        right = partition_compose(r_part, partition_compose(q_part, s_part, j), i)
                        assert left == right


def test_partition_compose_equivariance() -> None:
    for r_part in _partitions_of(3):
        for sigma in [Permutation((2, 3, 1)), Permutation((1, 3, 2))]:
            moved = act(sigma, r_part)
            assert moved.sizes() == r_part.sizes()
            assert moved.function() == sigma.act_labels(r_part.function())


@settings(max_examples=30, deadline=None)
@given(
    st.sampled_from(_partitions_of(2)),
    st.sampled_from(_partitions_of(1)),
    st.sampled_from(_partitions_of(3)),
)
def test_tensor_is_associative(
    a: OrderedPartition, b: OrderedPartition, c: OrderedPartition
) -> None:
    assert tensor(tensor(a, b), c) == tensor(a, tensor(b, c))
