"""Tests for the memo cache."""

from opdp.cache import MemoCache, get_cache, memoized


def test_get_set_and_stats() -> None:
    cache = MemoCache()
    assert cache.get("missing") is None
    cache.set("key", (1, 2, 3))
    assert cache.get("key") == (1, 2, 3)
    stats = cache.get_stats()
    assert stats["entries"] == 1
    assert stats["hits"] == 1
    assert stats["misses"] == 1
    assert stats["hit_rate_pct"] == 50.0


def test_get_or_compute_runs_once() -> None:
    cache = MemoCache()
    calls = []

    def compute() -> tuple[int, ...]:
        calls.append(1)
        return (4, 2)

    assert cache.get_or_compute("k", compute) == (4, 2)
    assert cache.get_or_compute("k", compute) == (4, 2)
    assert len(calls) == 1


def test_clear() -> None:
    cache = MemoCache()
    cache.set("a", 1)
    cache.clear()
    assert cache.keys() == []
    assert cache.get_stats()["hits"] == 0


def test_memoized_uses_namespace() -> None:
    calls = []

    @memoized("test_square")
    def square(n: int) -> int:
        calls.append(n)
        return n * n

    assert square(7) == 49
    assert square(7) == 49
    assert calls == [7]
    assert ("test_square", 7) in get_cache().keys()
    assert square.__name__ == "square"
