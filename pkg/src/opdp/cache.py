"""Thread-safe memo cache for enumerations (Lev sets, BHS sets, coset lists)."""

import logging
import threading
from collections.abc import Callable, Hashable
from dataclasses import dataclass
from typing import Any, Generic, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")


@dataclass(frozen=True)
class CachedValue(Generic[T]):
    """A memoized value and its length (1 for scalars)."""

    data: T
    size: int


class MemoCache:
    """Thread-safe memo table.

    Values must be immutable (tuples, frozen dataclasses): readers share them without copying.
    """

    def __init__(self) -> None:
        self._cache: dict[Hashable, CachedValue[Any]] = {}
        self._lock = threading.Lock()
        self._stats = {"hits": 0, "misses": 0}
        logger.debug("Memo cache initialized")

    def get(self, key: Hashable) -> Any | None:
        with self._lock:
            cached = self._cache.get(key)
            if cached is not None:
                self._stats["hits"] += 1
                logger.debug("Cache HIT: key=%s", key)
                return cached.data
            self._stats["misses"] += 1
            logger.debug("Cache MISS: key=%s", key)
            return None

    def set(self, key: Hashable, data: Any) -> None:
        size = len(data) if hasattr(data, "__len__") else 1
        with self._lock:
            self._cache[key] = CachedValue(data=data, size=size)
            logger.debug("Cache SET: key=%s size=%d", key, size)

    def get_or_compute(self, key: Hashable, compute: Callable[[], T]) -> T:
        """
        Return the cached value for ``key``, computing and storing it on a miss.

        The computation runs outside the lock; two racing threads may both compute, and the
        results are equal because every cached computation is pure.
        """
        cached = self.get(key)
        if cached is not None:
            return cached
        data = compute()
        self.set(key, data)
        return data

    def clear(self) -> None:
        with self._lock:
            count = len(self._cache)
            self._cache.clear()
            self._stats = {"hits": 0, "misses": 0}
            logger.info("Cache cleared: removed %d entries", count)

    def keys(self) -> list[Hashable]:
        """Get all cache keys (for debugging)."""
        with self._lock:
            return list(self._cache.keys())

    def get_stats(self) -> dict[str, Any]:
        with self._lock:
            total_requests = self._stats["hits"] + self._stats["misses"]
            hit_rate = self._stats["hits"] / total_requests * 100 if total_requests > 0 else 0.0
            return {
                "entries": len(self._cache),
                "hits": self._stats["hits"],
                "misses": self._stats["misses"],
                "hit_rate_pct": round(hit_rate, 1),
            }


# Global cache instance
_global_cache = MemoCache()


def get_cache() -> MemoCache:
    """Get the global cache instance."""
    return _global_cache


def memoized(namespace: str) -> Callable[[Callable[..., T]], Callable[..., T]]:
    """Memoize a pure function of hashable arguments in the global cache."""

    def decorate(func: Callable[..., T]) -> Callable[..., T]:
        def wrapper(*args: Hashable) -> T:
            return get_cache().get_or_compute((namespace, *args), lambda: func(*args))

        wrapper.__name__ = func.__name__
        wrapper.__doc__ = func.__doc__
        wrapper.__wrapped__ = func  # type: ignore[attr-defined]
        return wrapper

    return decorate
