"""
Memo cache for pure engine computations.

Spectra and period infima are pure functions of immutable specs, so entries
never go stale; the cache is bounded and evicts in insertion order.
"""
import functools
import logging
import threading
from collections import Counter, OrderedDict
from typing import Any, Callable, Dict, Optional, Tuple

from .. import config

logger = logging.getLogger(__name__)

_MISSING = object()

Key = Tuple[str, str]


class InMemoryCache:
    """Bounded FIFO store keyed by (namespace, argument key), safe to share between sweep workers."""

    def __init__(self, max_entries: Optional[int] = None):
        self._entries: 'OrderedDict[Key, Any]' = OrderedDict()
        self._lock = threading.RLock()
        self.max_entries = max_entries or config.CACHE_MAX_ENTRIES
        self.hits = Counter()
        self.misses = Counter()

    def lookup(self, key: Key) -> Any:
        """Stored value or _MISSING, counting the hit or miss against the namespace."""
        with self._lock:
            value = self._entries.get(key, _MISSING)
            (self.misses if value is _MISSING else self.hits)[key[0]] += 1
            return value

    def store(self, key: Key, value: Any):
        with self._lock:
            self._entries[key] = value
            while len(self._entries) > self.max_entries:
                (namespace, evicted), _ = self._entries.popitem(last=False)
                logger.debug(f"Evicted {namespace} entry {evicted[:60]}")

    def clear(self, namespace: Optional[str] = None):
        with self._lock:
            if namespace is None:
                self._entries.clear()
                self.hits.clear()
                self.misses.clear()
                return
            for key in [k for k in self._entries if k[0] == namespace]:
                del self._entries[key]
            self.hits.pop(namespace, None)
            self.misses.pop(namespace, None)

    def __len__(self):
        with self._lock:
            return len(self._entries)

    def stats(self) -> Dict[str, Dict[str, int]]:
        """Per-namespace entry, hit and miss counts."""
        with self._lock:
            sizes = Counter(namespace for namespace, _ in self._entries)
            names = set(sizes) | set(self.hits) | set(self.misses)
            return {name: {'entries': sizes[name], 'hits': self.hits[name], 'misses': self.misses[name]}
                    for name in sorted(names)}


class CacheService:
    """Process-wide memo shared by every engine module."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super(CacheService, cls).__new__(cls)
            cls._instance._initialized = False
        return cls._instance

    def __init__(self):
        if self._initialized:
            return
        self.store = InMemoryCache()
        self.enabled = True
        self._initialized = True

    def memo(self, namespace: str, key: str, compute: Callable[[], Any]) -> Any:
        """Return the stored value for key, computing and storing it on a miss."""
        if not self.enabled:
            return compute()
        value = self.store.lookup((namespace, key))
        if value is _MISSING:
            value = compute()
            self.store.store((namespace, key), value)
        return value

    def clear(self, namespace: Optional[str] = None):
        self.store.clear(namespace)

    def stats(self) -> Dict[str, Dict[str, int]]:
        return self.store.stats()


cache_service = CacheService()


def argument_key(func: Callable, args: tuple, kwargs: dict) -> str:
    """Key from the function identity and argument reprs.

    Arguments must have deterministic reprs (Fractions, ints, frozen dataclasses).
    """
    parts = [func.__module__, func.__qualname__]
    parts.extend(repr(arg) for arg in args)
    parts.extend(f"{k}={kwargs[k]!r}" for k in sorted(kwargs))
    return ":".join(parts)


def cached(namespace: str):
    """Memoize a pure function in the shared cache under namespace."""
    def decorator(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            return cache_service.memo(namespace, argument_key(func, args, kwargs),
                                      lambda: func(*args, **kwargs))
        return wrapper
    return decorator
